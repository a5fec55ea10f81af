// SPDX-License-Identifier: Apache-2.0
//
// qcest: channel estimation for one-bit quantized MIMO receivers
// Copyright (C) 2026 The qcest authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef QCEST_PARALLEL_HPP
#define QCEST_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace qcest
{

/// Worker count: QCEST_THREADS if set and positive, otherwise the hardware
/// concurrency (at least 1).
unsigned thread_count();

/// Runs body(i) for i in [0, n). Work is split into contiguous blocks, one
/// per worker; body must only write to state owned by index i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body);

} // namespace qcest

#endif
