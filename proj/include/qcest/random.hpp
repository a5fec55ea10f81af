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

#ifndef QCEST_RANDOM_HPP
#define QCEST_RANDOM_HPP

#include "qcest/types.hpp"

#include <cstdint>
#include <initializer_list>
#include <random>

namespace qcest
{

using Rng = std::mt19937_64;

/// Deterministic sub-stream seed from a base seed and a list of integer
/// tags (sample index, sweep point, ...). Results do not depend on the
/// order in which streams are created, so parallel and serial runs agree.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags);

inline Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> tags)
{
    return Rng(derive_seed(seed, tags));
}

/// Vector of i.i.d. circularly symmetric complex Gaussians with unit
/// variance (real and imaginary parts N(0, 1/2)).
CVector standard_complex_normal(Rng &rng, Eigen::Index n);

} // namespace qcest

#endif
