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

#ifndef QCEST_NORMAL_HPP
#define QCEST_NORMAL_HPP

namespace qcest
{

/// Standard normal density.
double normal_pdf(double x);

/// Standard normal CDF, evaluated through erfc so that the lower tail keeps
/// full relative precision.
double normal_cdf(double x);

/// Scaled complementary error function erfcx(x) = exp(x^2) * erfc(x).
/// Finite for all x up to overflow of exp(x^2) on the negative side.
double erfcx(double x);

/// phi(t) / Phi(t), the inverse Mills ratio of the lower-truncated normal.
/// Stable for arbitrarily negative t, where it behaves like -t.
double inverse_mills_ratio(double t);

} // namespace qcest

#endif
