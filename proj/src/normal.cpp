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

#include "qcest/normal.hpp"

#include <cmath>
#include <numbers>

namespace qcest
{

namespace
{

constexpr double kInvSqrt2Pi = 0.3989422804014326779399461; // 1/sqrt(2 pi)

// Continued fraction for erfcx(x), x > 0:
// sqrt(pi) erfcx(x) = 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))).
// Evaluated with the modified Lentz algorithm; converges fast for x >= 2.
double erfcx_continued_fraction(double x)
{
    constexpr double tiny = 1e-300;
    double f = x;
    double c = x;
    double d = 0.0;
    for (int n = 1; n < 500; ++n)
    {
        const double a = 0.5 * n;
        d = x + a * d;
        if (std::abs(d) < tiny)
            d = tiny;
        c = x + a / c;
        if (std::abs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16)
            break;
    }
    return 1.0 / (f * std::sqrt(std::numbers::pi));
}

} // namespace

double normal_pdf(double x)
{
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double normal_cdf(double x)
{
    return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0);
}

double erfcx(double x)
{
    if (x < 2.0)
        return std::exp(x * x) * std::erfc(x);
    return erfcx_continued_fraction(x);
}

double inverse_mills_ratio(double t)
{
    if (t >= -8.0)
        return normal_pdf(t) / normal_cdf(t);
    // phi(t) / Phi(t) = sqrt(2/pi) / erfcx(-t / sqrt(2))
    return std::sqrt(2.0 / std::numbers::pi) / erfcx(-t / std::numbers::sqrt2);
}

} // namespace qcest
