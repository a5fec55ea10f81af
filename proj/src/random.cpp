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

#include "qcest/random.hpp"

#include <cmath>

namespace qcest
{

namespace
{

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags)
{
    std::uint64_t state = splitmix64(seed);
    for (std::uint64_t tag : tags)
        state = splitmix64(state ^ splitmix64(tag + 0x632be59bd9b4e019ULL));
    return state;
}

CVector standard_complex_normal(Rng &rng, Eigen::Index n)
{
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    CVector w(n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        const double re = normal(rng);
        const double im = normal(rng);
        w[i] = cdouble(re, im);
    }
    return w;
}

} // namespace qcest
