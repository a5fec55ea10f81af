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

#include "qcest/binary_io.hpp"
#include "qcest/gmm_prior.hpp"

#include <stdexcept>

namespace qcest
{

namespace
{

constexpr std::array<char, 8> kPriorMagic = {'Q', 'C', 'E', 'S', 'T', 'G', 'M', 'M'};
constexpr std::uint32_t kPriorVersion = 1;
// Guards against absurd allocations from corrupt headers.
constexpr std::uint64_t kMaxDimension = 1u << 16;

std::uint32_t structure_code(CovarianceStructure s)
{
    switch (s)
    {
    case CovarianceStructure::Full:
        return 0;
    case CovarianceStructure::Toeplitz:
        return 1;
    case CovarianceStructure::Circulant:
        return 2;
    }
    throw std::logic_error("unknown structure");
}

} // namespace

void save_prior(const GmmPrior &prior, const std::filesystem::path &path)
{
    BinaryWriter w(path);
    const int k_count = prior.n_components();
    const int n = prior.n_antennas();
    const bool structured = prior.structure() != CovarianceStructure::Full;
    const std::uint64_t m = structured ? static_cast<std::uint64_t>(prior.transform()->spectrum_size()) : 0;

    w.write_magic(kPriorMagic);
    w.write_u32(kPriorVersion);
    w.write_u32(structure_code(prior.structure()));
    w.write_u64(static_cast<std::uint64_t>(k_count));
    w.write_u64(static_cast<std::uint64_t>(n));
    w.write_u64(m);
    for (int k = 0; k < k_count; ++k)
        w.write_f64(prior.weights()[k]);
    for (int k = 0; k < k_count; ++k)
    {
        if (structured)
        {
            const RVector &c = prior.spectrum(k);
            for (Eigen::Index i = 0; i < c.size(); ++i)
                w.write_f64(c[i]);
            continue;
        }
        const CMatrix &c = prior.covariance(k);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                w.write_complex(c(i, j));
    }
    w.close();
}

GmmPrior load_prior(const std::filesystem::path &path)
{
    BinaryReader r(path);
    r.expect_magic(kPriorMagic, "GMM prior");
    const std::uint32_t version = r.read_u32();
    if (version != kPriorVersion)
        throw std::runtime_error("prior file version " + std::to_string(version) + " is not supported (expected " +
                                 std::to_string(kPriorVersion) + ")");
    const std::uint32_t code = r.read_u32();
    if (code > 2)
        throw std::runtime_error("prior file: unknown structure code " + std::to_string(code));
    const auto structure = code == 0 ? CovarianceStructure::Full
                                     : (code == 1 ? CovarianceStructure::Toeplitz : CovarianceStructure::Circulant);
    const std::uint64_t k_count = r.read_u64();
    const std::uint64_t n = r.read_u64();
    const std::uint64_t m = r.read_u64();
    if (k_count == 0 || n == 0 || k_count > kMaxDimension || n > kMaxDimension)
        throw std::runtime_error("prior file: implausible dimensions");
    const std::uint64_t expected_m =
        structure == CovarianceStructure::Full ? 0 : (structure == CovarianceStructure::Toeplitz ? 2 * n : n);
    if (m != expected_m)
        throw std::runtime_error("prior file: spectrum length does not match structure and N");
    const std::uint64_t payload =
        8 * k_count + (structure == CovarianceStructure::Full ? 16 * k_count * n * n : 8 * k_count * m);
    if (r.remaining() != payload)
        throw std::runtime_error("prior file: payload size mismatch (corrupt or truncated)");

    RVector weights(static_cast<Eigen::Index>(k_count));
    for (std::uint64_t k = 0; k < k_count; ++k)
        weights[static_cast<Eigen::Index>(k)] = r.read_f64();

    const auto ni = static_cast<Eigen::Index>(n);
    if (structure == CovarianceStructure::Full)
    {
        std::vector<CMatrix> covs(k_count, CMatrix(ni, ni));
        for (auto &c : covs)
            for (Eigen::Index j = 0; j < ni; ++j)
                for (Eigen::Index i = 0; i < ni; ++i)
                    c(i, j) = r.read_complex();
        return GmmPrior::full(std::move(weights), std::move(covs));
    }
    std::vector<RVector> spectra(k_count, RVector(static_cast<Eigen::Index>(m)));
    for (auto &c : spectra)
        for (Eigen::Index i = 0; i < c.size(); ++i)
            c[i] = r.read_f64();
    return GmmPrior::structured(structure, static_cast<int>(n), std::move(weights), std::move(spectra));
}

} // namespace qcest
