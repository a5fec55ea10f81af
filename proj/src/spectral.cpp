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

#include "qcest/spectral.hpp"

#include "qcest/linalg.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace qcest
{

namespace
{

// Eigen::FFT caches plans internally and is not safe for concurrent use.
Eigen::FFT<double> &local_fft()
{
    thread_local Eigen::FFT<double> fft;
    return fft;
}

// kissfft does not handle length one, where both transforms are the identity.
void fft_forward(std::vector<cdouble> &out, const std::vector<cdouble> &in)
{
    if (in.size() == 1)
        out = in;
    else
        local_fft().fwd(out, in);
}

void fft_inverse(std::vector<cdouble> &out, const std::vector<cdouble> &in)
{
    if (in.size() == 1)
        out = in;
    else
        local_fft().inv(out, in);
}

} // namespace

std::string to_string(CovarianceStructure s)
{
    switch (s)
    {
    case CovarianceStructure::Full:
        return "full";
    case CovarianceStructure::Toeplitz:
        return "toeplitz";
    case CovarianceStructure::Circulant:
        return "circulant";
    }
    return "unknown";
}

CovarianceStructure parse_structure(std::string_view name)
{
    if (name == "full")
        return CovarianceStructure::Full;
    if (name == "toeplitz" || name == "toep")
        return CovarianceStructure::Toeplitz;
    if (name == "circulant" || name == "circ")
        return CovarianceStructure::Circulant;
    throw std::invalid_argument("unknown covariance structure '" + std::string(name) + "'");
}

SpectralTransform::SpectralTransform(CovarianceStructure structure, int n_antennas)
    : structure_(structure), n_(n_antennas)
{
    if (structure == CovarianceStructure::Full)
        throw std::invalid_argument("SpectralTransform: full covariances have no spectral factor");
    if (n_antennas < 1)
        throw std::invalid_argument("SpectralTransform: need at least one antenna");
    m_ = structure == CovarianceStructure::Toeplitz ? 2 * n_ : n_;
}

CVector SpectralTransform::forward(const CVector &h) const
{
    if (h.size() != n_)
        throw std::invalid_argument("SpectralTransform::forward: dimension mismatch");
    std::vector<cdouble> in(static_cast<std::size_t>(m_), cdouble(0.0, 0.0));
    for (int i = 0; i < n_; ++i)
        in[i] = h[i];
    std::vector<cdouble> out;
    fft_forward(out, in);
    CVector x(m_);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m_));
    for (int i = 0; i < m_; ++i)
        x[i] = out[i] * scale;
    return x;
}

CVector SpectralTransform::adjoint(const CVector &x) const
{
    if (x.size() != m_)
        throw std::invalid_argument("SpectralTransform::adjoint: dimension mismatch");
    std::vector<cdouble> in(x.data(), x.data() + m_);
    std::vector<cdouble> out;
    fft_inverse(out, in); // includes 1/m
    CVector h(n_);
    const double scale = std::sqrt(static_cast<double>(m_));
    for (int i = 0; i < n_; ++i)
        h[i] = out[i] * scale;
    return h;
}

RVector SpectralTransform::periodogram(const CVector &h) const
{
    return forward(h).cwiseAbs2();
}

RVector SpectralTransform::spectral_diagonal(const CMatrix &s) const
{
    if (s.rows() != n_ || s.cols() != n_)
        throw std::invalid_argument("SpectralTransform::spectral_diagonal: dimension mismatch");
    // [Q S Q^H]_mm = (1/m) sum_d s_d exp(-j 2 pi m d / m), s_d = sum_{i-j=d} S_ij
    std::vector<cdouble> lag_sums(static_cast<std::size_t>(m_), cdouble(0.0, 0.0));
    for (int j = 0; j < n_; ++j)
        for (int i = 0; i < n_; ++i)
            lag_sums[static_cast<std::size_t>((i - j + m_) % m_)] += s(i, j);
    std::vector<cdouble> out;
    fft_forward(out, lag_sums);
    RVector diag(m_);
    for (int k = 0; k < m_; ++k)
        diag[k] = out[k].real() / m_;
    return diag;
}

CMatrix SpectralTransform::covariance(const RVector &spectrum) const
{
    if (spectrum.size() != m_)
        throw std::invalid_argument("SpectralTransform::covariance: spectrum length mismatch");
    std::vector<cdouble> in(static_cast<std::size_t>(m_));
    for (int i = 0; i < m_; ++i)
        in[i] = cdouble(spectrum[i], 0.0);
    std::vector<cdouble> col;
    fft_inverse(col, in); // first column: (1/m) sum_k c_k exp(j 2 pi k i / m)

    if (structure_ == CovarianceStructure::Toeplitz)
    {
        CVector first(n_);
        for (int i = 0; i < n_; ++i)
            first[i] = col[i];
        return hermitian_toeplitz(first);
    }

    CMatrix c(n_, n_);
    for (int j = 0; j < n_; ++j)
        for (int i = 0; i < n_; ++i)
            c(i, j) = col[(i - j + n_) % n_];
    for (int i = 0; i < n_; ++i)
        c(i, i) = cdouble(col[0].real(), 0.0);
    return c;
}

CMatrix SpectralTransform::dense() const
{
    CMatrix q(m_, n_);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m_));
    for (int i = 0; i < n_; ++i)
        for (int k = 0; k < m_; ++k)
            q(k, i) = std::polar(scale, -2.0 * kPi * k * i / m_);
    return q;
}

SpectralTransform structure_matrix(CovarianceStructure structure, int n_antennas)
{
    return SpectralTransform(structure, n_antennas);
}

} // namespace qcest
