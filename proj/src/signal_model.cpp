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

#include "qcest/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qcest
{

CVector make_pilots(int n_pilots)
{
    if (n_pilots < 1)
        throw std::invalid_argument("make_pilots: need at least one pilot");
    if (n_pilots == 1)
        return CVector::Constant(1, cdouble(1.0, 0.0));

    const int p = n_pilots;
    CVector a(p);
    for (int i = 0; i < p; ++i)
    {
        const double beta = 0.5 + static_cast<double>(i) / (2.0 * (p - 1));
        a[i] = std::polar(beta, kPi * i / (2.0 * p));
    }
    a *= std::sqrt(p / a.squaredNorm());
    return a;
}

PilotSystem::PilotSystem(CVector pilots, int n_antennas, double noise_var)
    : pilots_(std::move(pilots)), n_antennas_(n_antennas), noise_var_(noise_var)
{
    if (pilots_.size() < 1)
        throw std::invalid_argument("PilotSystem: empty pilot vector");
    if (n_antennas_ < 1)
        throw std::invalid_argument("PilotSystem: need at least one antenna");
    if (!(noise_var_ > 0.0) || !std::isfinite(noise_var_))
        throw std::invalid_argument("PilotSystem: noise variance must be positive and finite");
    pilot_energy_ = pilots_.squaredNorm();
    if (!(pilot_energy_ > 0.0))
        throw std::invalid_argument("PilotSystem: zero pilot vector");
}

PilotSystem PilotSystem::designed(int n_antennas, int n_pilots, double noise_var)
{
    return PilotSystem(make_pilots(n_pilots), n_antennas, noise_var);
}

PilotSystem PilotSystem::with_noise_var(double noise_var) const
{
    return PilotSystem(pilots_, n_antennas_, noise_var);
}

CVector PilotSystem::forward(const CVector &h) const
{
    if (h.size() != n_antennas_)
        throw std::invalid_argument("PilotSystem::forward: channel dimension mismatch");
    CVector y(observation_size());
    for (int p = 0; p < n_pilots(); ++p)
        y.segment(Eigen::Index(p) * n_antennas_, n_antennas_) = pilots_[p] * h;
    return y;
}

CVector PilotSystem::adjoint(const CVector &y) const
{
    if (y.size() != observation_size())
        throw std::invalid_argument("PilotSystem::adjoint: observation dimension mismatch");
    CVector h = CVector::Zero(n_antennas_);
    for (int p = 0; p < n_pilots(); ++p)
        h += std::conj(pilots_[p]) * y.segment(Eigen::Index(p) * n_antennas_, n_antennas_);
    return h;
}

CMatrix PilotSystem::observation_covariance(const CMatrix &channel_cov) const
{
    if (channel_cov.rows() != n_antennas_ || channel_cov.cols() != n_antennas_)
        throw std::invalid_argument("PilotSystem::observation_covariance: dimension mismatch");
    const Eigen::Index n = n_antennas_;
    CMatrix c(observation_size(), observation_size());
    for (int q = 0; q < n_pilots(); ++q)
        for (int p = 0; p < n_pilots(); ++p)
            c.block(p * n, q * n, n, n) = (pilots_[p] * std::conj(pilots_[q])) * channel_cov;
    c.diagonal().array() += noise_var_;
    return c;
}

CMatrix PilotSystem::dense_operator() const
{
    const Eigen::Index n = n_antennas_;
    CMatrix a = CMatrix::Zero(observation_size(), n);
    for (int p = 0; p < n_pilots(); ++p)
        a.block(p * n, 0, n, n).diagonal().setConstant(pilots_[p]);
    return a;
}

CVector apply_forward(const PilotSystem &system, const CVector &h)
{
    return system.forward(h);
}

CVector quantize_one_bit(const CVector &y)
{
    const double s = 1.0 / std::sqrt(2.0);
    CVector r(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i)
        r[i] = cdouble(y[i].real() >= 0.0 ? s : -s, y[i].imag() >= 0.0 ? s : -s);
    return r;
}

QuantizedObservation observe(const PilotSystem &system, const CVector &h, Rng &rng)
{
    return observe_with_noise(system, h, standard_complex_normal(rng, system.observation_size()));
}

QuantizedObservation observe_with_noise(const PilotSystem &system, const CVector &h, const CVector &unit_noise)
{
    if (unit_noise.size() != system.observation_size())
        throw std::invalid_argument("observe: noise dimension mismatch");
    return QuantizedObservation{quantize_one_bit(system.forward(h) + system.noise_std() * unit_noise)};
}

CMatrix quantized_covariance(const CMatrix &cov_y)
{
    if (cov_y.rows() != cov_y.cols())
        throw std::invalid_argument("quantized_covariance: matrix must be square");
    const Eigen::Index n = cov_y.rows();
    RVector inv_std(n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        const double d = cov_y(i, i).real();
        if (!(d > 0.0))
            throw std::invalid_argument("quantized_covariance: nonpositive diagonal entry");
        inv_std[i] = 1.0 / std::sqrt(d);
    }

    const double scale = 2.0 / kPi;
    CMatrix c(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
    {
        for (Eigen::Index i = 0; i < j; ++i)
        {
            const cdouble rho = cov_y(i, j) * (inv_std[i] * inv_std[j]);
            const double re = std::asin(std::clamp(rho.real(), -1.0, 1.0));
            const double im = std::asin(std::clamp(rho.imag(), -1.0, 1.0));
            c(i, j) = scale * cdouble(re, im);
            c(j, i) = std::conj(c(i, j));
        }
        c(j, j) = cdouble(1.0, 0.0);
    }
    return c;
}

} // namespace qcest
