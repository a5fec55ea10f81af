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

#ifndef QCEST_SIGNAL_MODEL_HPP
#define QCEST_SIGNAL_MODEL_HPP

#include "qcest/random.hpp"
#include "qcest/types.hpp"

namespace qcest
{

/// Pilot vector with amplitudes 1/2 .. 1 and phases pi (i-1) / (2P),
/// normalized to ||a||^2 = P. For P = 1 the pilot is [1].
CVector make_pilots(int n_pilots);

/// Measurement setup of one user: pilot vector a, N receive antennas and the
/// complex noise variance sigma^2 (sigma^2 / 2 per real dimension).
///
/// The measurement operator is A = a (x) I_N acting on the column-wise
/// vectorized receive matrix, so block p of A h is a_p h. A is never formed
/// explicitly except by dense_operator(), which exists for cross-checks.
class PilotSystem
{
  public:
    PilotSystem(CVector pilots, int n_antennas, double noise_var);

    /// System with the designed pilot sequence of length n_pilots.
    static PilotSystem designed(int n_antennas, int n_pilots, double noise_var);

    const CVector &pilots() const { return pilots_; }
    int n_antennas() const { return n_antennas_; }
    int n_pilots() const { return static_cast<int>(pilots_.size()); }
    double noise_var() const { return noise_var_; }
    double noise_std() const { return std::sqrt(noise_var_); }
    /// ||a||^2, so that A^H A = pilot_energy() I.
    double pilot_energy() const { return pilot_energy_; }
    Eigen::Index observation_size() const { return Eigen::Index(n_antennas_) * n_pilots(); }

    PilotSystem with_noise_var(double noise_var) const;

    /// A h
    CVector forward(const CVector &h) const;
    /// A^H y
    CVector adjoint(const CVector &y) const;
    /// A C A^H + sigma^2 I = (a a^H) (x) C + sigma^2 I
    CMatrix observation_covariance(const CMatrix &channel_cov) const;
    CMatrix dense_operator() const;

  private:
    CVector pilots_;
    int n_antennas_;
    double noise_var_;
    double pilot_energy_;
};

/// A one-bit observation r; every entry is (+-1 +-j) / sqrt(2).
struct QuantizedObservation
{
    CVector r;

    Eigen::Index size() const { return r.size(); }
};

/// Block-wise A h.
CVector apply_forward(const PilotSystem &system, const CVector &h);

/// (sign(Re y) + j sign(Im y)) / sqrt(2), with sign(0) = +1.
CVector quantize_one_bit(const CVector &y);

/// r = Q(A h + n) with n ~ CN(0, sigma^2 I) drawn from rng.
QuantizedObservation observe(const PilotSystem &system, const CVector &h, Rng &rng);

/// Same as observe() but with caller-supplied unit-variance noise w, so the
/// noise realization can be shared across noise levels: n = sigma w.
QuantizedObservation observe_with_noise(const PilotSystem &system, const CVector &h, const CVector &unit_noise);

/// Arcsine law: covariance of Q(y) for y ~ CN(0, C_y),
/// (2/pi) (asin(Re R) + j asin(Im R)), R = D^{-1/2} C_y D^{-1/2}, D = diag(C_y).
CMatrix quantized_covariance(const CMatrix &cov_y);

} // namespace qcest

#endif
