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

#ifndef QCEST_SPECTRAL_HPP
#define QCEST_SPECTRAL_HPP

#include "qcest/types.hpp"

#include <string>
#include <string_view>

namespace qcest
{

enum class CovarianceStructure
{
    Full,
    Toeplitz,
    Circulant,
};

std::string to_string(CovarianceStructure s);
CovarianceStructure parse_structure(std::string_view name);

/// Semi-unitary DFT factor Q of a structured covariance C = Q^H diag(c) Q.
///
/// Circulant: Q is the N x N unitary DFT matrix.
/// Toeplitz:  Q holds the first N columns of the 2N x 2N unitary DFT matrix
///            (circulant embedding), so Q^H Q = I_N and c has length 2N.
///
/// Products with Q and Q^H run through FFTs.
class SpectralTransform
{
  public:
    SpectralTransform(CovarianceStructure structure, int n_antennas);

    CovarianceStructure structure() const { return structure_; }
    int n_antennas() const { return n_; }
    int spectrum_size() const { return m_; }

    /// Q h
    CVector forward(const CVector &h) const;
    /// Q^H x
    CVector adjoint(const CVector &x) const;
    /// |Q h|^2 entrywise
    RVector periodogram(const CVector &h) const;

    /// diag(Q S Q^H) for an N x N matrix S. Nonnegative for PSD S; for
    /// circulant Q this is the least-squares projection of S onto the
    /// circulant matrices.
    RVector spectral_diagonal(const CMatrix &s) const;

    /// Dense Q^H diag(c) Q, exactly Toeplitz or circulant.
    CMatrix covariance(const RVector &spectrum) const;

    /// Dense Q, for cross-checks.
    CMatrix dense() const;

  private:
    CovarianceStructure structure_;
    int n_;
    int m_;
};

/// Throws std::invalid_argument for CovarianceStructure::Full.
SpectralTransform structure_matrix(CovarianceStructure structure, int n_antennas);

} // namespace qcest

#endif
