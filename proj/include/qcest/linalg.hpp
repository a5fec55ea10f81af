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

#ifndef QCEST_LINALG_HPP
#define QCEST_LINALG_HPP

#include "qcest/types.hpp"

#include <Eigen/Cholesky>

namespace qcest
{

/// Cholesky factorization of a Hermitian positive (semi-)definite matrix.
/// If the plain factorization fails, a diagonal loading proportional to the
/// mean diagonal is added and escalated until it succeeds.
class LoadedCholesky
{
  public:
    explicit LoadedCholesky(const CMatrix &matrix);

    const Eigen::LLT<CMatrix> &llt() const { return llt_; }
    /// Absolute loading added to the diagonal (0 when none was needed).
    double loading() const { return loading_; }
    double log_det() const { return log_det_; }
    Eigen::Index size() const { return llt_.rows(); }

    /// x^H M^{-1} x
    double quadratic_form(const CVector &x) const;

    CMatrix solve(const CMatrix &rhs) const { return llt_.solve(rhs); }

  private:
    Eigen::LLT<CMatrix> llt_;
    double loading_ = 0.0;
    double log_det_ = 0.0;
};

/// Returns (M + M^H) / 2.
CMatrix hermitian_part(const CMatrix &m);

/// Matrix square root of a Hermitian PSD matrix. Eigenvalues below zero,
/// e.g. from integration noise, are clamped to zero first.
CMatrix psd_sqrt(const CMatrix &m);

/// Hermitian Toeplitz matrix whose first column is `column`.
CMatrix hermitian_toeplitz(const CVector &column);

} // namespace qcest

#endif
