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

#include "qcest/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace qcest
{

LoadedCholesky::LoadedCholesky(const CMatrix &matrix)
{
    if (matrix.rows() != matrix.cols() || matrix.rows() == 0)
        throw std::invalid_argument("LoadedCholesky: matrix must be square and non-empty");

    const double scale = std::max(matrix.diagonal().real().cwiseAbs().mean(), 1e-300);
    double loading = 0.0;
    for (int attempt = 0; attempt < 16; ++attempt)
    {
        if (loading == 0.0)
            llt_.compute(matrix);
        else
            llt_.compute(matrix + CMatrix::Identity(matrix.rows(), matrix.cols()) * loading);

        if (llt_.info() == Eigen::Success)
        {
            const auto diag = llt_.matrixLLT().diagonal().real();
            if ((diag.array() > 0.0).all() && diag.allFinite())
            {
                loading_ = loading;
                log_det_ = 2.0 * diag.array().log().sum();
                return;
            }
        }
        loading = loading == 0.0 ? 1e-12 * scale : loading * 10.0;
    }
    throw std::runtime_error("LoadedCholesky: factorization failed after loading escalation");
}

double LoadedCholesky::quadratic_form(const CVector &x) const
{
    const CVector z = llt_.matrixL().solve(x);
    return z.squaredNorm();
}

CMatrix hermitian_part(const CMatrix &m)
{
    return 0.5 * (m + m.adjoint());
}

CMatrix psd_sqrt(const CMatrix &m)
{
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(m));
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("psd_sqrt: eigendecomposition failed");
    const RVector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().adjoint();
}

CMatrix hermitian_toeplitz(const CVector &column)
{
    const Eigen::Index n = column.size();
    CMatrix t(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i)
            t(i, j) = i >= j ? column[i - j] : std::conj(column[j - i]);
    // diagonal is real for a Hermitian matrix
    for (Eigen::Index i = 0; i < n; ++i)
        t(i, i) = cdouble(column[0].real(), 0.0);
    return t;
}

} // namespace qcest
