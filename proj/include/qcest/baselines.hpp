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

#ifndef QCEST_BASELINES_HPP
#define QCEST_BASELINES_HPP

#include "qcest/channel_model.hpp"
#include "qcest/em_estimator.hpp"
#include "qcest/gmm_prior.hpp"
#include "qcest/signal_model.hpp"

#include <string>
#include <vector>

namespace qcest
{

enum class BaselineKind
{
    GenieEM,
    GlobalEM,
    GenieBLMMSE,
    GlobalBLMMSE,
    GmmBLMMSE,
};

std::string to_string(BaselineKind kind);

/// EM with the true covariance of the observed channel.
EstimationResult genie_em(const PilotSystem &system, const QuantizedObservation &obs,
                          const SpatialCovariance &genie_cov, const EmConfig &config);

/// EM with the training-set sample covariance as Gaussian prior.
EstimationResult global_em(const PilotSystem &system, const QuantizedObservation &obs, const CMatrix &sample_cov,
                           const EmConfig &config);

/// Bussgang linear MMSE filter for h ~ CN(0, C):
///   h_hat = C_hr C_r^{-1} r,  C_hr = C A^H D,  D = sqrt(2/pi) diag(C_y)^{-1/2},
/// with C_y = A C A^H + sigma^2 I and C_r from the arcsine law.
class BussgangFilter
{
  public:
    BussgangFilter(const CMatrix &cov, const PilotSystem &system);

    CVector apply(const CVector &r) const { return filter_ * r; }
    const CMatrix &matrix() const { return filter_; }

  private:
    CMatrix filter_; // N x NP
};

CVector blmmse(const PilotSystem &system, const QuantizedObservation &obs, const CMatrix &cov);

/// Conditional Bussgang estimator over a GMM prior: sum_k p(k|r) W_k r, or
/// W_{k*} r with map_only.
class GmmBussgangEstimator
{
  public:
    GmmBussgangEstimator(const GmmPrior &prior, const PilotSystem &system);

    CVector estimate(const QuantizedObservation &obs, bool map_only = false) const;
    CVector combine(const RVector &resp, const QuantizedObservation &obs, bool map_only = false) const;
    const QuantizedComponentStats &stats() const { return stats_; }

  private:
    GmmPrior prior_;
    QuantizedComponentStats stats_;
    std::vector<BussgangFilter> filters_;
};

CVector gmm_blmmse(const GmmPrior &prior, const QuantizedComponentStats &stats, const PilotSystem &system,
                   const QuantizedObservation &obs, bool map_only = false);

} // namespace qcest

#endif
