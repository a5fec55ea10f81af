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

#ifndef QCEST_EM_ESTIMATOR_HPP
#define QCEST_EM_ESTIMATOR_HPP

#include "qcest/gmm_prior.hpp"
#include "qcest/linalg.hpp"
#include "qcest/signal_model.hpp"
#include "qcest/spectral.hpp"
#include "qcest/types.hpp"

#include <optional>
#include <vector>

namespace qcest
{

struct EmConfig
{
    /// Maximum number of E/M iterations.
    int max_iters = 1000;
    /// Stop once ||h_next - h|| <= rel_tol * ||h||.
    double rel_tol = 1e-3;
    /// Record the M-step objective after every iteration.
    bool record_objective = false;

    void validate() const;
};

struct EstimationResult
{
    CVector estimate;
    int iterations = 0;
    bool converged = false;
    /// Selected mixture component (GMM-EM only).
    std::optional<int> component;
    std::vector<double> objective_trace;
};

/// Least-squares initialization A^+ r = A^H r / ||a||^2.
CVector ls_init(const PilotSystem &system, const QuantizedObservation &obs);

/// E[y | r, h] for y = A h + n, n ~ CN(0, sigma^2 I). Per real dimension
/// this is the mean of N(b, sigma^2/2) truncated to the half line selected
/// by the sign of r, evaluated through the inverse Mills ratio.
CVector e_step(const PilotSystem &system, const QuantizedObservation &obs, const CVector &h);

/// Cached M-step map y_hat -> argmin_h ||A h - y_hat||^2 + sigma^2 h^H C^{-1} h
///                           = (||a||^2 I + sigma^2 C^{-1})^{-1} A^H y_hat.
///
/// The dense form stores C (||a||^2 C + sigma^2 I)^{-1}, which stays defined
/// for singular C. Circulant priors keep only the per-frequency gains
/// c_m / (||a||^2 c_m + sigma^2) and apply them through FFTs.
class MStepFilter
{
  public:
    MStepFilter(const CMatrix &prior_cov, const PilotSystem &system);
    MStepFilter(const SpectralTransform &transform, const RVector &spectrum, const PilotSystem &system);

    /// Filter applied to A^H y_hat.
    CVector apply(const CVector &matched) const;
    CVector operator()(const PilotSystem &system, const CVector &y_hat) const { return apply(system.adjoint(y_hat)); }

    /// ||A h - y_hat||^2 + sigma^2 h^H C^{-1} h
    double objective(const PilotSystem &system, const CVector &h, const CVector &y_hat) const;

    bool is_spectral() const { return transform_.has_value(); }

  private:
    double noise_var_;
    CMatrix dense_;
    std::optional<CMatrix> prior_cov_;
    std::optional<SpectralTransform> transform_;
    RVector gains_;
    RVector spectrum_;
};

/// One closed-form M-step with an uncached filter.
CVector m_step(const PilotSystem &system, const CMatrix &prior_cov, const CVector &y_hat);

/// EM iterations from the LS initialization until the relative-change
/// criterion or max_iters.
EstimationResult estimate(const PilotSystem &system, const QuantizedObservation &obs, const MStepFilter &filter,
                          const EmConfig &config);
EstimationResult estimate(const PilotSystem &system, const QuantizedObservation &obs, const CMatrix &prior_cov,
                          const EmConfig &config);

/// Filter for component k of a prior: spectral for circulant priors, dense
/// otherwise.
MStepFilter component_filter(const GmmPrior &prior, int k, const PilotSystem &system);

/// GMM-EM: selects the MAP component for r, then runs the EM iterations
/// with that component's covariance as Gaussian prior.
EstimationResult estimate_gmm(const GmmPrior &prior, const QuantizedComponentStats &stats, const PilotSystem &system,
                              const QuantizedObservation &obs, const EmConfig &config);

/// GMM-EM with the quantized statistics and all K M-step filters
/// precomputed for one pilot system. Immutable after construction.
class GmmEmEstimator
{
  public:
    GmmEmEstimator(GmmPrior prior, const PilotSystem &system);

    const GmmPrior &prior() const { return prior_; }
    const PilotSystem &system() const { return system_; }
    const QuantizedComponentStats &stats() const { return stats_; }
    const MStepFilter &filter(int k) const { return filters_.at(static_cast<std::size_t>(k)); }

    EstimationResult estimate(const QuantizedObservation &obs, const EmConfig &config) const;

  private:
    GmmPrior prior_;
    PilotSystem system_;
    QuantizedComponentStats stats_;
    std::vector<MStepFilter> filters_;
};

} // namespace qcest

#endif
