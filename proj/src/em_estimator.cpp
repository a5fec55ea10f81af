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

#include "qcest/em_estimator.hpp"

#include "qcest/normal.hpp"
#include "qcest/parallel.hpp"

#include <cmath>
#include <stdexcept>

namespace qcest
{

void EmConfig::validate() const
{
    if (max_iters < 0)
        throw std::invalid_argument("EmConfig: max_iters must be nonnegative");
    if (!(rel_tol > 0.0))
        throw std::invalid_argument("EmConfig: rel_tol must be positive");
}

CVector ls_init(const PilotSystem &system, const QuantizedObservation &obs)
{
    return system.adjoint(obs.r) / system.pilot_energy();
}

CVector e_step(const PilotSystem &system, const QuantizedObservation &obs, const CVector &h)
{
    if (obs.size() != system.observation_size())
        throw std::invalid_argument("e_step: observation dimension mismatch");
    const CVector b = system.forward(h);
    const double sd = system.noise_std() / std::sqrt(2.0); // per real dimension

    auto conditional_mean = [sd](double mean, double sign_part) {
        const double s = sign_part > 0.0 ? 1.0 : -1.0;
        return mean + s * sd * inverse_mills_ratio(s * mean / sd);
    };

    CVector y(b.size());
    for (Eigen::Index i = 0; i < b.size(); ++i)
        y[i] = cdouble(conditional_mean(b[i].real(), obs.r[i].real()), conditional_mean(b[i].imag(), obs.r[i].imag()));
    return y;
}

// ---------------------------------------------------------------------------
// MStepFilter

MStepFilter::MStepFilter(const CMatrix &prior_cov, const PilotSystem &system)
    : noise_var_(system.noise_var()), prior_cov_(prior_cov)
{
    const Eigen::Index n = system.n_antennas();
    if (prior_cov.rows() != n || prior_cov.cols() != n)
        throw std::invalid_argument("MStepFilter: prior covariance dimension mismatch");
    if (!prior_cov.allFinite())
        throw std::invalid_argument("MStepFilter: non-finite prior covariance");
    CMatrix m = system.pilot_energy() * hermitian_part(prior_cov);
    m.diagonal().array() += noise_var_;
    const Eigen::LLT<CMatrix> llt(m);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("MStepFilter: prior covariance is not positive semidefinite");
    dense_ = llt.solve(prior_cov);
}

MStepFilter::MStepFilter(const SpectralTransform &transform, const RVector &spectrum, const PilotSystem &system)
    : noise_var_(system.noise_var()), transform_(transform), spectrum_(spectrum)
{
    if (transform.structure() != CovarianceStructure::Circulant)
        throw std::invalid_argument("MStepFilter: spectral filters require a circulant prior");
    if (transform.n_antennas() != system.n_antennas() || spectrum.size() != transform.spectrum_size())
        throw std::invalid_argument("MStepFilter: spectrum dimension mismatch");
    gains_ = spectrum.array() / (system.pilot_energy() * spectrum.array() + noise_var_);
}

CVector MStepFilter::apply(const CVector &matched) const
{
    if (transform_)
    {
        CVector x = transform_->forward(matched);
        x.array() *= gains_.array();
        return transform_->adjoint(x);
    }
    return dense_ * matched;
}

double MStepFilter::objective(const PilotSystem &system, const CVector &h, const CVector &y_hat) const
{
    const double fit = (system.forward(h) - y_hat).squaredNorm();
    double penalty = 0.0;
    if (transform_)
        penalty = (transform_->periodogram(h).array() / spectrum_.array()).sum();
    else
        penalty = LoadedCholesky(*prior_cov_).quadratic_form(h);
    return fit + noise_var_ * penalty;
}

CVector m_step(const PilotSystem &system, const CMatrix &prior_cov, const CVector &y_hat)
{
    return MStepFilter(prior_cov, system)(system, y_hat);
}

// ---------------------------------------------------------------------------
// EM iterations

EstimationResult estimate(const PilotSystem &system, const QuantizedObservation &obs, const MStepFilter &filter,
                          const EmConfig &config)
{
    config.validate();
    EstimationResult result;
    result.estimate = ls_init(system, obs);
    const double zero_tol = config.rel_tol * std::sqrt(static_cast<double>(system.n_antennas())) * 1e-6;

    for (int iter = 0; iter < config.max_iters; ++iter)
    {
        const CVector y_hat = e_step(system, obs, result.estimate);
        CVector next = filter(system, y_hat);
        if (config.record_objective)
            result.objective_trace.push_back(filter.objective(system, next, y_hat));

        const double step = (next - result.estimate).norm();
        const double norm = result.estimate.norm();
        const bool done = norm > 0.0 ? step <= config.rel_tol * norm : next.norm() <= zero_tol;
        result.estimate = std::move(next);
        result.iterations = iter + 1;
        if (done)
        {
            result.converged = true;
            break;
        }
    }
    return result;
}

EstimationResult estimate(const PilotSystem &system, const QuantizedObservation &obs, const CMatrix &prior_cov,
                          const EmConfig &config)
{
    return estimate(system, obs, MStepFilter(prior_cov, system), config);
}

MStepFilter component_filter(const GmmPrior &prior, int k, const PilotSystem &system)
{
    if (prior.structure() == CovarianceStructure::Circulant)
        return MStepFilter(*prior.transform(), prior.spectrum(k), system);
    return MStepFilter(prior.covariance(k), system);
}

EstimationResult estimate_gmm(const GmmPrior &prior, const QuantizedComponentStats &stats, const PilotSystem &system,
                              const QuantizedObservation &obs, const EmConfig &config)
{
    if (!stats.matches(prior, system))
        throw std::invalid_argument("estimate_gmm: statistics do not match prior and pilot system");
    const int k = map_component(prior, stats, obs);
    EstimationResult result = estimate(system, obs, component_filter(prior, k, system), config);
    result.component = k;
    return result;
}

GmmEmEstimator::GmmEmEstimator(GmmPrior prior, const PilotSystem &system)
    : prior_(std::move(prior)), system_(system), stats_(prior_, system_)
{
    filters_.reserve(static_cast<std::size_t>(prior_.n_components()));
    for (int k = 0; k < prior_.n_components(); ++k)
        filters_.push_back(component_filter(prior_, k, system_));
}

EstimationResult GmmEmEstimator::estimate(const QuantizedObservation &obs, const EmConfig &config) const
{
    const int k = map_component(prior_, stats_, obs);
    EstimationResult result = qcest::estimate(system_, obs, filters_[static_cast<std::size_t>(k)], config);
    result.component = k;
    return result;
}

} // namespace qcest
