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

#include "qcest/baselines.hpp"

#include "qcest/linalg.hpp"
#include "qcest/parallel.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

namespace qcest
{

std::string to_string(BaselineKind kind)
{
    switch (kind)
    {
    case BaselineKind::GenieEM:
        return "genie-em";
    case BaselineKind::GlobalEM:
        return "global-em";
    case BaselineKind::GenieBLMMSE:
        return "genie-blmmse";
    case BaselineKind::GlobalBLMMSE:
        return "global-blmmse";
    case BaselineKind::GmmBLMMSE:
        return "gmm-blmmse";
    }
    return "unknown";
}

EstimationResult genie_em(const PilotSystem &system, const QuantizedObservation &obs,
                          const SpatialCovariance &genie_cov, const EmConfig &config)
{
    if (genie_cov.matrix.size() == 0)
        throw std::invalid_argument("genie_em: missing genie covariance");
    return estimate(system, obs, genie_cov.matrix, config);
}

EstimationResult global_em(const PilotSystem &system, const QuantizedObservation &obs, const CMatrix &sample_cov,
                           const EmConfig &config)
{
    return estimate(system, obs, sample_cov, config);
}

BussgangFilter::BussgangFilter(const CMatrix &cov, const PilotSystem &system)
{
    const Eigen::Index n = system.n_antennas();
    if (cov.rows() != n || cov.cols() != n)
        throw std::invalid_argument("BussgangFilter: covariance dimension mismatch");
    const CMatrix cov_y = system.observation_covariance(cov);
    const CMatrix cov_r = quantized_covariance(cov_y);

    const double gain = std::sqrt(2.0 / kPi);
    CMatrix cross(n, system.observation_size()); // C A^H D
    for (int p = 0; p < system.n_pilots(); ++p)
        cross.middleCols(p * n, n) = std::conj(system.pilots()[p]) * cov;
    for (Eigen::Index i = 0; i < cross.cols(); ++i)
        cross.col(i) *= gain / std::sqrt(cov_y(i, i).real());

    const LoadedCholesky factor(cov_r);
    filter_ = factor.solve(cross.adjoint()).adjoint();
}

CVector blmmse(const PilotSystem &system, const QuantizedObservation &obs, const CMatrix &cov)
{
    if (obs.size() != system.observation_size())
        throw std::invalid_argument("blmmse: observation dimension mismatch");
    return BussgangFilter(cov, system).apply(obs.r);
}

GmmBussgangEstimator::GmmBussgangEstimator(const GmmPrior &prior, const PilotSystem &system)
    : prior_(prior), stats_(prior, system)
{
    std::vector<std::optional<BussgangFilter>> tmp(static_cast<std::size_t>(prior.n_components()));
    parallel_for(tmp.size(), [&](std::size_t k) { tmp[k].emplace(prior.covariance(static_cast<int>(k)), system); });
    filters_.reserve(tmp.size());
    for (auto &f : tmp)
        filters_.push_back(std::move(*f));
}

CVector GmmBussgangEstimator::combine(const RVector &resp, const QuantizedObservation &obs, bool map_only) const
{
    if (resp.size() != static_cast<Eigen::Index>(filters_.size()))
        throw std::invalid_argument("gmm_blmmse: responsibility length mismatch");
    if (map_only)
        return filters_[static_cast<std::size_t>(map_component(resp))].apply(obs.r);
    CVector h = CVector::Zero(prior_.n_antennas());
    for (int k = 0; k < resp.size(); ++k)
        if (resp[k] > 0.0)
            h += resp[k] * filters_[static_cast<std::size_t>(k)].apply(obs.r);
    return h;
}

CVector GmmBussgangEstimator::estimate(const QuantizedObservation &obs, bool map_only) const
{
    return combine(responsibilities(prior_, stats_, obs), obs, map_only);
}

CVector gmm_blmmse(const GmmPrior &prior, const QuantizedComponentStats &stats, const PilotSystem &system,
                   const QuantizedObservation &obs, bool map_only)
{
    if (!stats.matches(prior, system))
        throw std::invalid_argument("gmm_blmmse: statistics do not match prior and pilot system");
    const RVector resp = responsibilities(prior, stats, obs);
    if (map_only)
        return BussgangFilter(prior.covariance(map_component(resp)), system).apply(obs.r);
    CVector h = CVector::Zero(prior.n_antennas());
    for (int k = 0; k < resp.size(); ++k)
        if (resp[k] > 0.0)
            h += resp[k] * BussgangFilter(prior.covariance(k), system).apply(obs.r);
    return h;
}

} // namespace qcest
