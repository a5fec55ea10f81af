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

#ifndef QCEST_CHANNEL_MODEL_HPP
#define QCEST_CHANNEL_MODEL_HPP

#include "qcest/random.hpp"
#include "qcest/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace qcest
{

inline constexpr double kDefaultAngleSpread = 2.0 * kPi / 180.0;
inline constexpr int kDefaultIntegrationGrid = 3600;
inline constexpr int kMinIntegrationGrid = 360;

/// Random propagation parameters of one user: the Laplacian cluster centers,
/// their powers and the common per-cluster angular standard deviation.
struct ClusterParams
{
    std::vector<double> angles; // radians, in [-pi/2, pi/2]
    std::vector<double> gains;  // nonnegative, sum to one
    double angle_spread = kDefaultAngleSpread;

    /// Throws std::invalid_argument if an invariant is violated.
    void validate() const;
};

/// Spatial covariance of a ULA channel. Always Hermitian Toeplitz with unit
/// diagonal, so the trace equals the antenna count.
struct SpatialCovariance
{
    CMatrix matrix;

    Eigen::Index n_antennas() const { return matrix.rows(); }
};

struct ChannelModelConfig
{
    int n_antennas = 16;
    int n_clusters = 1;
    double angle_spread = kDefaultAngleSpread;
    int integration_grid = kDefaultIntegrationGrid;
};

/// Channel samples (one row per channel) plus optional per-sample genie
/// information used by the genie baselines.
struct ChannelDataset
{
    CMatrix samples; // T x N
    std::vector<ClusterParams> cluster_params;
    std::vector<CMatrix> covariances;
    std::uint64_t seed = 0;
    int n_clusters = 1;

    Eigen::Index size() const { return samples.rows(); }
    Eigen::Index n_antennas() const { return samples.cols(); }
    bool has_genie() const { return !covariances.empty(); }

    CVector channel(Eigen::Index t) const { return samples.row(t).transpose(); }

    /// True covariance of sample t; throws std::logic_error when the dataset
    /// was generated without genie information.
    const CMatrix &genie_covariance(Eigen::Index t) const;
};

/// t(angle) with entries exp(j pi m sin(angle)), m = 0..N-1.
CVector steering_vector(double angle, int n_antennas);

ClusterParams sample_cluster_params(Rng &rng, int n_clusters, double angle_spread);

/// Integrates omega(gamma) t(gamma) t(gamma)^H over [-pi, pi], where omega
/// is the gain-weighted sum of Laplace densities centered at the cluster
/// angles. The integral runs over a uniform grid of `integration_grid`
/// cells; each cell uses 3-point Gauss-Legendre and cells containing a
/// density kink are split at the kink. Weights are renormalized on the grid
/// so that the result has unit diagonal.
SpatialCovariance build_covariance(const ClusterParams &params, int n_antennas,
                                   int integration_grid = kDefaultIntegrationGrid);

/// Draws h_t = C_t^{1/2} w_t with per-sample parameters. Sample t uses the
/// stream derived from (seed, t), so the result does not depend on the
/// number of worker threads.
ChannelDataset generate_dataset(std::uint64_t seed, int n_samples, const ChannelModelConfig &config,
                                bool keep_genie);

/// (1/T) sum_t h_t h_t^H
CMatrix sample_covariance(const CMatrix &samples);

} // namespace qcest

#endif
