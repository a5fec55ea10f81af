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

#include "qcest/channel_model.hpp"

#include "qcest/linalg.hpp"
#include "qcest/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qcest
{

namespace
{

// Gauss-Legendre nodes and weights on [-1, 1].
constexpr std::array<double, 3> kGlNodes = {-0.7745966692414833770359, 0.0, 0.7745966692414833770359};
constexpr std::array<double, 3> kGlWeights = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

// Beyond this many Laplace scales the density is below exp(-45) ~ 3e-20 of
// its peak and the cell is skipped.
constexpr double kTailCutoff = 45.0;

struct Accumulator
{
    const ClusterParams &params;
    double scale; // Laplace scale b = spread / sqrt(2)
    std::vector<cdouble> moments;
    double mass = 0.0;

    double density(double gamma) const
    {
        double w = 0.0;
        for (std::size_t c = 0; c < params.angles.size(); ++c)
            w += params.gains[c] * std::exp(-std::abs(gamma - params.angles[c]) / scale);
        return w / (2.0 * scale);
    }

    void add_interval(double lo, double hi)
    {
        const double half = 0.5 * (hi - lo);
        const double mid = 0.5 * (hi + lo);
        for (std::size_t q = 0; q < kGlNodes.size(); ++q)
        {
            const double gamma = mid + half * kGlNodes[q];
            const double w = kGlWeights[q] * half * density(gamma);
            if (w == 0.0)
                continue;
            mass += w;
            const cdouble step = std::polar(1.0, kPi * std::sin(gamma));
            cdouble z(w, 0.0);
            for (auto &m : moments)
            {
                m += z;
                z *= step;
            }
        }
    }
};

} // namespace

void ClusterParams::validate() const
{
    if (angles.empty())
        throw std::invalid_argument("ClusterParams: no clusters");
    if (angles.size() != gains.size())
        throw std::invalid_argument("ClusterParams: angles and gains differ in length");
    if (!(angle_spread > 0.0))
        throw std::invalid_argument("ClusterParams: angle spread must be positive");
    double total = 0.0;
    for (std::size_t c = 0; c < angles.size(); ++c)
    {
        if (gains[c] < 0.0)
            throw std::invalid_argument("ClusterParams: negative gain");
        if (std::abs(angles[c]) > kPi / 2.0)
            throw std::invalid_argument("ClusterParams: angle outside [-pi/2, pi/2]");
        total += gains[c];
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("ClusterParams: gains do not sum to one");
}

const CMatrix &ChannelDataset::genie_covariance(Eigen::Index t) const
{
    if (!has_genie())
        throw std::logic_error("dataset carries no genie covariances");
    return covariances.at(static_cast<std::size_t>(t));
}

CVector steering_vector(double angle, int n_antennas)
{
    if (n_antennas < 1)
        throw std::invalid_argument("steering_vector: need at least one antenna");
    CVector t(n_antennas);
    const double phase = kPi * std::sin(angle);
    for (int m = 0; m < n_antennas; ++m)
        t[m] = std::polar(1.0, phase * m);
    return t;
}

ClusterParams sample_cluster_params(Rng &rng, int n_clusters, double angle_spread)
{
    if (n_clusters < 1)
        throw std::invalid_argument("sample_cluster_params: need at least one cluster");
    std::uniform_real_distribution<double> angle(-kPi / 2.0, kPi / 2.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    ClusterParams p;
    p.angle_spread = angle_spread;
    p.angles.resize(n_clusters);
    p.gains.resize(n_clusters);
    for (int c = 0; c < n_clusters; ++c)
        p.angles[c] = angle(rng);
    for (int c = 0; c < n_clusters; ++c)
        p.gains[c] = 1.0 - unit(rng); // (0, 1]
    const double total = std::accumulate(p.gains.begin(), p.gains.end(), 0.0);
    for (auto &g : p.gains)
        g /= total;
    return p;
}

SpatialCovariance build_covariance(const ClusterParams &params, int n_antennas, int integration_grid)
{
    if (integration_grid < kMinIntegrationGrid)
        throw std::invalid_argument("build_covariance: integration grid below minimum");
    if (n_antennas < 1)
        throw std::invalid_argument("build_covariance: need at least one antenna");
    params.validate();

    Accumulator acc{params, params.angle_spread / std::sqrt(2.0),
                    std::vector<cdouble>(static_cast<std::size_t>(n_antennas), cdouble(0.0, 0.0))};

    std::vector<double> kinks = params.angles;
    std::sort(kinks.begin(), kinks.end());

    const double width = 2.0 * kPi / integration_grid;
    const double reach = kTailCutoff * acc.scale;
    for (int g = 0; g < integration_grid; ++g)
    {
        const double lo = -kPi + g * width;
        const double hi = lo + width;

        bool relevant = false;
        for (double a : params.angles)
            relevant = relevant || (hi > a - reach && lo < a + reach);
        if (!relevant)
            continue;

        double start = lo;
        for (double k : kinks)
        {
            if (k > start && k < hi)
            {
                acc.add_interval(start, k);
                start = k;
            }
        }
        acc.add_interval(start, hi);
    }

    if (!(acc.mass > 0.0))
        throw std::runtime_error("build_covariance: angular density vanished on the grid");

    CVector column(n_antennas);
    for (int d = 0; d < n_antennas; ++d)
        column[d] = acc.moments[static_cast<std::size_t>(d)] / acc.mass;
    column[0] = cdouble(1.0, 0.0);
    return SpatialCovariance{hermitian_toeplitz(column)};
}

ChannelDataset generate_dataset(std::uint64_t seed, int n_samples, const ChannelModelConfig &config,
                                bool keep_genie)
{
    if (n_samples < 1)
        throw std::invalid_argument("generate_dataset: need at least one sample");
    if (config.n_antennas < 1 || config.n_clusters < 1)
        throw std::invalid_argument("generate_dataset: invalid dimensions");

    ChannelDataset data;
    data.seed = seed;
    data.n_clusters = config.n_clusters;
    data.samples.resize(n_samples, config.n_antennas);
    if (keep_genie)
    {
        data.cluster_params.resize(static_cast<std::size_t>(n_samples));
        data.covariances.resize(static_cast<std::size_t>(n_samples));
    }

    parallel_for(static_cast<std::size_t>(n_samples), [&](std::size_t t) {
        Rng rng = make_stream(seed, {t});
        ClusterParams params = sample_cluster_params(rng, config.n_clusters, config.angle_spread);
        SpatialCovariance cov = build_covariance(params, config.n_antennas, config.integration_grid);
        const CVector w = standard_complex_normal(rng, config.n_antennas);
        data.samples.row(static_cast<Eigen::Index>(t)) = (psd_sqrt(cov.matrix) * w).transpose();
        if (keep_genie)
        {
            data.cluster_params[t] = std::move(params);
            data.covariances[t] = std::move(cov.matrix);
        }
    });
    return data;
}

CMatrix sample_covariance(const CMatrix &samples)
{
    if (samples.rows() == 0)
        throw std::invalid_argument("sample_covariance: empty sample set");
    // rows are h_t^T, so H^T conj(H) = sum_t h_t h_t^H
    CMatrix c = samples.transpose() * samples.conjugate();
    c /= static_cast<double>(samples.rows());
    return hermitian_part(c);
}

} // namespace qcest
