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

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace qcest;

namespace
{

ClusterParams one_cluster(double angle, double spread)
{
    return ClusterParams{{angle}, {1.0}, spread};
}

// Stratified inverse-CDF quadrature of E[exp(j pi d sin(g))] for g Laplace
// distributed around `center` with scale b, truncated to [-pi, pi].
cdouble laplace_moment(double center, double b, int lag, int points)
{
    auto cdf = [&](double x) {
        const double z = (x - center) / b;
        return z < 0.0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
    };
    auto quantile = [&](double u) {
        return u < 0.5 ? center + b * std::log(2.0 * u) : center - b * std::log(2.0 * (1.0 - u));
    };
    const double lo = cdf(-M_PI);
    const double hi = cdf(M_PI);
    cdouble sum(0.0, 0.0);
    for (int i = 0; i < points; ++i)
    {
        const double u = lo + (hi - lo) * (i + 0.5) / points;
        sum += std::polar(1.0, M_PI * lag * std::sin(quantile(u)));
    }
    return sum / static_cast<double>(points);
}

} // namespace

TEST_CASE("steering_vector")
{
    CHECK((steering_vector(0.0, 4) - CVector::Ones(4)).norm() == 0.0);

    const CVector t = steering_vector(M_PI / 2.0, 2);
    CHECK(std::abs(t[0] - cdouble(1.0, 0.0)) < 1e-15);
    CHECK(std::abs(t[1] - cdouble(-1.0, 0.0)) < 1e-15);

    const CVector u = steering_vector(0.3, 8);
    for (int m = 0; m < 8; ++m)
    {
        CHECK(std::abs(u[m]) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(std::abs(u[m] - std::polar(1.0, M_PI * m * std::sin(0.3))) < 1e-12);
    }
    CHECK_THROWS_AS(steering_vector(0.0, 0), std::invalid_argument);
}

TEST_CASE("sample_cluster_params")
{
    Rng rng = make_stream(11, {});
    const ClusterParams one = sample_cluster_params(rng, 1, 0.05);
    REQUIRE(one.angles.size() == 1);
    CHECK(one.gains[0] == 1.0);
    CHECK(std::abs(one.angles[0]) <= M_PI / 2.0);
    CHECK(one.angle_spread == 0.05);

    const ClusterParams three = sample_cluster_params(rng, 3, 0.05);
    REQUIRE(three.angles.size() == 3);
    double sum = 0.0;
    for (double g : three.gains)
    {
        CHECK(g >= 0.0);
        sum += g;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

    SUBCASE("angles pass a Kolmogorov-Smirnov uniformity test")
    {
        const int n = 100000;
        std::vector<double> u(n);
        for (int i = 0; i < n; ++i)
            u[static_cast<std::size_t>(i)] = (sample_cluster_params(rng, 1, 0.05).angles[0] + M_PI / 2.0) / M_PI;
        std::sort(u.begin(), u.end());
        double d = 0.0;
        for (int i = 0; i < n; ++i)
        {
            const double x = u[static_cast<std::size_t>(i)];
            d = std::max({d, (i + 1.0) / n - x, x - static_cast<double>(i) / n});
        }
        // asymptotic critical value at level 0.01
        CHECK(d < 1.6276 / std::sqrt(static_cast<double>(n)));
    }
}

TEST_CASE("build_covariance structural invariants")
{
    Rng rng = make_stream(12, {});
    for (int trial = 0; trial < 20; ++trial)
    {
        const int clusters = 1 + trial % 3;
        const ClusterParams p = sample_cluster_params(rng, clusters, 0.01 + 0.01 * trial);
        const int n = 8 + 4 * (trial % 3);
        const CMatrix c = build_covariance(p, n).matrix;

        CHECK(c.trace().real() == doctest::Approx(n).epsilon(1e-12));
        CHECK((c - c.adjoint()).norm() <= 1e-12 * c.norm());
        for (int i = 0; i < n; ++i)
            CHECK(std::abs(c(i, i) - 1.0) < 1e-8);
        for (int i = 1; i < n; ++i)
            for (int j = 1; j < n; ++j)
                CHECK(std::abs(c(i, j) - c(i - 1, j - 1)) < 1e-12);
        Eigen::SelfAdjointEigenSolver<CMatrix> es(c);
        CHECK(es.eigenvalues().minCoeff() >= -1e-10 * n);
    }
}

TEST_CASE("build_covariance rejects bad input")
{
    CHECK_THROWS_AS(build_covariance(one_cluster(0.0, 0.03), 8, kMinIntegrationGrid - 1), std::invalid_argument);
    CHECK_THROWS_AS(build_covariance(ClusterParams{{}, {}, 0.03}, 8), std::invalid_argument);
    CHECK_THROWS_AS(build_covariance(one_cluster(0.0, 0.0), 8), std::invalid_argument);
    CHECK_THROWS_AS(build_covariance(ClusterParams{{0.1, 0.2}, {0.5, 0.6}, 0.03}, 8), std::invalid_argument);
}

TEST_CASE("build_covariance tends to rank one as the spread vanishes")
{
    const int n = 16;
    const double theta = 0.4;
    const CMatrix c = build_covariance(one_cluster(theta, 1e-6), n).matrix;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(c);
    CHECK(es.eigenvalues()[n - 1] == doctest::Approx(n).epsilon(1e-4));
    const CVector t = steering_vector(theta, n);
    CHECK((c - t * t.adjoint()).norm() / n < 1e-3);
}

TEST_CASE("build_covariance matches an independent Laplace quadrature")
{
    for (double spread : {0.035, 0.17, 0.5})
        for (double center : {0.0, 0.9, -1.5})
        {
            const CMatrix c = build_covariance(one_cluster(center, spread), 8).matrix;
            for (int lag : {1, 3, 7})
            {
                const cdouble oracle = laplace_moment(center, spread / std::sqrt(2.0), lag, 1000000);
                CHECK(std::abs(c(lag, 0) - oracle) < 1e-4);
            }
        }
}

TEST_CASE("build_covariance grid convergence at the default grid")
{
    Rng rng = make_stream(13, {});
    for (int trial = 0; trial < 10; ++trial)
    {
        const ClusterParams p = sample_cluster_params(rng, 1 + trial % 3, kDefaultAngleSpread);
        const CMatrix a = build_covariance(p, 16, kDefaultIntegrationGrid).matrix;
        const CMatrix b = build_covariance(p, 16, 2 * kDefaultIntegrationGrid).matrix;
        CHECK((a - b).norm() / b.norm() < 1e-6);
    }
}

TEST_CASE("generate_dataset")
{
    ChannelModelConfig cfg;
    cfg.n_antennas = 16;

    SUBCASE("power normalization")
    {
        const ChannelDataset d = generate_dataset(21, 1000, cfg, true);
        const double mean_power = d.samples.rowwise().squaredNorm().mean();
        CHECK(mean_power >= 15.5);
        CHECK(mean_power <= 16.5);
        CHECK(d.has_genie());
        CHECK(d.cluster_params.size() == 1000);
        CHECK(d.genie_covariance(3).rows() == 16);
    }
    SUBCASE("no genie metadata unless requested")
    {
        cfg.n_clusters = 3;
        const ChannelDataset d = generate_dataset(21, 1, cfg, false);
        CHECK(!d.has_genie());
        CHECK(d.cluster_params.empty());
        CHECK_THROWS_AS(d.genie_covariance(0), std::logic_error);
    }
    SUBCASE("bit reproducible")
    {
        const ChannelDataset a = generate_dataset(5, 200, cfg, true);
        const ChannelDataset b = generate_dataset(5, 200, cfg, true);
        CHECK(a.samples == b.samples);
        CHECK(a.covariances[17] == b.covariances[17]);
        const ChannelDataset c = generate_dataset(6, 200, cfg, false);
        CHECK(a.samples != c.samples);
    }
    SUBCASE("genie covariance belongs to the drawn cluster parameters")
    {
        const ChannelDataset d = generate_dataset(8, 5, cfg, true);
        for (int t = 0; t < 5; ++t)
            CHECK(d.covariances[static_cast<std::size_t>(t)] ==
                  build_covariance(d.cluster_params[static_cast<std::size_t>(t)], 16, cfg.integration_grid).matrix);
    }
    CHECK_THROWS_AS(generate_dataset(1, 0, cfg, false), std::invalid_argument);
}

TEST_CASE("draws from fixed cluster parameters reproduce the covariance")
{
    const ClusterParams p{{0.3, -0.7}, {0.6, 0.4}, 0.05};
    const CMatrix c = build_covariance(p, 16).matrix;
    const CMatrix root = psd_sqrt(c);
    Rng rng = make_stream(31, {});
    const int n = 100000;
    CMatrix h(n, 16);
    for (int t = 0; t < n; ++t)
        h.row(t) = (root * standard_complex_normal(rng, 16)).transpose();
    CHECK((sample_covariance(h) - c).norm() / c.norm() < 0.05);
}
