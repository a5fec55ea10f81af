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

#include "qcest/gmm_prior.hpp"

#include "qcest/parallel.hpp"
#include "qcest/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qcest
{

namespace
{

const double kLogPi = std::log(kPi);

// Components whose weight falls below this are considered dead.
constexpr double kDegenerateWeight = 1e-10;

double log_sum_exp(const RVector &v)
{
    const double top = v.maxCoeff();
    if (!std::isfinite(top))
        return top;
    return top + std::log((v.array() - top).exp().sum());
}

RVector log_weights(const RVector &w)
{
    RVector out(w.size());
    for (Eigen::Index k = 0; k < w.size(); ++k)
        out[k] = w[k] > 0.0 ? std::log(w[k]) : -std::numeric_limits<double>::infinity();
    return out;
}

void validate_weights(const RVector &w)
{
    if (w.size() < 1)
        throw std::invalid_argument("GmmPrior: need at least one component");
    if ((w.array() < 0.0).any() || !w.allFinite())
        throw std::invalid_argument("GmmPrior: weights must be finite and nonnegative");
    if (std::abs(w.sum() - 1.0) > 1e-10)
        throw std::invalid_argument("GmmPrior: weights do not sum to one");
}

// One EM step of the circulant-embedding model for a Toeplitz covariance:
// h is the leading block of a length-2N vector x with circulant covariance
// F^H diag(c) F; the step maximizes the expected complete-data likelihood
// given the target second moment S.
RVector toeplitz_embedding_step(const SpectralTransform &tf, const RVector &c, const CMatrix &target)
{
    const CMatrix cov = tf.covariance(c);
    const LoadedCholesky factor(cov);
    const CMatrix inv = factor.solve(CMatrix::Identity(cov.rows(), cov.cols()));
    const CMatrix m = inv * (target - cov) * inv;
    const RVector g = tf.spectral_diagonal(hermitian_part(m));
    return (c.array() + c.array().square() * g.array()).cwiseMax(0.0).matrix();
}

} // namespace

// ---------------------------------------------------------------------------
// GmmPrior

GmmPrior GmmPrior::full(RVector weights, std::vector<CMatrix> covariances)
{
    validate_weights(weights);
    if (covariances.size() != static_cast<std::size_t>(weights.size()))
        throw std::invalid_argument("GmmPrior: weight and covariance counts differ");
    const Eigen::Index n = covariances.front().rows();
    for (const auto &c : covariances)
    {
        if (c.rows() != n || c.cols() != n || n < 1)
            throw std::invalid_argument("GmmPrior: covariances must be square with equal size");
        if (!c.allFinite())
            throw std::invalid_argument("GmmPrior: non-finite covariance entry");
        const double scale = std::max(c.diagonal().real().cwiseAbs().maxCoeff(), 1e-300);
        if ((c - c.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
            throw std::invalid_argument("GmmPrior: covariance is not Hermitian");
    }

    GmmPrior prior;
    prior.structure_ = CovarianceStructure::Full;
    prior.n_antennas_ = static_cast<int>(n);
    prior.weights_ = std::move(weights);
    prior.covariances_ = std::move(covariances);
    prior.finalize();
    return prior;
}

GmmPrior GmmPrior::structured(CovarianceStructure structure, int n_antennas, RVector weights,
                              std::vector<RVector> spectra)
{
    validate_weights(weights);
    if (spectra.size() != static_cast<std::size_t>(weights.size()))
        throw std::invalid_argument("GmmPrior: weight and spectrum counts differ");

    GmmPrior prior;
    prior.structure_ = structure;
    prior.n_antennas_ = n_antennas;
    prior.transform_.emplace(structure, n_antennas);
    for (const auto &c : spectra)
    {
        if (c.size() != prior.transform_->spectrum_size())
            throw std::invalid_argument("GmmPrior: spectrum length mismatch");
        if ((c.array() < 0.0).any() || !c.allFinite())
            throw std::invalid_argument("GmmPrior: spectra must be finite and nonnegative");
        prior.covariances_.push_back(prior.transform_->covariance(c));
    }
    prior.weights_ = std::move(weights);
    prior.spectra_ = std::move(spectra);
    prior.finalize();
    return prior;
}

void GmmPrior::finalize()
{
    factors_.clear();
    if (structure_ == CovarianceStructure::Circulant)
    {
        for (const auto &c : spectra_)
            if ((c.array() <= 0.0).any())
                throw std::invalid_argument("GmmPrior: circulant spectrum must be strictly positive");
        return;
    }
    factors_.reserve(covariances_.size());
    for (const auto &c : covariances_)
        factors_.emplace_back(c);
}

const RVector &GmmPrior::spectrum(int k) const
{
    if (structure_ == CovarianceStructure::Full)
        throw std::logic_error("GmmPrior: full priors carry no spectra");
    return spectra_.at(static_cast<std::size_t>(k));
}

RVector GmmPrior::component_log_densities(const CVector &h) const
{
    if (h.size() != n_antennas_)
        throw std::invalid_argument("GmmPrior: channel dimension mismatch");
    const int k_count = n_components();
    RVector out(k_count);
    if (structure_ == CovarianceStructure::Circulant)
    {
        const RVector power = transform_->periodogram(h);
        for (int k = 0; k < k_count; ++k)
        {
            const RVector &c = spectra_[static_cast<std::size_t>(k)];
            out[k] = -(power.array() / c.array()).sum() - c.array().log().sum() - n_antennas_ * kLogPi;
        }
        return out;
    }
    for (int k = 0; k < k_count; ++k)
    {
        const auto &f = factors_[static_cast<std::size_t>(k)];
        out[k] = -f.quadratic_form(h) - f.log_det() - n_antennas_ * kLogPi;
    }
    return out;
}

double GmmPrior::log_density(const CVector &h) const
{
    return log_sum_exp(log_weights(weights_) + component_log_densities(h));
}

bool operator==(const GmmPrior &a, const GmmPrior &b)
{
    if (a.structure_ != b.structure_ || a.n_antennas_ != b.n_antennas_ || a.weights_.size() != b.weights_.size())
        return false;
    if (a.weights_ != b.weights_)
        return false;
    for (std::size_t k = 0; k < a.covariances_.size(); ++k)
        if (a.covariances_[k] != b.covariances_[k])
            return false;
    if (a.spectra_.size() != b.spectra_.size())
        return false;
    for (std::size_t k = 0; k < a.spectra_.size(); ++k)
        if (a.spectra_[k] != b.spectra_[k])
            return false;
    return true;
}

// ---------------------------------------------------------------------------
// Fitting

GmmFitResult fit_gmm(const CMatrix &samples, int n_components, CovarianceStructure structure,
                     const GmmFitConfig &config)
{
    const Eigen::Index t_count = samples.rows();
    const int n = static_cast<int>(samples.cols());
    const int k_count = n_components;
    if (k_count < 1)
        throw std::invalid_argument("fit_gmm: need at least one component");
    if (t_count < k_count)
        throw std::invalid_argument("fit_gmm: fewer samples than components");
    if (n < 1)
        throw std::invalid_argument("fit_gmm: empty channel dimension");
    if (config.max_iters < 0 || !(config.tol > 0.0) || !(config.loading > 0.0) || config.toeplitz_inner_steps < 1)
        throw std::invalid_argument("fit_gmm: invalid fit settings");

    const CMatrix x = samples.transpose(); // N x T, one channel per column
    const CMatrix c_hat = sample_covariance(samples);
    const double trace_over_n = c_hat.trace().real() / n;
    const double loading = config.loading * trace_over_n;

    std::optional<SpectralTransform> tf;
    if (structure != CovarianceStructure::Full)
        tf.emplace(structure, n);

    RMatrix pgram; // T x N periodograms, circulant only
    if (structure == CovarianceStructure::Circulant)
    {
        pgram.resize(t_count, n);
        parallel_for(static_cast<std::size_t>(t_count), [&](std::size_t t) {
            pgram.row(static_cast<Eigen::Index>(t)) = tf->periodogram(x.col(static_cast<Eigen::Index>(t))).transpose();
        });
    }

    std::vector<CMatrix> covs(static_cast<std::size_t>(k_count));
    std::vector<RVector> spectra(static_cast<std::size_t>(k_count));
    if (structure == CovarianceStructure::Toeplitz)
    {
        // starting point of the inner embedding iterations; the embedding
        // halves the trace of the projected matrix
        RVector start = 2.0 * tf->spectral_diagonal(c_hat);
        start = start.cwiseMax(0.0).array() + loading;
        spectra.assign(static_cast<std::size_t>(k_count), start);
    }

    // Sets component k from responsibility column k; false if the column is dead.
    auto update_component = [&](const RMatrix &resp, const RVector &counts, Eigen::Index k) {
        const auto ks = static_cast<std::size_t>(k);
        if (counts[k] < kDegenerateWeight * static_cast<double>(t_count))
            return false;
        if (structure == CovarianceStructure::Circulant)
        {
            spectra[ks] = (pgram.transpose() * resp.col(k)) / counts[k];
            spectra[ks].array() += loading;
            covs[ks] = tf->covariance(spectra[ks]);
            return true;
        }
        CMatrix s = (x * resp.col(k).asDiagonal()) * x.adjoint();
        s = hermitian_part(s / counts[k]);
        s.diagonal().array() += loading;
        if (structure == CovarianceStructure::Full)
        {
            covs[ks] = std::move(s);
            return true;
        }
        RVector c = spectra[ks];
        for (int step = 0; step < config.toeplitz_inner_steps; ++step)
            c = toeplitz_embedding_step(*tf, c, s);
        spectra[ks] = c.cwiseMax(loading);
        covs[ks] = tf->covariance(spectra[ks]);
        return true;
    };

    Rng rng = make_stream(config.seed, {static_cast<std::uint64_t>(k_count), static_cast<std::uint64_t>(structure)});
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // Initial hard partition: k-means++ style seeding on the phase-invariant
    // dissimilarity 1 - |<h_s, h_t>|^2 / (|h_s|^2 |h_t|^2), then nearest seed.
    RMatrix resp = RMatrix::Zero(t_count, k_count);
    {
        const RVector norms = x.colwise().squaredNorm().transpose();
        RVector dist = RVector::Constant(t_count, std::numeric_limits<double>::infinity());
        std::vector<Eigen::Index> owner(static_cast<std::size_t>(t_count), 0);
        Eigen::Index seed_index = std::uniform_int_distribution<Eigen::Index>(0, t_count - 1)(rng);
        for (int k = 0; k < k_count; ++k)
        {
            const CVector seed_vec = x.col(seed_index);
            const double seed_norm = std::max(norms[seed_index], 1e-300);
            const RVector corr = (seed_vec.adjoint() * x).cwiseAbs2().transpose();
            for (Eigen::Index t = 0; t < t_count; ++t)
            {
                const double d = 1.0 - corr[t] / (seed_norm * std::max(norms[t], 1e-300));
                if (d < dist[t])
                {
                    dist[t] = d;
                    owner[static_cast<std::size_t>(t)] = k;
                }
            }
            if (k + 1 == k_count)
                break;
            const RVector cumulative = [&] {
                RVector c(t_count);
                double acc = 0.0;
                for (Eigen::Index t = 0; t < t_count; ++t)
                    c[t] = acc += std::max(dist[t], 0.0);
                return c;
            }();
            const double total = cumulative[t_count - 1];
            if (total > 0.0)
            {
                const double u = unit(rng) * total;
                seed_index = std::upper_bound(cumulative.data(), cumulative.data() + t_count, u) - cumulative.data();
                seed_index = std::min(seed_index, t_count - 1);
            }
            else
                seed_index = std::uniform_int_distribution<Eigen::Index>(0, t_count - 1)(rng);
        }
        for (Eigen::Index t = 0; t < t_count; ++t)
            resp(t, owner[static_cast<std::size_t>(t)]) = 1.0;
    }

    RVector weights(k_count);
    {
        RVector counts = resp.colwise().sum().transpose();
        // an empty initial cell borrows the global statistics
        for (Eigen::Index k = 0; k < k_count; ++k)
            if (counts[k] < 1.0)
            {
                resp.col(k).setOnes();
                counts[k] = static_cast<double>(t_count);
            }
        parallel_for(static_cast<std::size_t>(k_count), [&](std::size_t ks) {
            update_component(resp, counts, static_cast<Eigen::Index>(ks));
        });
        weights = RVector::Constant(k_count, 1.0 / k_count);
    }

    // Replaces component `to` by a slightly perturbed copy of component `from`.
    auto split_component = [&](int from, int to) {
        const auto fs = static_cast<std::size_t>(from);
        const auto ts = static_cast<std::size_t>(to);
        if (structure == CovarianceStructure::Full)
        {
            const double scale = 0.01 * covs[fs].trace().real() / n;
            covs[ts] = covs[fs];
            for (int i = 0; i < n; ++i)
                covs[ts](i, i) += scale * unit(rng);
            return;
        }
        const double scale = 0.01 * spectra[fs].mean();
        spectra[ts] = spectra[fs];
        for (Eigen::Index m = 0; m < spectra[ts].size(); ++m)
            spectra[ts][m] += scale * unit(rng);
        covs[ts] = tf->covariance(spectra[ts]);
    };

    std::vector<int> reseeds(static_cast<std::size_t>(k_count), 0);
    std::vector<double> history;
    int iterations = 0;
    bool converged = false;
    int reseed_total = 0;

    for (int iter = 0;; ++iter)
    {
        // E-step
        const RVector log_w = log_weights(weights);
        parallel_for(static_cast<std::size_t>(k_count), [&](std::size_t ks) {
            const auto k = static_cast<Eigen::Index>(ks);
            if (structure == CovarianceStructure::Circulant)
            {
                const RVector &c = spectra[ks];
                const double log_det = c.array().log().sum();
                resp.col(k) = -(pgram * c.cwiseInverse()).array() - log_det - n * kLogPi + log_w[k];
                return;
            }
            const LoadedCholesky f(covs[ks]);
            const CMatrix z = f.llt().matrixL().solve(x);
            resp.col(k) = -z.colwise().squaredNorm().transpose().array() - f.log_det() - n * kLogPi + log_w[k];
        });

        double total = 0.0;
        for (Eigen::Index t = 0; t < t_count; ++t)
        {
            const RVector row = resp.row(t).transpose();
            const double lse = log_sum_exp(row);
            total += lse;
            resp.row(t) = (row.array() - lse).exp().transpose();
        }
        const double mean_ll = total / static_cast<double>(t_count);
        if (!std::isfinite(mean_ll))
            throw std::runtime_error("fit_gmm: non-finite log-likelihood");
        history.push_back(mean_ll);

        if (iter > 0)
        {
            const double prev = history[history.size() - 2];
            if (std::abs(mean_ll - prev) < config.tol * std::abs(prev))
            {
                converged = true;
                break;
            }
        }
        if (iter == config.max_iters)
            break;

        // M-step
        const RVector counts = resp.colwise().sum().transpose();
        std::vector<char> alive(static_cast<std::size_t>(k_count), 0);
        parallel_for(static_cast<std::size_t>(k_count), [&](std::size_t ks) {
            alive[ks] = update_component(resp, counts, static_cast<Eigen::Index>(ks)) ? 1 : 0;
        });

        weights = counts / static_cast<double>(t_count);
        for (int k = 0; k < k_count; ++k)
        {
            if (alive[static_cast<std::size_t>(k)])
                continue;
            if (++reseeds[static_cast<std::size_t>(k)] > 1)
                throw std::runtime_error("fit_gmm: component " + std::to_string(k) + " degenerated twice");
            Eigen::Index heavy = 0;
            weights.maxCoeff(&heavy);
            split_component(static_cast<int>(heavy), k);
            weights[k] = weights[heavy] / 2.0;
            weights[heavy] /= 2.0;
            ++reseed_total;
        }
        // counts sum to T only up to rounding
        weights /= weights.sum();
        iterations = iter + 1;
    }

    GmmPrior prior = structure == CovarianceStructure::Full
                         ? GmmPrior::full(std::move(weights), std::move(covs))
                         : GmmPrior::structured(structure, n, std::move(weights), std::move(spectra));
    return GmmFitResult{std::move(prior), std::move(history), iterations, converged, reseed_total};
}

// ---------------------------------------------------------------------------
// Quantized-domain statistics

QuantizedComponentStats::QuantizedComponentStats(const GmmPrior &prior, const PilotSystem &system)
    : observation_size_(system.observation_size()), n_antennas_(system.n_antennas()),
      noise_var_(system.noise_var()), pilots_(system.pilots())
{
    if (prior.n_antennas() != system.n_antennas())
        throw std::invalid_argument("precompute_stats: prior and pilot system disagree on N");

    std::vector<std::optional<LoadedCholesky>> tmp(static_cast<std::size_t>(prior.n_components()));
    parallel_for(tmp.size(), [&](std::size_t k) {
        const CMatrix cov_y = system.observation_covariance(prior.covariance(static_cast<int>(k)));
        tmp[k].emplace(quantized_covariance(cov_y));
    });
    factors_.reserve(tmp.size());
    for (auto &f : tmp)
        factors_.push_back(std::move(*f));
}

CMatrix QuantizedComponentStats::reconstruct(int k) const
{
    const auto &llt = factor(k).llt();
    const CMatrix l = llt.matrixL();
    return l * l.adjoint();
}

RVector QuantizedComponentStats::component_log_likelihoods(const QuantizedObservation &obs) const
{
    if (obs.size() != observation_size_)
        throw std::invalid_argument("responsibilities: observation dimension mismatch");
    RVector out(n_components());
    for (int k = 0; k < n_components(); ++k)
    {
        const auto &f = factors_[static_cast<std::size_t>(k)];
        out[k] = -f.quadratic_form(obs.r) - f.log_det() - static_cast<double>(observation_size_) * kLogPi;
    }
    return out;
}

bool QuantizedComponentStats::matches(const GmmPrior &prior, const PilotSystem &system) const
{
    return prior.n_components() == n_components() && prior.n_antennas() == n_antennas_ &&
           system.n_antennas() == n_antennas_ && system.observation_size() == observation_size_ &&
           system.noise_var() == noise_var_ && system.pilots() == pilots_;
}

QuantizedComponentStats precompute_stats(const GmmPrior &prior, const PilotSystem &system)
{
    return QuantizedComponentStats(prior, system);
}

RVector responsibilities(const GmmPrior &prior, const QuantizedComponentStats &stats, const QuantizedObservation &obs)
{
    if (stats.n_components() != prior.n_components())
        throw std::invalid_argument("responsibilities: statistics were built for a different prior");
    const RVector logp = log_weights(prior.weights()) + stats.component_log_likelihoods(obs);
    const double lse = log_sum_exp(logp);
    if (!std::isfinite(lse))
        throw std::runtime_error("responsibilities: non-finite normalizer");
    return (logp.array() - lse).exp().matrix();
}

int map_component(const RVector &resp)
{
    if (resp.size() == 0)
        throw std::invalid_argument("map_component: empty responsibility vector");
    int best = 0;
    for (int k = 1; k < resp.size(); ++k)
        if (resp[k] > resp[best])
            best = k;
    return best;
}

int map_component(const GmmPrior &prior, const QuantizedComponentStats &stats, const QuantizedObservation &obs)
{
    return map_component(responsibilities(prior, stats, obs));
}

} // namespace qcest
