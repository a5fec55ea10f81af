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

#ifndef QCEST_GMM_PRIOR_HPP
#define QCEST_GMM_PRIOR_HPP

#include "qcest/channel_model.hpp"
#include "qcest/linalg.hpp"
#include "qcest/signal_model.hpp"
#include "qcest/spectral.hpp"
#include "qcest/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace qcest
{

/// Zero-mean Gaussian mixture over channel vectors,
/// p(h) = sum_k p(k) CN(h; 0, C_k).
///
/// Structured priors store the nonnegative spectra c_k of
/// C_k = Q^H diag(c_k) Q; the dense C_k is materialized once at
/// construction. The object is immutable.
class GmmPrior
{
  public:
    static GmmPrior full(RVector weights, std::vector<CMatrix> covariances);
    static GmmPrior structured(CovarianceStructure structure, int n_antennas, RVector weights,
                               std::vector<RVector> spectra);

    CovarianceStructure structure() const { return structure_; }
    int n_components() const { return static_cast<int>(weights_.size()); }
    int n_antennas() const { return n_antennas_; }
    const RVector &weights() const { return weights_; }
    const CMatrix &covariance(int k) const { return covariances_.at(static_cast<std::size_t>(k)); }
    /// Throws std::logic_error for full priors.
    const RVector &spectrum(int k) const;
    /// Present for structured priors only.
    const std::optional<SpectralTransform> &transform() const { return transform_; }

    /// log CN(h; 0, C_k) for every component. Circulant priors evaluate the
    /// quadratic form and determinant in the DFT domain.
    RVector component_log_densities(const CVector &h) const;

    /// log p(h)
    double log_density(const CVector &h) const;

    friend bool operator==(const GmmPrior &a, const GmmPrior &b);

  private:
    GmmPrior() = default;
    void finalize();

    CovarianceStructure structure_ = CovarianceStructure::Full;
    int n_antennas_ = 0;
    RVector weights_;
    std::vector<CMatrix> covariances_;
    std::vector<RVector> spectra_;
    std::optional<SpectralTransform> transform_;
    std::vector<LoadedCholesky> factors_;
};

struct GmmFitConfig
{
    int max_iters = 300;
    /// Stop when the relative change of the mean log-likelihood drops below this.
    double tol = 1e-6;
    /// Every covariance update adds loading * trace(C_hat) / N to the diagonal.
    double loading = 1e-6;
    std::uint64_t seed = 1;
    /// Circulant-embedding EM steps per outer iteration for Toeplitz priors.
    int toeplitz_inner_steps = 5;
};

struct GmmFitResult
{
    GmmPrior prior;
    /// Mean training log-likelihood, one entry per E-step.
    std::vector<double> log_likelihood;
    int iterations = 0;
    bool converged = false;
    int reseeds = 0;
};

/// Zero-mean GMM-EM on the rows of `samples` (T x N).
GmmFitResult fit_gmm(const CMatrix &samples, int n_components, CovarianceStructure structure,
                     const GmmFitConfig &config = {});

inline GmmFitResult fit_gmm(const ChannelDataset &dataset, int n_components, CovarianceStructure structure,
                            const GmmFitConfig &config = {})
{
    return fit_gmm(dataset.samples, n_components, structure, config);
}

/// Per-component statistics of the quantized observation r for one
/// (prior, pilot system) pair: the arcsine-law covariances C_{r|k} in
/// factorized form and their log-determinants.
class QuantizedComponentStats
{
  public:
    QuantizedComponentStats(const GmmPrior &prior, const PilotSystem &system);

    int n_components() const { return static_cast<int>(factors_.size()); }
    Eigen::Index observation_size() const { return observation_size_; }
    double noise_var() const { return noise_var_; }
    const LoadedCholesky &factor(int k) const { return factors_.at(static_cast<std::size_t>(k)); }

    /// L L^H of component k (C_{r|k} plus any loading the factorization needed).
    CMatrix reconstruct(int k) const;

    /// log CN(r; 0, C_{r|k}) for every component.
    RVector component_log_likelihoods(const QuantizedObservation &obs) const;

    /// True if built for a prior with these dimensions and this pilot system.
    bool matches(const GmmPrior &prior, const PilotSystem &system) const;

  private:
    std::vector<LoadedCholesky> factors_;
    Eigen::Index observation_size_ = 0;
    int n_antennas_ = 0;
    double noise_var_ = 0.0;
    CVector pilots_;
};

QuantizedComponentStats precompute_stats(const GmmPrior &prior, const PilotSystem &system);

/// p(k | r) proportional to p(k) CN(r; 0, C_{r|k}), normalized via log-sum-exp.
RVector responsibilities(const GmmPrior &prior, const QuantizedComponentStats &stats,
                         const QuantizedObservation &obs);

/// argmax with ties broken by the lowest index.
int map_component(const RVector &responsibilities);
int map_component(const GmmPrior &prior, const QuantizedComponentStats &stats, const QuantizedObservation &obs);

/// Binary prior file, little-endian, see docs/file-formats.md.
void save_prior(const GmmPrior &prior, const std::filesystem::path &path);
GmmPrior load_prior(const std::filesystem::path &path);

} // namespace qcest

#endif
