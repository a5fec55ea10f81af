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

#ifndef QCEST_EVAL_HARNESS_HPP
#define QCEST_EVAL_HARNESS_HPP

#include "qcest/channel_model.hpp"
#include "qcest/em_estimator.hpp"
#include "qcest/gmm_prior.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace qcest
{

inline constexpr int kCsvSchemaVersion = 1;
inline constexpr const char *kToolVersion = "1.0.0";

/// Estimator names understood by the harness.
const std::vector<std::string> &registered_estimators();

struct ExperimentConfig
{
    int n_antennas = 16;
    int n_pilots = 8;
    int n_clusters = 1;
    double angle_spread_deg = 2.0;
    int integration_grid = kDefaultIntegrationGrid;
    std::vector<double> snr_db = {-10.0, 0.0, 5.0, 10.0, 15.0};
    int n_train = 20000;
    int n_test = 1000;
    int components = 16;
    EmConfig em;
    GmmFitConfig fit;
    std::uint64_t seed = 1;
    std::vector<std::string> estimators = {"genie-em", "global-em", "gmm-em", "genie-blmmse", "global-blmmse",
                                           "gmm-blmmse"};
    std::vector<int> pilot_grid = {4, 8, 16, 32};
    double pilot_snr_db = 5.0;
    std::vector<int> component_grid = {1, 2, 4, 8, 16, 32};
    double component_snr_db = 10.0;
    std::vector<double> profile_snr_db = {-10.0, -5.0, 0.0, 5.0, 10.0, 15.0};
    /// Wall-clock columns make reports machine dependent; off by default.
    bool record_timing = false;

    void validate() const;
    ChannelModelConfig channel_model() const;
};

nlohmann::json to_json(const ExperimentConfig &config);
/// Reads the documented config schema. Keys absent from `j` keep the value
/// from `base`; unknown keys are rejected. A run manifest is accepted as
/// well (its "config" member is used).
ExperimentConfig config_from_json(const nlohmann::json &j, ExperimentConfig base = {});

struct NmseEstimate
{
    double nmse = 0.0;
    /// Jackknife standard error of the ratio estimator.
    double stderr_ = 0.0;
};

/// sum_t ||h_t - h_hat_t||^2 / sum_t ||h_t||^2 over rows.
NmseEstimate nmse(const CMatrix &truth, const CMatrix &estimates);

struct ReportRow
{
    std::string estimator;
    double snr_db = 0.0;
    int n_pilots = 0;
    int k_components = 0; // 0 for estimators without a mixture prior
    double nmse = 0.0;
    double nmse_stderr = 0.0;
    double mean_iters = 0.0; // NaN for non-iterative estimators
    double conv_rate = 0.0;  // NaN for non-iterative estimators
    double wall_ms = 0.0;    // NaN unless timing is recorded
    std::string status = "ok";
    std::uint64_t observation_hash = 0;
};

struct EvalReport
{
    std::string sweep;
    ExperimentConfig config;
    std::vector<ReportRow> rows;

    /// First row matching all given keys; k_components < 0 matches any.
    const ReportRow *find(const std::string &estimator, double snr_db, int n_pilots, int k_components = -1) const;

    void write_csv(std::ostream &out) const;
    nlohmann::json manifest() const;
};

/// Owns the datasets and fitted priors of one configuration and evaluates
/// estimators on paired observations. Priors are fitted on first use and
/// cached per (structure, K).
class Experiment
{
  public:
    explicit Experiment(ExperimentConfig config);

    const ExperimentConfig &config() const { return config_; }

    const ChannelDataset &train();
    const ChannelDataset &test();
    const CMatrix &sample_cov();
    const GmmFitResult &fit(CovarianceStructure structure, int components);
    const GmmPrior &prior(CovarianceStructure structure, int components) { return fit(structure, components).prior; }

    void set_train(ChannelDataset data);
    void set_test(ChannelDataset data);
    void set_prior(GmmPrior prior);

    /// Quantized observations of the test set; sample t reuses one unit
    /// noise draw across noise levels.
    std::vector<QuantizedObservation> observations(const PilotSystem &system) const;

    /// All requested estimators on the same observations of one sweep point.
    std::vector<ReportRow> evaluate_point(double snr_db, int n_pilots, const std::vector<std::string> &estimators,
                                          int components);

    EvalReport run_snr_sweep();
    EvalReport run_pilot_sweep();
    EvalReport run_component_sweep();
    EvalReport run_iteration_profile();

  private:
    ReportRow evaluate_estimator(const std::string &name, const PilotSystem &system,
                                 const std::vector<QuantizedObservation> &obs, int components);

    ExperimentConfig config_;
    std::optional<ChannelDataset> train_;
    std::optional<ChannelDataset> test_;
    std::optional<CMatrix> sample_cov_;
    std::map<std::pair<int, int>, GmmFitResult> fits_;
};

/// FNV-1a over the raw bytes of the observations.
std::uint64_t observation_hash(const std::vector<QuantizedObservation> &obs);

} // namespace qcest

#endif
