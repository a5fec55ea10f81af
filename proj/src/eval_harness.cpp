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

#include "qcest/eval_harness.hpp"

#include "qcest/baselines.hpp"
#include "qcest/parallel.hpp"
#include "qcest/random.hpp"

#include <Eigen/Core>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <set>
#include <stdexcept>

namespace qcest
{

namespace
{

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum class Tag : std::uint64_t
{
    Train = 1,
    Test = 2,
    Fit = 3,
    Noise = 4,
};

std::uint64_t sub_seed(std::uint64_t seed, Tag tag)
{
    return derive_seed(seed, {static_cast<std::uint64_t>(tag)});
}

std::uint64_t fnv1a(const void *data, std::size_t size, std::uint64_t h = 0xcbf29ce484222325ULL)
{
    const auto *bytes = static_cast<const unsigned char *>(data);
    for (std::size_t i = 0; i < size; ++i)
    {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string format_number(double v)
{
    if (std::isnan(v))
        return "NA";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string csv_field(const std::string &s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s)
    {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

struct EstimatorKind
{
    enum class Family
    {
        Ls,
        GenieEm,
        GlobalEm,
        GmmEm,
        GenieBlmmse,
        GlobalBlmmse,
        GmmBlmmse,
        Unavailable,
    };
    Family family;
    CovarianceStructure structure = CovarianceStructure::Full;
    bool map_only = false;

    bool uses_mixture() const { return family == Family::GmmEm || family == Family::GmmBlmmse; }
    bool iterative() const
    {
        return family == Family::GenieEm || family == Family::GlobalEm || family == Family::GmmEm;
    }
};

EstimatorKind parse_estimator(const std::string &name)
{
    using F = EstimatorKind::Family;
    if (name == "ls")
        return {F::Ls};
    if (name == "genie-em")
        return {F::GenieEm};
    if (name == "global-em")
        return {F::GlobalEm};
    if (name == "gmm-em")
        return {F::GmmEm, CovarianceStructure::Full};
    if (name == "gmm-em-toep")
        return {F::GmmEm, CovarianceStructure::Toeplitz};
    if (name == "gmm-em-circ")
        return {F::GmmEm, CovarianceStructure::Circulant};
    if (name == "genie-blmmse")
        return {F::GenieBlmmse};
    if (name == "global-blmmse")
        return {F::GlobalBlmmse};
    if (name == "gmm-blmmse")
        return {F::GmmBlmmse, CovarianceStructure::Full};
    if (name == "gmm-blmmse-map")
        return {F::GmmBlmmse, CovarianceStructure::Full, true};
    if (name == "em-gm-gamp")
        return {F::Unavailable};
    throw std::invalid_argument("unknown estimator '" + name + "'");
}

template <typename T> void read_key(const nlohmann::json &j, const char *key, T &value)
{
    if (j.contains(key))
        value = j.at(key).get<T>();
}

void reject_unknown(const nlohmann::json &j, const std::set<std::string> &known, const std::string &where)
{
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw std::invalid_argument("unknown key '" + it.key() + "' in " + where);
}

} // namespace

const std::vector<std::string> &registered_estimators()
{
    static const std::vector<std::string> names = {
        "ls",           "genie-em",      "global-em",  "gmm-em",         "gmm-em-toep", "gmm-em-circ",
        "genie-blmmse", "global-blmmse", "gmm-blmmse", "gmm-blmmse-map", "em-gm-gamp"};
    return names;
}

// ---------------------------------------------------------------------------
// Configuration

void ExperimentConfig::validate() const
{
    if (n_antennas < 1 || n_pilots < 1 || n_clusters < 1 || n_train < 1 || n_test < 1 || components < 1)
        throw std::invalid_argument("config: all counts must be positive");
    if (!(angle_spread_deg > 0.0))
        throw std::invalid_argument("config: angle spread must be positive");
    if (integration_grid < kMinIntegrationGrid)
        throw std::invalid_argument("config: integration grid below minimum");
    if (snr_db.empty())
        throw std::invalid_argument("config: empty SNR grid");
    if (estimators.empty())
        throw std::invalid_argument("config: no estimators requested");
    for (const auto &e : estimators)
        parse_estimator(e);
    for (int p : pilot_grid)
        if (p < 1)
            throw std::invalid_argument("config: pilot counts must be positive");
    for (int k : component_grid)
        if (k < 1)
            throw std::invalid_argument("config: component counts must be positive");
    em.validate();
}

ChannelModelConfig ExperimentConfig::channel_model() const
{
    return ChannelModelConfig{n_antennas, n_clusters, angle_spread_deg * kPi / 180.0, integration_grid};
}

nlohmann::json to_json(const ExperimentConfig &c)
{
    return nlohmann::json{
        {"n_antennas", c.n_antennas},
        {"n_pilots", c.n_pilots},
        {"n_clusters", c.n_clusters},
        {"angle_spread_deg", c.angle_spread_deg},
        {"integration_grid", c.integration_grid},
        {"snr_db", c.snr_db},
        {"n_train", c.n_train},
        {"n_test", c.n_test},
        {"components", c.components},
        {"em", {{"max_iters", c.em.max_iters}, {"rel_tol", c.em.rel_tol}}},
        {"fit",
         {{"max_iters", c.fit.max_iters},
          {"tol", c.fit.tol},
          {"loading", c.fit.loading},
          {"toeplitz_inner_steps", c.fit.toeplitz_inner_steps}}},
        {"seed", c.seed},
        {"estimators", c.estimators},
        {"pilot_grid", c.pilot_grid},
        {"pilot_snr_db", c.pilot_snr_db},
        {"component_grid", c.component_grid},
        {"component_snr_db", c.component_snr_db},
        {"profile_snr_db", c.profile_snr_db},
        {"record_timing", c.record_timing},
    };
}

ExperimentConfig config_from_json(const nlohmann::json &input, ExperimentConfig c)
{
    const nlohmann::json &j = input.contains("config") && input.at("config").is_object() ? input.at("config") : input;
    if (!j.is_object())
        throw std::invalid_argument("config must be a JSON object");
    reject_unknown(j,
                   {"n_antennas", "n_pilots", "n_clusters", "angle_spread_deg", "integration_grid", "snr_db",
                    "n_train", "n_test", "components", "em", "fit", "seed", "estimators", "pilot_grid",
                    "pilot_snr_db", "component_grid", "component_snr_db", "profile_snr_db", "record_timing"},
                   "config");
    read_key(j, "n_antennas", c.n_antennas);
    read_key(j, "n_pilots", c.n_pilots);
    read_key(j, "n_clusters", c.n_clusters);
    read_key(j, "angle_spread_deg", c.angle_spread_deg);
    read_key(j, "integration_grid", c.integration_grid);
    read_key(j, "snr_db", c.snr_db);
    read_key(j, "n_train", c.n_train);
    read_key(j, "n_test", c.n_test);
    read_key(j, "components", c.components);
    if (j.contains("em"))
    {
        const auto &em = j.at("em");
        reject_unknown(em, {"max_iters", "rel_tol"}, "config.em");
        read_key(em, "max_iters", c.em.max_iters);
        read_key(em, "rel_tol", c.em.rel_tol);
    }
    if (j.contains("fit"))
    {
        const auto &fit = j.at("fit");
        reject_unknown(fit, {"max_iters", "tol", "loading", "toeplitz_inner_steps"}, "config.fit");
        read_key(fit, "max_iters", c.fit.max_iters);
        read_key(fit, "tol", c.fit.tol);
        read_key(fit, "loading", c.fit.loading);
        read_key(fit, "toeplitz_inner_steps", c.fit.toeplitz_inner_steps);
    }
    read_key(j, "seed", c.seed);
    read_key(j, "estimators", c.estimators);
    read_key(j, "pilot_grid", c.pilot_grid);
    read_key(j, "pilot_snr_db", c.pilot_snr_db);
    read_key(j, "component_grid", c.component_grid);
    read_key(j, "component_snr_db", c.component_snr_db);
    read_key(j, "profile_snr_db", c.profile_snr_db);
    read_key(j, "record_timing", c.record_timing);
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
// Metrics

NmseEstimate nmse(const CMatrix &truth, const CMatrix &estimates)
{
    if (truth.rows() != estimates.rows() || truth.cols() != estimates.cols())
        throw std::invalid_argument("nmse: shape mismatch");
    const Eigen::Index n = truth.rows();
    if (n < 1)
        throw std::invalid_argument("nmse: empty input");

    const RVector err = (truth - estimates).rowwise().squaredNorm();
    const RVector pow = truth.rowwise().squaredNorm();
    const double err_sum = err.sum();
    const double pow_sum = pow.sum();
    if (!(pow_sum > 0.0))
        throw std::invalid_argument("nmse: zero channel energy");

    NmseEstimate out{err_sum / pow_sum, 0.0};
    if (n == 1)
        return out;
    RVector loo(n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        const double denom = pow_sum - pow[i];
        loo[i] = denom > 0.0 ? (err_sum - err[i]) / denom : out.nmse;
    }
    const double mean = loo.mean();
    const double dn = static_cast<double>(n);
    out.stderr_ = std::sqrt((dn - 1.0) / dn * (loo.array() - mean).square().sum());
    return out;
}

std::uint64_t observation_hash(const std::vector<QuantizedObservation> &obs)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto &o : obs)
        h = fnv1a(o.r.data(), sizeof(cdouble) * static_cast<std::size_t>(o.r.size()), h);
    return h;
}

// ---------------------------------------------------------------------------
// Reports

const ReportRow *EvalReport::find(const std::string &estimator, double snr_db, int n_pilots, int k_components) const
{
    for (const auto &r : rows)
        if (r.estimator == estimator && r.snr_db == snr_db && r.n_pilots == n_pilots &&
            (k_components < 0 || r.k_components == k_components))
            return &r;
    return nullptr;
}

void EvalReport::write_csv(std::ostream &out) const
{
    out << "estimator,snr_db,n_pilots,k_components,nmse,nmse_stderr,mean_iters,conv_rate,wall_ms,status\n";
    for (const auto &r : rows)
    {
        out << csv_field(r.estimator) << ',' << format_number(r.snr_db) << ',' << r.n_pilots << ','
            << r.k_components << ',' << format_number(r.nmse) << ',' << format_number(r.nmse_stderr) << ','
            << format_number(r.mean_iters) << ',' << format_number(r.conv_rate) << ','
            << format_number(r.wall_ms) << ',' << csv_field(r.status) << '\n';
    }
}

nlohmann::json EvalReport::manifest() const
{
    const nlohmann::json cfg = to_json(config);
    const std::string dumped = cfg.dump();
    nlohmann::json points = nlohmann::json::array();
    std::set<std::tuple<double, int, std::uint64_t>> seen;
    for (const auto &r : rows)
    {
        if (r.observation_hash == 0 || !seen.insert({r.snr_db, r.n_pilots, r.observation_hash}).second)
            continue;
        points.push_back({{"snr_db", r.snr_db}, {"n_pilots", r.n_pilots}, {"observation_hash", hex64(r.observation_hash)}});
    }
    return nlohmann::json{
        {"tool", "qcest"},
        {"version", kToolVersion},
        {"csv_schema_version", kCsvSchemaVersion},
        {"sweep", sweep},
        {"seed", config.seed},
        {"config_hash", hex64(fnv1a(dumped.data(), dumped.size()))},
        {"config", cfg},
        {"observation_hashes", points},
        {"eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                              std::to_string(EIGEN_MINOR_VERSION)},
        {"compiler", __VERSION__},
    };
}

// ---------------------------------------------------------------------------
// Experiment

Experiment::Experiment(ExperimentConfig config) : config_(std::move(config))
{
    config_.validate();
}

const ChannelDataset &Experiment::train()
{
    if (!train_)
        train_ = generate_dataset(sub_seed(config_.seed, Tag::Train), config_.n_train, config_.channel_model(), false);
    return *train_;
}

const ChannelDataset &Experiment::test()
{
    if (!test_)
        test_ = generate_dataset(sub_seed(config_.seed, Tag::Test), config_.n_test, config_.channel_model(), true);
    return *test_;
}

const CMatrix &Experiment::sample_cov()
{
    if (!sample_cov_)
        sample_cov_ = sample_covariance(train().samples);
    return *sample_cov_;
}

const GmmFitResult &Experiment::fit(CovarianceStructure structure, int components)
{
    const auto key = std::make_pair(static_cast<int>(structure), components);
    auto it = fits_.find(key);
    if (it == fits_.end())
    {
        GmmFitConfig fit_cfg = config_.fit;
        fit_cfg.seed = sub_seed(config_.seed, Tag::Fit);
        it = fits_.emplace(key, fit_gmm(train(), components, structure, fit_cfg)).first;
    }
    return it->second;
}

void Experiment::set_train(ChannelDataset data)
{
    if (data.n_antennas() != config_.n_antennas)
        throw std::invalid_argument("training set antenna count differs from config");
    train_ = std::move(data);
    sample_cov_.reset();
    fits_.clear();
}

void Experiment::set_test(ChannelDataset data)
{
    if (data.n_antennas() != config_.n_antennas)
        throw std::invalid_argument("test set antenna count differs from config");
    test_ = std::move(data);
}

void Experiment::set_prior(GmmPrior prior)
{
    if (prior.n_antennas() != config_.n_antennas)
        throw std::invalid_argument("prior antenna count differs from config");
    const auto key = std::make_pair(static_cast<int>(prior.structure()), prior.n_components());
    fits_.insert_or_assign(key, GmmFitResult{std::move(prior), {}, 0, true, 0});
}

std::vector<QuantizedObservation> Experiment::observations(const PilotSystem &system) const
{
    if (!test_)
        throw std::logic_error("observations: test set not available");
    const auto &data = *test_;
    std::vector<QuantizedObservation> obs(static_cast<std::size_t>(data.size()));
    const std::uint64_t noise_seed = sub_seed(config_.seed, Tag::Noise);
    parallel_for(obs.size(), [&](std::size_t t) {
        Rng rng = make_stream(noise_seed, {static_cast<std::uint64_t>(system.n_pilots()), t});
        const CVector w = standard_complex_normal(rng, system.observation_size());
        obs[t] = observe_with_noise(system, data.channel(static_cast<Eigen::Index>(t)), w);
    });
    return obs;
}

ReportRow Experiment::evaluate_estimator(const std::string &name, const PilotSystem &system,
                                         const std::vector<QuantizedObservation> &obs, int components)
{
    using F = EstimatorKind::Family;
    const EstimatorKind kind = parse_estimator(name);
    ReportRow row;
    row.estimator = name;
    row.snr_db = -10.0 * std::log10(system.noise_var());
    row.n_pilots = system.n_pilots();
    row.k_components = kind.uses_mixture() ? components : 0;
    row.nmse = row.nmse_stderr = row.mean_iters = row.conv_rate = row.wall_ms = kNaN;

    if (kind.family == F::Unavailable)
    {
        row.status = "unavailable: not implemented";
        return row;
    }

    const ChannelDataset &data = test();
    const auto t_count = static_cast<std::size_t>(data.size());
    CMatrix estimates(data.size(), data.n_antennas());
    std::vector<int> iterations(t_count, 0);
    std::vector<char> converged(t_count, 0);

    try
    {
        const auto start = std::chrono::steady_clock::now();
        const EmConfig &em = config_.em;

        auto store = [&](std::size_t t, const EstimationResult &r) {
            estimates.row(static_cast<Eigen::Index>(t)) = r.estimate.transpose();
            iterations[t] = r.iterations;
            converged[t] = r.converged ? 1 : 0;
        };

        switch (kind.family)
        {
        case F::Ls:
            parallel_for(t_count, [&](std::size_t t) {
                estimates.row(static_cast<Eigen::Index>(t)) = ls_init(system, obs[t]).transpose();
            });
            break;
        case F::GenieEm:
            parallel_for(t_count, [&](std::size_t t) {
                store(t, genie_em(system, obs[t], SpatialCovariance{data.genie_covariance(static_cast<Eigen::Index>(t))}, em));
            });
            break;
        case F::GlobalEm: {
            const MStepFilter filter(sample_cov(), system);
            parallel_for(t_count, [&](std::size_t t) { store(t, estimate(system, obs[t], filter, em)); });
            break;
        }
        case F::GmmEm: {
            const GmmEmEstimator estimator(prior(kind.structure, components), system);
            parallel_for(t_count, [&](std::size_t t) { store(t, estimator.estimate(obs[t], em)); });
            break;
        }
        case F::GenieBlmmse:
            parallel_for(t_count, [&](std::size_t t) {
                estimates.row(static_cast<Eigen::Index>(t)) =
                    blmmse(system, obs[t], data.genie_covariance(static_cast<Eigen::Index>(t))).transpose();
            });
            break;
        case F::GlobalBlmmse: {
            const BussgangFilter filter(sample_cov(), system);
            parallel_for(t_count, [&](std::size_t t) {
                estimates.row(static_cast<Eigen::Index>(t)) = filter.apply(obs[t].r).transpose();
            });
            break;
        }
        case F::GmmBlmmse: {
            const GmmBussgangEstimator estimator(prior(kind.structure, components), system);
            parallel_for(t_count, [&](std::size_t t) {
                estimates.row(static_cast<Eigen::Index>(t)) = estimator.estimate(obs[t], kind.map_only).transpose();
            });
            break;
        }
        case F::Unavailable:
            break;
        }

        const double elapsed =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        row.observation_hash = observation_hash(obs);

        if (!estimates.allFinite())
        {
            row.status = "diverged: non-finite estimate";
            return row;
        }
        const NmseEstimate e = nmse(data.samples, estimates);
        row.nmse = e.nmse;
        row.nmse_stderr = e.stderr_;
        if (kind.iterative())
        {
            double iters = 0.0;
            double conv = 0.0;
            for (std::size_t t = 0; t < t_count; ++t)
            {
                iters += iterations[t];
                conv += converged[t];
            }
            row.mean_iters = iters / static_cast<double>(t_count);
            row.conv_rate = conv / static_cast<double>(t_count);
        }
        if (config_.record_timing)
            row.wall_ms = elapsed / static_cast<double>(t_count);
    }
    catch (const std::exception &ex)
    {
        row.status = std::string("error: ") + ex.what();
    }
    return row;
}

std::vector<ReportRow> Experiment::evaluate_point(double snr_db, int n_pilots,
                                                  const std::vector<std::string> &estimators, int components)
{
    const PilotSystem system =
        PilotSystem::designed(config_.n_antennas, n_pilots, noise_variance_from_snr_db(snr_db));
    test();
    const std::vector<QuantizedObservation> obs = observations(system);
    std::vector<ReportRow> rows;
    rows.reserve(estimators.size());
    for (const auto &name : estimators)
    {
        rows.push_back(evaluate_estimator(name, system, obs, components));
        rows.back().snr_db = snr_db;
    }
    return rows;
}

EvalReport Experiment::run_snr_sweep()
{
    EvalReport report{"snr", config_, {}};
    for (double snr : config_.snr_db)
        for (auto &row : evaluate_point(snr, config_.n_pilots, config_.estimators, config_.components))
            report.rows.push_back(std::move(row));
    return report;
}

EvalReport Experiment::run_pilot_sweep()
{
    EvalReport report{"pilots", config_, {}};
    for (int p : config_.pilot_grid)
        for (auto &row : evaluate_point(config_.pilot_snr_db, p, config_.estimators, config_.components))
            report.rows.push_back(std::move(row));
    return report;
}

EvalReport Experiment::run_component_sweep()
{
    EvalReport report{"components", config_, {}};
    std::vector<std::string> mixture;
    std::vector<std::string> other;
    for (const auto &name : config_.estimators)
        (parse_estimator(name).uses_mixture() ? mixture : other).push_back(name);

    if (!other.empty())
        for (auto &row : evaluate_point(config_.component_snr_db, config_.n_pilots, other, 0))
            report.rows.push_back(std::move(row));
    for (int k : config_.component_grid)
        for (auto &row : evaluate_point(config_.component_snr_db, config_.n_pilots, mixture, k))
            report.rows.push_back(std::move(row));
    return report;
}

EvalReport Experiment::run_iteration_profile()
{
    EvalReport report{"iterations", config_, {}};
    std::vector<std::string> iterative;
    for (const auto &name : config_.estimators)
        if (parse_estimator(name).iterative())
            iterative.push_back(name);
    if (iterative.empty())
        throw std::invalid_argument("iteration profile: no EM-type estimator requested");
    for (double snr : config_.profile_snr_db)
        for (auto &row : evaluate_point(snr, config_.n_pilots, iterative, config_.components))
            report.rows.push_back(std::move(row));
    return report;
}

} // namespace qcest
