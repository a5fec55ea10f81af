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

#include "qcest/dataset_io.hpp"
#include "qcest/eval_harness.hpp"
#include "qcest/gmm_prior.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>

namespace fs = std::filesystem;
using namespace qcest;

namespace
{

struct ConfigOptions
{
    std::string config_file;
    std::optional<std::uint64_t> seed;
    std::optional<int> n_antennas;
    std::optional<int> n_pilots;
    std::optional<int> n_clusters;
    std::optional<int> n_train;
    std::optional<int> n_test;
    std::optional<int> components;
    std::optional<double> angle_spread;
    std::vector<double> snr;
    std::vector<std::string> estimators;
    std::vector<int> pilot_grid;
    std::vector<int> component_grid;
    std::optional<int> em_max_iters;
    std::optional<double> em_tol;
    bool record_timing = false;

    void add_to(CLI::App &app)
    {
        app.add_option("-c,--config", config_file, "JSON config file (or a run manifest)");
        app.add_option("--seed", seed, "Master seed");
        app.add_option("--antennas", n_antennas, "Number of receive antennas N");
        app.add_option("--pilots", n_pilots, "Number of pilots P");
        app.add_option("--clusters", n_clusters, "Propagation clusters per channel");
        app.add_option("--n-train", n_train, "Training set size");
        app.add_option("--n-test", n_test, "Test set size");
        app.add_option("-K,--components", components, "GMM components");
        app.add_option("--angle-spread", angle_spread, "Per-cluster angle spread in degrees");
        app.add_option("--snr", snr, "SNR grid in dB");
        app.add_option("-e,--estimators", estimators, "Estimators to run");
        app.add_option("--pilot-grid", pilot_grid, "Pilot counts for the pilot sweep");
        app.add_option("--component-grid", component_grid, "Component counts for the component sweep");
        app.add_option("--em-max-iters", em_max_iters, "EM iteration cap");
        app.add_option("--em-tol", em_tol, "EM relative stopping tolerance");
        app.add_flag("--timing", record_timing, "Record wall-clock time per estimate");
    }

    ExperimentConfig resolve() const
    {
        ExperimentConfig c;
        if (!config_file.empty())
        {
            std::ifstream in(config_file);
            if (!in)
                throw std::runtime_error("cannot open config file '" + config_file + "'");
            nlohmann::json j;
            try
            {
                in >> j;
            }
            catch (const nlohmann::json::exception &e)
            {
                throw std::runtime_error("config file '" + config_file + "': " + e.what());
            }
            c = config_from_json(j, c);
        }
        if (seed)
            c.seed = *seed;
        if (n_antennas)
            c.n_antennas = *n_antennas;
        if (n_pilots)
            c.n_pilots = *n_pilots;
        if (n_clusters)
            c.n_clusters = *n_clusters;
        if (n_train)
            c.n_train = *n_train;
        if (n_test)
            c.n_test = *n_test;
        if (components)
            c.components = *components;
        if (angle_spread)
            c.angle_spread_deg = *angle_spread;
        if (!snr.empty())
        {
            c.snr_db = snr;
            c.profile_snr_db = snr;
            c.pilot_snr_db = snr.front();
            c.component_snr_db = snr.front();
        }
        if (!estimators.empty())
            c.estimators = estimators;
        if (!pilot_grid.empty())
            c.pilot_grid = pilot_grid;
        if (!component_grid.empty())
            c.component_grid = component_grid;
        if (em_max_iters)
            c.em.max_iters = *em_max_iters;
        if (em_tol)
            c.em.rel_tol = *em_tol;
        if (record_timing)
            c.record_timing = true;
        c.validate();
        return c;
    }
};

struct DataOptions
{
    std::string train_file;
    std::string test_file;
    std::string prior_file;

    void add_to(CLI::App &app)
    {
        app.add_option("--train-data", train_file, "Training dataset file (generated when omitted)");
        app.add_option("--test-data", test_file, "Test dataset file with genie covariances (generated when omitted)");
        app.add_option("--prior", prior_file, "Fitted prior file used for the GMM estimators");
    }

    std::optional<GmmPrior> load_prior_file() const
    {
        if (prior_file.empty())
            return std::nullopt;
        return load_prior(require(prior_file));
    }

    void apply(Experiment &exp, const std::optional<GmmPrior> &prior) const
    {
        if (!train_file.empty())
            exp.set_train(load_dataset(require(train_file)));
        if (!test_file.empty())
            exp.set_test(load_dataset(require(test_file)));
        if (prior)
            exp.set_prior(*prior);
    }

    static fs::path require(const std::string &path)
    {
        if (!fs::exists(path))
            throw std::runtime_error("input file '" + path + "' does not exist");
        return path;
    }
};

struct OutputOptions
{
    std::string csv = "-";
    std::string manifest;

    void add_to(CLI::App &app)
    {
        app.add_option("-o,--out", csv, "CSV output path ('-' for stdout)");
        app.add_option("--manifest", manifest, "Run-manifest path (default: <out>.manifest.json)");
    }

    void write(const EvalReport &report) const
    {
        if (csv == "-")
            report.write_csv(std::cout);
        else
        {
            std::ofstream out(csv, std::ios::binary);
            if (!out)
                throw std::runtime_error("cannot write '" + csv + "'");
            report.write_csv(out);
        }
        std::string manifest_path = manifest;
        if (manifest_path.empty() && csv != "-")
            manifest_path = csv + ".manifest.json";
        if (!manifest_path.empty())
        {
            std::ofstream out(manifest_path, std::ios::binary);
            if (!out)
                throw std::runtime_error("cannot write '" + manifest_path + "'");
            out << report.manifest().dump(2) << '\n';
        }
    }
};

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"qcest: channel estimation for one-bit quantized MIMO receivers"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    // generate-dataset
    auto *gen = app.add_subcommand("generate-dataset", "Simulate channels and write a dataset file");
    std::string gen_out;
    int gen_n = 1000;
    std::uint64_t gen_seed = 1;
    int gen_antennas = 16;
    int gen_clusters = 1;
    double gen_spread = 2.0;
    bool gen_genie = false;
    std::optional<double> gen_snr;
    int gen_pilots = 8;
    gen->add_option("-o,--out", gen_out, "Output file")->required();
    gen->add_option("-n,--samples", gen_n, "Number of channel samples");
    gen->add_option("--seed", gen_seed, "Seed");
    gen->add_option("--antennas", gen_antennas, "Number of receive antennas N");
    gen->add_option("--clusters", gen_clusters, "Propagation clusters per channel");
    gen->add_option("--angle-spread", gen_spread, "Per-cluster angle spread in degrees");
    gen->add_flag("--genie", gen_genie, "Store per-sample cluster parameters and covariances");
    gen->add_option("--observe-snr", gen_snr, "Also store one-bit observations at this SNR (dB)");
    gen->add_option("--pilots", gen_pilots, "Pilot count for stored observations");

    // fit-prior
    auto *fitc = app.add_subcommand("fit-prior", "Fit a Gaussian-mixture prior to a dataset");
    std::string fit_data;
    std::string fit_out;
    int fit_k = 16;
    std::string fit_structure = "full";
    GmmFitConfig fit_cfg;
    fitc->add_option("-d,--data", fit_data, "Training dataset file")->required();
    fitc->add_option("-o,--out", fit_out, "Output prior file")->required();
    fitc->add_option("-K,--components", fit_k, "Number of components");
    fitc->add_option("-s,--structure", fit_structure, "full, toeplitz or circulant");
    fitc->add_option("--seed", fit_cfg.seed, "Initialization seed");
    fitc->add_option("--max-iters", fit_cfg.max_iters, "Iteration cap");
    fitc->add_option("--tol", fit_cfg.tol, "Relative log-likelihood tolerance");
    fitc->add_option("--loading", fit_cfg.loading, "Relative diagonal loading");

    // eval and sweeps share config, data and output options
    ConfigOptions cfg_opts;
    DataOptions data_opts;
    OutputOptions out_opts;
    auto *eval = app.add_subcommand("eval", "Evaluate estimators at one SNR and pilot count");
    auto *sweep_snr = app.add_subcommand("sweep-snr", "NMSE over the SNR grid");
    auto *sweep_pilots = app.add_subcommand("sweep-pilots", "NMSE over the pilot grid");
    auto *sweep_comp = app.add_subcommand("sweep-components", "NMSE over the mixture-size grid (refits per K)");
    auto *profile = app.add_subcommand("profile-iterations", "Mean EM iterations over the profile SNR grid");
    for (auto *sub : {eval, sweep_snr, sweep_pilots, sweep_comp, profile})
    {
        cfg_opts.add_to(*sub);
        data_opts.add_to(*sub);
        out_opts.add_to(*sub);
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        if (e.get_exit_code() != 0)
            std::cerr << app.help() << '\n';
        return app.exit(e);
    }

    try
    {
        if (gen->parsed())
        {
            ChannelModelConfig model{gen_antennas, gen_clusters, gen_spread * kPi / 180.0, kDefaultIntegrationGrid};
            const ChannelDataset data = generate_dataset(gen_seed, gen_n, model, gen_genie);
            if (gen_snr)
            {
                const PilotSystem system =
                    PilotSystem::designed(gen_antennas, gen_pilots, noise_variance_from_snr_db(*gen_snr));
                const ObservationBatch obs = observe_dataset(data, system, derive_seed(gen_seed, {4}));
                save_dataset(data, gen_out, &obs);
            }
            else
                save_dataset(data, gen_out);
            std::cerr << "wrote " << gen_n << " samples to " << gen_out << '\n';
        }
        else if (fitc->parsed())
        {
            const ChannelDataset data = load_dataset(DataOptions::require(fit_data));
            const GmmFitResult fit = fit_gmm(data, fit_k, parse_structure(fit_structure), fit_cfg);
            save_prior(fit.prior, fit_out);
            std::cerr << "fit K=" << fit_k << " (" << fit_structure << "): " << fit.iterations << " iterations, "
                      << (fit.converged ? "converged" : "not converged") << ", mean log-likelihood "
                      << (fit.log_likelihood.empty() ? 0.0 : fit.log_likelihood.back()) << '\n';
        }
        else
        {
            ExperimentConfig config = cfg_opts.resolve();
            const std::optional<GmmPrior> prior = data_opts.load_prior_file();
            if (prior && !cfg_opts.components)
                config.components = prior->n_components();
            else if (prior && prior->n_components() != config.components)
                throw std::runtime_error("prior file has " + std::to_string(prior->n_components()) +
                                         " components but " + std::to_string(config.components) + " were requested");
            Experiment exp(config);
            data_opts.apply(exp, prior);
            EvalReport report;
            if (eval->parsed())
            {
                const ExperimentConfig &c = exp.config();
                report = EvalReport{"eval", c, exp.evaluate_point(c.snr_db.front(), c.n_pilots, c.estimators, c.components)};
            }
            else if (sweep_snr->parsed())
                report = exp.run_snr_sweep();
            else if (sweep_pilots->parsed())
                report = exp.run_pilot_sweep();
            else if (sweep_comp->parsed())
                report = exp.run_component_sweep();
            else
                report = exp.run_iteration_profile();
            out_opts.write(report);
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "qcest: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
