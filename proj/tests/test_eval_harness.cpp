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
#include "test_util.hpp"

#include <doctest.h>

#include <chrono>
#include <cmath>
#include <sstream>

using namespace qcest;

namespace
{

ExperimentConfig small_config()
{
    ExperimentConfig cfg;
    cfg.n_antennas = 8;
    cfg.n_pilots = 4;
    cfg.n_train = 2000;
    cfg.n_test = 100;
    cfg.components = 4;
    cfg.snr_db = {0.0, 10.0};
    cfg.seed = 5;
    cfg.fit.max_iters = 50;
    return cfg;
}

std::vector<std::string> split(const std::string &line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ','))
        out.push_back(field);
    return out;
}

std::string csv(const EvalReport &r)
{
    std::ostringstream out;
    r.write_csv(out);
    return out.str();
}

} // namespace

TEST_CASE("nmse")
{
    CMatrix truth(2, 2);
    truth << 1.0, 0.0, 0.0, 2.0;
    CHECK(nmse(truth, truth).nmse == 0.0);
    CHECK(nmse(truth, truth).stderr_ == 0.0);
    CHECK(nmse(truth, CMatrix::Zero(2, 2)).nmse == 1.0);

    CMatrix est(2, 2);
    est << 0.0, 0.0, 0.0, 1.0;
    // errors (1, 1), energies (1, 4); leave-one-out ratios 1/4 and 1
    const NmseEstimate e = nmse(truth, est);
    CHECK(e.nmse == doctest::Approx(0.4));
    CHECK(e.stderr_ == doctest::Approx(0.375));

    CHECK_THROWS_AS(nmse(CMatrix(0, 2), CMatrix(0, 2)), std::invalid_argument);
    CHECK_THROWS_AS(nmse(truth, CMatrix::Zero(3, 2)), std::invalid_argument);
    CHECK_THROWS_AS(nmse(CMatrix::Zero(2, 2), truth), std::invalid_argument);

    SUBCASE("jackknife error tracks the spread of independent replicates")
    {
        Rng rng = make_stream(111, {});
        std::vector<double> reps;
        double se = 0.0;
        for (int r = 0; r < 200; ++r)
        {
            CMatrix h(200, 4);
            CMatrix hh(200, 4);
            for (Eigen::Index t = 0; t < 200; ++t)
            {
                const CVector x = standard_complex_normal(rng, 4);
                h.row(t) = x.transpose();
                hh.row(t) = (0.7 * x + 0.5 * standard_complex_normal(rng, 4)).transpose();
            }
            const NmseEstimate v = nmse(h, hh);
            reps.push_back(v.nmse);
            se += v.stderr_ / 200.0;
        }
        double mean = 0.0;
        for (double v : reps)
            mean += v / 200.0;
        double var = 0.0;
        for (double v : reps)
            var += (v - mean) * (v - mean) / 199.0;
        CHECK(se == doctest::Approx(std::sqrt(var)).epsilon(0.15));
    }
}

TEST_CASE("configuration")
{
    ExperimentConfig cfg = small_config();
    cfg.estimators = {"ls", "gmm-em-circ"};
    cfg.record_timing = true;
    const nlohmann::json j = to_json(cfg);
    const ExperimentConfig back = config_from_json(j);
    CHECK(to_json(back) == j);
    CHECK(config_from_json(nlohmann::json{{"config", j}}).n_antennas == 8);

    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"n_antenas", 4}}), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"em", {{"tol", 1.0}}}}), std::invalid_argument);
    CHECK_THROWS(config_from_json(nlohmann::json{{"n_antennas", "many"}}));

    auto bad = [](auto mutate) {
        ExperimentConfig c = small_config();
        mutate(c);
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    };
    bad([](ExperimentConfig &c) { c.n_antennas = 0; });
    bad([](ExperimentConfig &c) { c.n_pilots = 0; });
    bad([](ExperimentConfig &c) { c.n_train = 0; });
    bad([](ExperimentConfig &c) { c.components = 0; });
    bad([](ExperimentConfig &c) { c.snr_db.clear(); });
    bad([](ExperimentConfig &c) { c.estimators = {"magic"}; });
    bad([](ExperimentConfig &c) { c.angle_spread_deg = -1.0; });
    bad([](ExperimentConfig &c) { c.em.rel_tol = 0.0; });
    small_config().validate();

    for (const auto &name : registered_estimators())
        CHECK(!name.empty());
    CHECK(small_config().channel_model().angle_spread == doctest::Approx(2.0 * M_PI / 180.0));
}

TEST_CASE("reports")
{
    ExperimentConfig cfg = small_config();
    cfg.estimators = {"ls", "global-em", "gmm-em", "genie-blmmse", "em-gm-gamp"};
    Experiment exp(cfg);
    const EvalReport r = exp.run_snr_sweep();

    SUBCASE("schema")
    {
        std::istringstream in(csv(r));
        std::string line;
        std::getline(in, line);
        CHECK(line == "estimator,snr_db,n_pilots,k_components,nmse,nmse_stderr,mean_iters,conv_rate,wall_ms,status");
        int rows = 0;
        while (std::getline(in, line))
        {
            const auto f = split(line);
            REQUIRE(f.size() == 10);
            CHECK(f[8] == "NA");
            ++rows;
        }
        CHECK(rows == 10);
        const ReportRow *ls = r.find("ls", 0.0, 4);
        REQUIRE(ls);
        CHECK(ls->k_components == 0);
        CHECK(std::isnan(ls->mean_iters));
        CHECK(ls->status == "ok");
        CHECK(ls->nmse > 0.0);
        CHECK(std::isfinite(ls->nmse_stderr));
        const ReportRow *gmm = r.find("gmm-em", 10.0, 4);
        REQUIRE(gmm);
        CHECK(gmm->k_components == 4);
        CHECK(gmm->mean_iters >= 1.0);
        CHECK(gmm->conv_rate > 0.9);
        const ReportRow *gamp = r.find("em-gm-gamp", 0.0, 4);
        REQUIRE(gamp);
        CHECK(gamp->status == "unavailable: not implemented");
        CHECK(std::isnan(gamp->nmse));
    }
    SUBCASE("estimators at one point share observations")
    {
        for (double snr : cfg.snr_db)
        {
            const std::uint64_t h = r.find("ls", snr, 4)->observation_hash;
            for (const auto &name : {"global-em", "gmm-em", "genie-blmmse"})
                CHECK(r.find(name, snr, 4)->observation_hash == h);
        }
        CHECK(r.find("ls", 0.0, 4)->observation_hash != r.find("ls", 10.0, 4)->observation_hash);
    }
    SUBCASE("reruns are byte identical")
    {
        Experiment again(cfg);
        CHECK(csv(again.run_snr_sweep()) == csv(r));
        CHECK(r.manifest().at("config") == to_json(cfg));
        CHECK(r.manifest().at("sweep") == "snr");
        CHECK(config_from_json(r.manifest()).seed == cfg.seed);
    }
    SUBCASE("informed estimators beat least squares")
    {
        for (double snr : cfg.snr_db)
        {
            CHECK(r.find("genie-blmmse", snr, 4)->nmse < r.find("ls", snr, 4)->nmse);
            CHECK(r.find("gmm-em", snr, 4)->nmse < r.find("global-em", snr, 4)->nmse * 1.05);
        }
    }
}

TEST_CASE("sweeps and failure rows")
{
    ExperimentConfig cfg = small_config();
    cfg.estimators = {"global-em", "gmm-em", "genie-em"};
    cfg.component_grid = {1, 2};
    cfg.pilot_grid = {2, 32};
    cfg.profile_snr_db = {-10.0, 10.0};
    Experiment exp(cfg);

    SUBCASE("one component equals the global Gaussian")
    {
        const EvalReport r = exp.run_component_sweep();
        const ReportRow *global = r.find("global-em", 10.0, 4, 0);
        const ReportRow *one = r.find("gmm-em", 10.0, 4, 1);
        REQUIRE(global);
        REQUIRE(one);
        CHECK(std::abs(one->nmse - global->nmse) <= 1e-3 * global->nmse);
        CHECK(r.find("gmm-em", 10.0, 4, 2));
        CHECK(r.find("genie-em", 10.0, 4, 0));
    }
    SUBCASE("pilot extremes")
    {
        const EvalReport r = exp.run_pilot_sweep();
        for (int p : {2, 32})
            for (const auto &name : cfg.estimators)
            {
                const ReportRow *row = r.find(name, cfg.pilot_snr_db, p);
                REQUIRE(row);
                CHECK(row->status == "ok");
                CHECK(std::isfinite(row->nmse));
            }
    }
    SUBCASE("iteration profile")
    {
        const EvalReport r = exp.run_iteration_profile();
        for (const auto &row : r.rows)
        {
            CHECK(row.mean_iters < cfg.em.max_iters);
            CHECK(row.mean_iters >= 1.0);
        }
        Experiment none([&] {
            ExperimentConfig c = cfg;
            c.estimators = {"ls", "gmm-blmmse"};
            return c;
        }());
        CHECK_THROWS_AS(none.run_iteration_profile(), std::invalid_argument);
    }
    SUBCASE("missing genie information becomes an error row")
    {
        ChannelModelConfig model = cfg.channel_model();
        exp.set_test(generate_dataset(99, 20, model, false));
        const auto rows = exp.evaluate_point(10.0, 4, {"genie-em", "global-em"}, 2);
        REQUIRE(rows.size() == 2);
        CHECK(rows[0].status.rfind("error: ", 0) == 0);
        CHECK(std::isnan(rows[0].nmse));
        CHECK(rows[1].status == "ok");
    }
    SUBCASE("a supplied prior replaces the fitted one")
    {
        const GmmPrior p = GmmPrior::full(RVector::Ones(1), {exp.sample_cov()});
        exp.set_prior(p);
        CHECK(exp.prior(CovarianceStructure::Full, 1) == p);
        const auto rows = exp.evaluate_point(10.0, 4, {"gmm-em", "global-em"}, 1);
        CHECK(std::abs(rows[0].nmse - rows[1].nmse) <= 1e-3 * rows[1].nmse);
    }
}

TEST_CASE("circulant M-step filter is cheaper than the dense one")
{
    Rng rng = make_stream(112, {});
    for (int n : {64, 128})
    {
        const SpectralTransform tf(CovarianceStructure::Circulant, n);
        RVector spectrum = RVector::Ones(n) + RVector::Random(n).cwiseAbs();
        const PilotSystem sys = PilotSystem::designed(n, 4, 0.5);
        const MStepFilter fast(tf, spectrum, sys);
        const MStepFilter dense(tf.covariance(spectrum), sys);
        std::vector<CVector> inputs;
        for (int i = 0; i < 200; ++i)
            inputs.push_back(test::random_vector(rng, n));

        auto time = [&](const MStepFilter &f) {
            double best = 1e300;
            for (int rep = 0; rep < 5; ++rep)
            {
                const auto t0 = std::chrono::steady_clock::now();
                double sink = 0.0;
                for (const auto &x : inputs)
                    sink += f.apply(x)[0].real();
                const auto t1 = std::chrono::steady_clock::now();
                CHECK(std::isfinite(sink));
                best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
            }
            return best;
        };
        const double t_fast = time(fast);
        const double t_dense = time(dense);
        MESSAGE("N = " << n << ": spectral " << t_fast * 1e6 / 200 << " us, dense " << t_dense * 1e6 / 200 << " us");
        CHECK(t_fast < t_dense);
    }
}
