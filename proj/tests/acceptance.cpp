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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include "qcest/baselines.hpp"
#include "qcest/eval_harness.hpp"
#include "test_util.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace qcest;

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome
{
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string &what)
    {
        if (!ok)
        {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

int g_failures = 0;

void report(int id, const std::string &title, const std::function<void(Outcome &)> &body)
{
    Outcome out;
    const auto t0 = Clock::now();
    try
    {
        body(out);
    }
    catch (const std::exception &ex)
    {
        out.pass = false;
        out.detail << " [exception: " << ex.what() << "]";
    }
    g_failures += out.pass ? 0 : 1;
    std::printf("criterion %2d: %s  %s (%.1f s)%s\n", id, out.pass ? "PASS" : "FAIL", title.c_str(), seconds_since(t0),
                out.detail.str().c_str());
    std::fflush(stdout);
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

double rel(double a, double b)
{
    return std::abs(a - b) / std::abs(b);
}

// a < b with the +-1 stderr bands apart
bool strictly_less(const ReportRow &a, const ReportRow &b)
{
    return a.nmse + a.nmse_stderr < b.nmse - b.nmse_stderr;
}

const ReportRow &row(const EvalReport &r, const std::string &name, double snr, int pilots, int k = -1)
{
    const ReportRow *p = r.find(name, snr, pilots, k);
    if (!p)
        throw std::runtime_error("missing row " + name + " at " + fmt(snr) + " dB");
    if (p->status != "ok")
        throw std::runtime_error(name + " at " + fmt(snr) + " dB: " + p->status);
    return *p;
}

bool nondecreasing(const std::vector<double> &v, double slack)
{
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] < v[i - 1] - slack * std::max(1.0, std::abs(v[i - 1])))
            return false;
    return true;
}

void crit_estep_oracle(Outcome &out)
{
    const auto t0 = Clock::now();
    Rng rng = make_stream(2001, {});
    const int samples = 10000000;
    struct Triple
    {
        double b, sigma, sign;
    };
    for (const Triple &t : {Triple{0.5, 1.0, 1.0}, Triple{0.5, 1.0, -1.0}, Triple{-2.0, 0.5, 1.0}})
    {
        const PilotSystem sys(CVector::Ones(1), 1, t.sigma * t.sigma);
        const double s = 1.0 / std::sqrt(2.0);
        const QuantizedObservation obs{CVector::Constant(1, cdouble(t.sign * s, t.sign * s))};
        const double closed = e_step(sys, obs, CVector::Constant(1, cdouble(t.b, t.b)))[0].real();
        double sum = 0.0;
        double sum2 = 0.0;
        for (int i = 0; i < samples; ++i)
        {
            const double x = test::truncated_normal(rng, t.b, t.sigma / std::sqrt(2.0), t.sign);
            sum += x;
            sum2 += x * x;
        }
        const double mean = sum / samples;
        const double se = std::sqrt((sum2 / samples - mean * mean) / samples);
        const double z = (closed - mean) / se;
        out.detail << " z=" << fmt(z);
        out.require(std::abs(z) < 3.0, "E-step off by more than 3 MC sigma");
    }
    out.require(seconds_since(t0) < 60.0, "runtime");
}

void crit_arcsine_oracle(Outcome &out)
{
    const auto t0 = Clock::now();
    Rng rng = make_stream(2002, {});
    const int n = 4;
    const PilotSystem sys = PilotSystem::designed(n, 2, 0.3);
    const std::vector<CMatrix> cys = {
        sys.observation_covariance(test::random_psd(rng, n)),
        sys.with_noise_var(0.05).observation_covariance(
            build_covariance(ClusterParams{{0.4, -0.5}, {0.6, 0.4}, 0.035}, n).matrix)};
    const int samples = 10000000;
    int checked = 0;
    double worst = 0.0;
    for (const CMatrix &cy : cys)
    {
        const Eigen::Index m = cy.rows();
        const CMatrix root = cy.llt().matrixL();
        const CMatrix expected = quantized_covariance(cy);
        Eigen::MatrixXd s_re = Eigen::MatrixXd::Zero(m, m), s_im = s_re, q_re = s_re, q_im = s_re;
        for (int i = 0; i < samples; ++i)
        {
            const CVector r = quantize_one_bit(root * standard_complex_normal(rng, m));
            for (Eigen::Index a = 0; a < m; ++a)
                for (Eigen::Index b = a + 1; b < m; ++b)
                {
                    const cdouble v = r[a] * std::conj(r[b]);
                    s_re(a, b) += v.real();
                    s_im(a, b) += v.imag();
                    q_re(a, b) += v.real() * v.real();
                    q_im(a, b) += v.imag() * v.imag();
                }
        }
        for (Eigen::Index a = 0; a < m; ++a)
        {
            // diagonal entries are exactly one
            out.require(std::abs(expected(a, a) - 1.0) < 1e-14, "unit diagonal");
            for (Eigen::Index b = a + 1; b < m; ++b)
            {
                const double mr = s_re(a, b) / samples;
                const double mi = s_im(a, b) / samples;
                const double se_r = std::sqrt((q_re(a, b) / samples - mr * mr) / samples);
                const double se_i = std::sqrt((q_im(a, b) / samples - mi * mi) / samples);
                const double zr = std::abs(expected(a, b).real() - mr) / se_r;
                const double zi = std::abs(expected(a, b).imag() - mi) / se_i;
                worst = std::max({worst, zr, zi});
                checked += 2;
                out.require(zr < 3.0 && zi < 3.0, "entry (" + std::to_string(a) + "," + std::to_string(b) +
                                                      ") off by " + fmt(std::max(zr, zi)) + " sigma");
            }
        }
    }
    out.detail << " " << checked << " real parts checked, max |z|=" << fmt(worst);
    out.require(seconds_since(t0) < 120.0, "runtime");
}

void crit_mstep_optimality(Outcome &out)
{
    Rng rng = make_stream(2003, {});
    std::uniform_real_distribution<double> log_noise(-3.0, 2.0);
    std::uniform_int_distribution<int> dims(1, 24);
    std::uniform_int_distribution<int> pilots(1, 16);
    double worst_grad = 0.0;
    double worst_solve = 0.0;
    for (int trial = 0; trial < 100; ++trial)
    {
        const int n = dims(rng);
        const PilotSystem sys = PilotSystem::designed(n, pilots(rng), std::pow(10.0, log_noise(rng)));
        const CMatrix c = test::random_psd(rng, n);
        const CVector y = test::random_vector(rng, sys.observation_size());
        const CVector h = m_step(sys, c, y);

        const CVector grad = 2.0 * (sys.adjoint(sys.forward(h) - y) + sys.noise_var() * c.llt().solve(h));
        worst_grad = std::max(worst_grad, grad.norm() / y.norm());

        const CMatrix a = sys.dense_operator();
        const CMatrix lhs = a.adjoint() * a + sys.noise_var() * c.inverse();
        const CVector dense = lhs.fullPivLu().solve(a.adjoint() * y);
        worst_solve = std::max(worst_solve, (h - dense).norm() / dense.norm());
    }
    out.detail << " max grad/||y||=" << fmt(worst_grad) << ", max rel diff to dense=" << fmt(worst_solve);
    out.require(worst_grad < 1e-8, "gradient");
    out.require(worst_solve < 1e-10, "dense solve");
}

void crit_gmm_training(Outcome &out, Experiment &exp)
{
    for (auto s : {CovarianceStructure::Full, CovarianceStructure::Toeplitz, CovarianceStructure::Circulant})
    {
        const GmmFitResult &fit = exp.fit(s, exp.config().components);
        out.require(nondecreasing(fit.log_likelihood, 1e-9), to_string(s) + " log-likelihood decreased");
        out.detail << " " << to_string(s) << ": " << fit.iterations << " iters";
    }

    const int n = 8;
    auto cov = [n](double angle) {
        CMatrix c = build_covariance(ClusterParams{{angle}, {1.0}, 0.1}, n).matrix;
        c.diagonal().array() += 0.05;
        return c;
    };
    const std::vector<CMatrix> truth = {cov(-0.6), cov(0.7)};
    Rng rng = make_stream(2004, {});
    const int t_count = 50000;
    CMatrix h(t_count, n);
    const CMatrix l0 = truth[0].llt().matrixL();
    const CMatrix l1 = truth[1].llt().matrixL();
    std::bernoulli_distribution second(0.6);
    for (int t = 0; t < t_count; ++t)
        h.row(t) = ((second(rng) ? l1 : l0) * standard_complex_normal(rng, n)).transpose();
    const GmmFitResult fit = fit_gmm(h, 2, CovarianceStructure::Full);
    out.require(nondecreasing(fit.log_likelihood, 1e-9), "two-component log-likelihood decreased");
    const auto &p = fit.prior;
    const double direct = std::max(test::rel_diff(p.covariance(0), truth[0]), test::rel_diff(p.covariance(1), truth[1]));
    const double swapped =
        std::max(test::rel_diff(p.covariance(1), truth[0]), test::rel_diff(p.covariance(0), truth[1]));
    out.detail << ", recovery error " << fmt(std::min(direct, swapped));
    out.require(std::min(direct, swapped) < 0.10, "two-component recovery");
}

void crit_snr_ordering(Outcome &out, const EvalReport &r)
{
    const int p = r.config.n_pilots;
    for (double snr : r.config.snr_db)
    {
        const auto &genie = row(r, "genie-em", snr, p);
        const auto &gmm = row(r, "gmm-em", snr, p);
        const auto &global = row(r, "global-em", snr, p);
        const auto &genie_bl = row(r, "genie-blmmse", snr, p);
        const auto &gmm_bl = row(r, "gmm-blmmse", snr, p);
        out.detail << " | " << fmt(snr) << " dB: genie " << fmt(genie.nmse) << ", gmm " << fmt(gmm.nmse) << ", global "
                   << fmt(global.nmse) << ", genie-bl " << fmt(genie_bl.nmse) << ", gmm-bl " << fmt(gmm_bl.nmse);
        out.require(genie.nmse <= gmm.nmse, "genie-em <= gmm-em at " + fmt(snr));
        out.require(gmm.nmse <= global.nmse, "gmm-em <= global-em at " + fmt(snr));
        if (snr >= 10.0)
        {
            out.require(strictly_less(genie, genie_bl), "genie-em < genie-blmmse at " + fmt(snr));
            out.require(strictly_less(gmm, gmm_bl), "gmm-em < gmm-blmmse at " + fmt(snr));
        }
        if (snr == -10.0)
            out.require(rel(gmm.nmse, gmm_bl.nmse) <= 0.15,
                        "gmm-em within 15% of gmm-blmmse at -10 dB (gap " + fmt(rel(gmm.nmse, gmm_bl.nmse)) + ")");
    }
}

void crit_iterations(Outcome &out, const EvalReport &r)
{
    const int p = r.config.n_pilots;
    for (const auto &name : r.config.estimators)
    {
        const auto &grid = r.config.profile_snr_db;
        std::vector<double> iters;
        for (double snr : grid)
            iters.push_back(row(r, name, snr, p).mean_iters);
        int monotone = 0;
        for (std::size_t i = 1; i < iters.size(); ++i)
            monotone += iters[i] >= iters[i - 1];
        out.detail << " | " << name << ":";
        for (double v : iters)
            out.detail << " " << fmt(v);
        out.require(iters.front() < 10.0, name + " needs >= 10 iterations at " + fmt(grid.front()) + " dB");
        const int pairs = static_cast<int>(iters.size()) - 1;
        out.require(monotone >= pairs - 1,
                    name + " monotone on only " + std::to_string(monotone) + " pairs");
    }
}

void crit_pilots(Outcome &out, const EvalReport &r)
{
    const double snr = r.config.pilot_snr_db;
    const auto &grid = r.config.pilot_grid;
    for (std::size_t i = 0; i < grid.size(); ++i)
    {
        const auto &genie = row(r, "genie-em", snr, grid[i]);
        const auto &gmm = row(r, "gmm-em", snr, grid[i]);
        out.detail << " | P=" << grid[i] << ": genie " << fmt(genie.nmse) << ", gmm " << fmt(gmm.nmse);
        out.require(rel(gmm.nmse, genie.nmse) <= 0.10,
                    "gmm-em within 10% of genie-em at P=" + std::to_string(grid[i]) + " (gap " +
                        fmt(rel(gmm.nmse, genie.nmse)) + ")");
        if (i > 0)
            for (const auto &name : {"genie-em", "gmm-em"})
                out.require(strictly_less(row(r, name, snr, grid[i]), row(r, name, snr, grid[i - 1])),
                            std::string(name) + " decreasing at P=" + std::to_string(grid[i]));
    }
}

void crit_components(Outcome &out, const EvalReport &r)
{
    const double snr = r.config.component_snr_db;
    const int p = r.config.n_pilots;
    for (int k : r.config.component_grid)
        out.detail << " K=" << k << ": " << fmt(row(r, "gmm-em", snr, p, k).nmse);
    const auto &k1 = row(r, "gmm-em", snr, p, 1);
    const auto &k16 = row(r, "gmm-em", snr, p, 16);
    const auto &k32 = row(r, "gmm-em", snr, p, 32);
    out.require(strictly_less(k16, k1), "K=16 strictly better than K=1");
    out.require((k1.nmse - k16.nmse) / k1.nmse >= 0.20, "K=1 to K=16 gain below 20%");
    out.require(rel(k32.nmse, k16.nmse) < 0.05, "K=32 vs K=16 differs by " + fmt(rel(k32.nmse, k16.nmse)));
}

void crit_structured(Outcome &out, const EvalReport &r)
{
    const int p = r.config.n_pilots;
    for (double snr : r.config.snr_db)
    {
        const double full = row(r, "gmm-em", snr, p).nmse;
        const double toep = row(r, "gmm-em-toep", snr, p).nmse;
        const double circ = row(r, "gmm-em-circ", snr, p).nmse;
        out.detail << " | " << fmt(snr) << " dB: toeplitz " << fmt(rel(toep, full)) << ", circulant "
                   << fmt(rel(circ, full));
        out.require(rel(toep, full) <= 0.10, "toeplitz at " + fmt(snr));
        out.require(rel(circ, full) <= 0.30, "circulant at " + fmt(snr));
    }
}

void crit_determinism(Outcome &out, Experiment &exp, const EvalReport &components)
{
    // Rerun from a manifest in a fresh process state: new experiment, same config.
    ExperimentConfig small = exp.config();
    small.n_train = 3000;
    small.n_test = 200;
    small.components = 8;
    small.snr_db = {-10.0, 10.0};
    small.estimators = {"genie-em", "gmm-em", "gmm-em-toep", "gmm-blmmse"};
    Experiment first(small);
    const EvalReport a = first.run_snr_sweep();
    const ExperimentConfig replay = config_from_json(a.manifest());
    Experiment second(replay);
    const EvalReport b = second.run_snr_sweep();
    std::ostringstream ca, cb;
    a.write_csv(ca);
    b.write_csv(cb);
    out.require(ca.str() == cb.str(), "CSV differs on rerun");
    out.detail << " rerun CSV " << (ca.str() == cb.str() ? "identical" : "differs");

    const std::filesystem::path path = std::filesystem::temp_directory_path() / "qcest_acceptance_prior.bin";
    for (auto s : {CovarianceStructure::Full, CovarianceStructure::Toeplitz, CovarianceStructure::Circulant})
    {
        const GmmPrior &prior = exp.prior(s, exp.config().components);
        save_prior(prior, path);
        out.require(load_prior(path) == prior, to_string(s) + " prior round trip");
    }
    std::filesystem::remove(path);

    const int p = components.config.n_pilots;
    const double snr = components.config.component_snr_db;
    const double k1 = row(components, "gmm-em", snr, p, 1).nmse;
    const double global = row(components, "global-em", snr, p, 0).nmse;
    out.detail << ", K=1 vs global " << fmt(rel(k1, global));
    out.require(rel(k1, global) <= 1e-3, "K=1 differs from global-em");
}

} // namespace

int main()
{
    const auto start = Clock::now();
    report(1, "E-step matches truncated-normal sampling", crit_estep_oracle);
    report(2, "arcsine law matches sampled quantized covariance", crit_arcsine_oracle);
    report(3, "M-step first-order optimality and dense solve", crit_mstep_optimality);

    ExperimentConfig cfg;
    cfg.estimators = {"genie-em",     "global-em", "gmm-em",      "genie-blmmse",
                      "gmm-blmmse", "gmm-em-toep", "gmm-em-circ"};
    Experiment exp(cfg);

    report(4, "GMM training monotone and recovers two components", [&](Outcome &o) { crit_gmm_training(o, exp); });

    EvalReport snr;
    const auto t_snr = Clock::now();
    report(5, "SNR sweep orderings", [&](Outcome &o) {
        snr = exp.run_snr_sweep();
        crit_snr_ordering(o, snr);
        o.require(seconds_since(t_snr) < 900.0, "runtime");
    });
    report(6, "EM iteration counts", [&](Outcome &o) {
        Experiment prof([&] {
            ExperimentConfig c = cfg;
            c.estimators = {"genie-em", "global-em", "gmm-em", "gmm-em-toep", "gmm-em-circ"};
            return c;
        }());
        // reuse the fitted priors through the shared experiment caches
        for (auto s : {CovarianceStructure::Full, CovarianceStructure::Toeplitz, CovarianceStructure::Circulant})
            prof.set_prior(exp.prior(s, cfg.components));
        crit_iterations(o, prof.run_iteration_profile());
    });
    report(7, "pilot sweep trend", [&](Outcome &o) {
        Experiment pil([&] {
            ExperimentConfig c = cfg;
            c.estimators = {"genie-em", "gmm-em"};
            return c;
        }());
        pil.set_prior(exp.prior(CovarianceStructure::Full, cfg.components));
        crit_pilots(o, pil.run_pilot_sweep());
    });
    EvalReport comp;
    report(8, "mixture size trend", [&](Outcome &o) {
        Experiment c([&] {
            ExperimentConfig k = cfg;
            k.estimators = {"global-em", "gmm-em"};
            return k;
        }());
        c.set_prior(exp.prior(CovarianceStructure::Full, cfg.components));
        comp = c.run_component_sweep();
        crit_components(o, comp);
    });
    report(9, "structured priors close to the full prior", [&](Outcome &o) { crit_structured(o, snr); });
    report(10, "determinism and plumbing", [&](Outcome &o) { crit_determinism(o, exp, comp); });

    std::printf("%d of 10 criteria failed (%.0f s total)\n", g_failures, seconds_since(start));
    return g_failures == 0 ? 0 : 1;
}
