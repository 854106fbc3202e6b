// Copyright 2026 The hyperqcqp Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

// End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero exit
// if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "hyperqcqp/generators.hpp"
#include "hyperqcqp/hypergraph.hpp"
#include "hyperqcqp/ipm.hpp"
#include "hyperqcqp/mccormick.hpp"
#include "hyperqcqp/neighborhood.hpp"
#include "hyperqcqp/oracle.hpp"
#include "hyperqcqp/predictor.hpp"
#include "hyperqcqp/rng.hpp"
#include "hyperqcqp/subsolvers.hpp"
#include "oracles.hpp"

using namespace hyperqcqp;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void run(int id, const char* title, const std::function<Verdict()>& body) {
    const auto t0 = Clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::printf("%s %2d %s: %s (%.2f s)\n", v.pass ? "PASS" : "FAIL", id, title, v.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

bool same_objective(double a, double b) { return std::abs(a - b) <= 1e-6 * (1.0 + std::abs(b)); }

// ---------------------------------------------------------------------------

Verdict mccormick_soundness() {
    const auto t0 = Clock::now();
    SplitMix64 rng(101);
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
        double lx = rng.uniform(-5, 5), ux = rng.uniform(-5, 5);
        double ly = rng.uniform(-5, 5), uy = rng.uniform(-5, 5);
        if (lx > ux) std::swap(lx, ux);
        if (ly > uy) std::swap(ly, uy);
        const double x = lx + (ux - lx) * rng.uniform(0, 1);
        const double y = ly + (uy - ly) * rng.uniform(0, 1);
        const double xy = x * y;
        const auto box = mccormick_box(lx, ux, ly, uy);
        // The four envelope inequalities written out directly.
        const double under = std::max(lx * y + x * ly - lx * ly, ux * y + x * uy - ux * uy);
        const double over = std::min(ux * y + x * ly - ux * ly, lx * y + x * uy - lx * uy);
        worst = std::max({worst, box.lo - xy, xy - box.hi, under - xy, xy - over,
                          std::abs(mccormick_under(lx, ux, ly, uy, x, y) - under),
                          std::abs(mccormick_over(lx, ux, ly, uy, x, y) - over)});
    }
    const double t = seconds_since(t0);
    return {worst <= 1e-9 && t < 1.0, fmt("10000 samples, worst violation %.2e, %.3f s", worst, t)};
}

/// Smallest left-hand side over the box, term by term.
double min_activity_oracle(const Constraint& c, const BoundContext& ctx) {
    double s = 0.0;
    for (const auto& t : c.terms.linear) s += std::min(t.coef * ctx.lb[t.var], t.coef * ctx.ub[t.var]);
    for (const auto& q : c.terms.quadratic) {
        double lo = INFINITY;
        for (double a : {ctx.lb[q.i], ctx.ub[q.i]})
            for (double b : {ctx.lb[q.j], ctx.ub[q.j]}) lo = std::min(lo, q.coef * (q.i == q.j ? a * a : a * b));
        if (q.i == q.j && ctx.lb[q.i] < 0.0 && ctx.ub[q.i] > 0.0) lo = std::min(lo, 0.0);
        s += lo;
    }
    return s;
}

Verdict repair_soundness() {
    const auto t0 = Clock::now();
    int ok = 0, repaired = 0;
    double worst = -INFINITY;
    for (int k = 0; k < 200; ++k) {
        const auto inst = normalize(k % 2 ? gen_qmkp({.n = 30, .m = 4, .seed = 3000u + k})
                                          : gen_randqcp({.n = 30, .m = 20, .seed = 3000u + k}));
        SplitMix64 rng(derive_seed(33, k));
        std::vector<bool> fixed(30);
        Assignment values(30);
        const double p_fix = rng.uniform(0.3, 1.0);
        for (int i = 0; i < 30; ++i) {
            fixed[i] = rng.uniform(0, 1) < p_fix;
            values[i] = rng.below(2);
        }
        const auto out = q_repair(inst, fixed, values, 30);
        repaired += !out.unfixed_by_repair.empty();
        std::vector<bool> after(30, false);
        for (int i : out.fixed) after[i] = true;
        const auto ctx = BoundContext::from_fixing(inst, after, values);
        bool good = out.residual_violated.empty();
        for (const auto& c : inst.constraints) {
            const double gap = min_activity_oracle(c, ctx) - c.rhs;
            worst = std::max(worst, gap);
            good = good && gap <= 1e-9;
        }
        ok += good;
    }
    const double t = seconds_since(t0);
    return {ok == 200 && t < 10.0, fmt("%d/200 fixings sound (%d needed repair), max(min-activity - rhs) %.3g, %.2f s", ok,
                                     repaired, worst, t)};
}

// Criteria 3 and 4 share one batch.
struct OracleGapRun {
    QcqpInstance inst;
    double optimum = 0.0;
    IncumbentState state;
};

std::vector<OracleGapRun> gap_runs;
double gap_seconds = 0.0;

SearchConfig gap_config(std::uint64_t seed) {
    SearchConfig cfg;
    cfg.alpha_ub = 0.5;
    cfg.rounds = 20;
    cfg.subsolver = SubsolverKind::exhaustive;
    cfg.seed = seed;
    return cfg;
}

Verdict oracle_gap() {
    const auto t0 = Clock::now();
    int feasible = 0, within = 0, exact = 0;
    for (int fam = 0; fam < 2; ++fam)
        for (int s = 0; s < 50; ++s) {
            OracleGapRun r;
            r.inst = normalize(fam == 0 ? gen_randqcp({.n = 16, .m = 12, .seed = 1000u + s})
                                        : gen_qmkp({.n = 16, .m = 3, .seed = 2000u + s}));
            r.optimum = brute_force_oracle(r.inst).objective;
            r.state = optimize(r.inst, relaxation_prediction(r.inst), gap_config(s));
            const auto rep = evaluate(r.inst, r.state.x);
            feasible += rep.feasible;
            within += rep.feasible && rep.objective >= 0.95 * r.optimum - 1e-9;
            exact += rep.feasible && same_objective(rep.objective, r.optimum);
            gap_runs.push_back(std::move(r));
        }
    gap_seconds = seconds_since(t0);
    const bool pass = feasible == 100 && within >= 90 && exact >= 50 && gap_seconds < 300.0;
    return {pass, fmt("feasible %d/100, >=95%% of optimum %d/100, exact %d/100, %.1f s", feasible, within, exact,
                      gap_seconds)};
}

bool traces_equal(const std::vector<TraceRow>& a, const std::vector<TraceRow>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t k = 0; k < a.size(); ++k)
        if (a[k].round != b[k].round || a[k].objective != b[k].objective ||
            a[k].violated_constraints != b[k].violated_constraints || a[k].neighborhoods != b[k].neighborhoods ||
            a[k].crossovers != b[k].crossovers)
            return false;
    return true;
}

Verdict monotone_deterministic() {
    if (gap_runs.size() != 100) return {false, "criterion 3 batch missing"};
    int monotone = 0, same_serial = 0, same_pool = 0;
    for (std::size_t k = 0; k < gap_runs.size(); ++k) {
        const auto& r = gap_runs[k];
        bool mono = true;
        for (std::size_t t = 1; t < r.state.trace.size(); ++t) mono = mono && r.state.trace[t].objective >= r.state.trace[t - 1].objective;
        monotone += mono;
        const auto pred = relaxation_prediction(r.inst);
        auto cfg = gap_config(k % 50);
        const auto again = optimize(r.inst, pred, cfg);
        same_serial += traces_equal(again.trace, r.state.trace) && again.x == r.state.x;
        cfg.threads = 4;
        const auto pooled = optimize(r.inst, pred, cfg);
        same_pool += traces_equal(pooled.trace, r.state.trace) && pooled.x == r.state.x;
    }
    return {monotone == 100 && same_serial == 100 && same_pool == 100,
            fmt("monotone %d/100, rerun identical %d/100, 4-worker identical %d/100 (wall_ms excluded)", monotone,
                same_serial, same_pool)};
}

Verdict ipm_correctness() {
    const auto t0 = Clock::now();
    int ok = 0;
    double worst_kkt = 0.0, worst_obj = 0.0;
    for (int t = 0; t < 30; ++t) {
        const QpStd qp = random_convex_qp(5000 + t);
        const auto ref = testing::active_set_oracle(qp);
        const auto r = ipm_solve(qp);
        const double kkt = kkt_residuals(qp, r.state).max();
        const double gap = std::abs(r.objective - ref.objective);
        worst_kkt = std::max(worst_kkt, kkt);
        worst_obj = std::max(worst_obj, gap);
        ok += r.converged && kkt < 1e-6 && gap <= 1e-5;
    }
    const double t = seconds_since(t0);
    return {ok == 30 && t < 10.0,
            fmt("%d/30 QPs, max KKT %.2e, max |obj - active set| %.2e, %.2f s", ok, worst_kkt, worst_obj, t)};
}

Verdict mpnn_equivalence() {
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const QpStd qp = random_convex_qp(6000 + t);
        const IpmConfig cfg;
        worst = std::max(worst, trace_deviation(mpnn_emulate_ipm(qp, cfg, 30), direct_ipm_trace(qp, cfg, 30)));
    }
    return {worst < 1e-9, fmt("20 QPs x 30 iterations, max deviation %.3e", worst)};
}

Verdict gradient_check() {
    const auto inst = normalize(gen_qmkp({.n = 10, .m = 2, .edge_factor = 2.0, .seed = 77}));
    const auto h = build_hypergraph(inst, 77);
    const auto labels = brute_force_oracle(inst).x;
    const auto w = init_weights(78);
    const auto good = finite_diff_check(w, h, labels, 1e-4, 200, 5);
    const auto bad = finite_diff_check(w, h, labels, 1e-4, 200, 5, [](ModelWeights& g) {
        for (auto& layer : g.conv) layer.phi_v.layers[0].W *= 1.5;
    });
    const std::size_t blocks = w.zeros_like().blocks().size();
    const bool pass = good.max_rel_error < 1e-3 && good.blocks_checked.size() == blocks && bad.max_rel_error >= 1e-3;
    return {pass, fmt("max rel error %.2e over %d coordinates in %zu/%zu blocks; corrupted gradient %.2e", good.max_rel_error,
                      good.coordinates, good.blocks_checked.size(), blocks, bad.max_rel_error)};
}

// Criteria 8 and 9 share the trained model.
std::vector<QcqpInstance> qmkp50;
ModelWeights trained;
bool have_model = false;

Verdict training_smoke() {
    const auto t0 = Clock::now();
    // Labels come from the framework itself (tabu subsolver): n = 50 is
    // beyond enumeration.
    SearchConfig sc;
    sc.subsolver = SubsolverKind::tabu;
    sc.rounds = 10;
    sc.alpha_ub = 0.4;
    sc.subsolver_budget.iterations = 2000;
    std::vector<Sample> data;
    for (int s = 0; s < 250; ++s) {
        auto inst = normalize(gen_qmkp({.n = 50, .m = 3, .seed = 9000u + s}));
        if (s < 200) {
            sc.seed = s;
            const auto st = optimize(inst, relaxation_prediction(inst), sc);
            data.push_back({build_hypergraph(inst, s), st.x});
        }
        qmkp50.push_back(std::move(inst));
    }
    const double label_s = seconds_since(t0);
    const TrainConfig tc;  // lr 1e-4, weight decay 1e-4
    const auto tr = train(data, 30, tc, init_weights(1));
    trained = tr.weights;
    have_model = true;
    const double ratio = tr.loss_curve.back() / tr.loss_curve.front();

    const std::vector<Sample> one{data.front()};
    const auto mem = train(one, 4000, tc, init_weights(2));  // same lr and weight decay
    const double mem_loss = bce_loss(predict(mem.weights, one[0].graph).logits, one[0].labels);
    const double total = seconds_since(t0);
    const bool pass = ratio < 0.9 && mem_loss < 0.05 && total < 900.0;
    return {pass, fmt("BCE %.4f -> %.4f (ratio %.3f), memorization BCE %.4f, labels %.0f s, total %.0f s",
                      tr.loss_curve.front(), tr.loss_curve.back(), ratio, mem_loss, label_s, total)};
}

Verdict predictor_utility() {
    if (!have_model) return {false, "criterion 8 model missing"};
    SearchConfig ic;
    ic.subsolver = SubsolverKind::tabu;
    ic.alpha_ub = 0.4;
    int no_fallback = 0, at_least_zero = 0;
    for (int s = 200; s < 250; ++s) {
        const auto& inst = qmkp50[s];
        const auto r = initial_feasible(inst, predict(trained, build_hypergraph(inst, s)), ic);
        const double baseline = evaluate(inst, Assignment(inst.num_vars(), 0.0)).objective;
        no_fallback += r.feasible && !r.used_fallback;
        at_least_zero += r.feasible && r.objective >= baseline;
    }
    return {no_fallback >= 40 && at_least_zero >= 35,
            fmt("held-out 50: no fallback %d/50, objective >= all-zeros %d/50", no_fallback, at_least_zero)};
}

Verdict generator_fidelity() {
    int checked = 0, bad = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const QmkpParams qp{.n = 30, .m = 4, .seed = 700 + s};
        const auto q = gen_qmkp(qp);
        auto in_unit = [&](const TermList& t) {
            for (const auto& l : t.linear) bad += !(l.coef >= 0.0 && l.coef < 1.0);
            for (const auto& e : t.quadratic) bad += !(e.coef >= 0.0 && e.coef < 1.0);
        };
        in_unit(q.objective);
        for (const auto& c : q.constraints) {
            in_unit(c.terms);
            double sum = 0.0;
            for (const auto& t : c.terms.linear) sum += t.coef;
            bad += c.rhs != 0.5 * sum;
            ++checked;
        }
        bad += save_instance(q) != save_instance(gen_qmkp(qp));

        const RandqcpParams rp{.n = 30, .m = 20, .seed = 800 + s};
        const auto r = gen_randqcp(rp);
        in_unit(r.objective);
        for (const auto& c : r.constraints) {
            in_unit(c.terms);
            bad += c.rhs != static_cast<double>(c.terms.linear.size());
            ++checked;
        }
        bad += save_instance(r) != save_instance(gen_randqcp(rp));
    }
    return {bad == 0, fmt("%d constraints over 40 instances, %d mismatches", checked, bad)};
}

Verdict subsolver_consistency() {
    int tabu_ok = 0, bnb_ok = 0, root_ok = 0;
    for (int s = 0; s < 50; ++s) {
        const auto inst = normalize(s % 2 ? gen_qmkp({.n = 20, .m = 3, .seed = 500u + s})
                                          : gen_randqcp({.n = 20, .m = 15, .seed = 500u + s}));
        SplitMix64 rng(77 + s);
        std::vector<int> vars(20);
        std::iota(vars.begin(), vars.end(), 0);
        rng.shuffle(vars);
        std::vector<int> free(vars.begin(), vars.begin() + 14);
        std::sort(free.begin(), free.end());
        const SubProblem sub{&inst, Assignment(20, 0.0), free};
        const auto ex = subsolve_exhaustive(sub);
        const auto tb = subsolve_tabu(sub, {.budget = {.iterations = 10000}, .seed = static_cast<std::uint64_t>(s)});
        const auto bb = subsolve_bnb(sub);
        tabu_ok += tb.feasible && same_objective(tb.objective, ex.objective);
        bnb_ok += bb.feasible && same_objective(bb.objective, ex.objective);
        root_ok += bb.root_bound_valid && bb.root_bound >= ex.objective - 1e-6 * (1 + std::abs(ex.objective));
    }
    return {tabu_ok >= 40 && bnb_ok == 50 && root_ok == 50,
            fmt("tabu %d/50, bnb %d/50, root bound valid %d/50", tabu_ok, bnb_ok, root_ok)};
}

}  // namespace

int main() {
    run(1, "McCormick soundness", mccormick_soundness);
    run(2, "Q-Repair soundness", repair_soundness);
    run(3, "Oracle gap", oracle_gap);
    run(4, "Monotonicity and determinism", monotone_deterministic);
    run(5, "IPM correctness", ipm_correctness);
    run(6, "Message-passing IPM equivalence", mpnn_equivalence);
    run(7, "Gradient correctness", gradient_check);
    run(8, "Training smoke", training_smoke);
    run(9, "Predictor utility", predictor_utility);
    run(10, "Generator fidelity", generator_fidelity);
    run(11, "Subsolver consistency", subsolver_consistency);
    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
