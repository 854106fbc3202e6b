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


#include "hyperqcqp/neighborhood.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numeric>
#include <set>
#include <thread>

#include "hyperqcqp/error.hpp"
#include "hyperqcqp/ipm.hpp"
#include "hyperqcqp/mccormick.hpp"
#include "hyperqcqp/rng.hpp"

namespace hyperqcqp {

void SearchConfig::check() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("SearchConfig: alpha must lie in (0, 1)");
    if (!(alpha_ub > 0.0 && alpha_ub < 1.0))
        throw InvalidArgument("SearchConfig: alpha_ub must lie in (0, 1)");
    if (alpha > alpha_ub) throw InvalidArgument("SearchConfig: alpha must not exceed alpha_ub");
    if (rounds < 0) throw InvalidArgument("SearchConfig: rounds must be nonnegative");
    if (threads < 1) throw InvalidArgument("SearchConfig: threads must be at least 1");
}

int SearchConfig::s_max(int n) const {
    return std::max(1, static_cast<int>(std::ceil(alpha_ub * n - 1e-12)));
}

namespace {

std::vector<int> constraint_variables(const Constraint& c) {
    std::set<int> vars;
    for (const auto& t : c.terms.linear) vars.insert(t.var);
    for (const auto& t : c.terms.quadratic) {
        vars.insert(t.i);
        vars.insert(t.j);
    }
    return {vars.begin(), vars.end()};
}

std::vector<std::vector<int>> chunk(const std::vector<int>& slots, int s_max) {
    std::vector<std::vector<int>> out;
    for (std::size_t start = 0; start < slots.size(); start += static_cast<std::size_t>(s_max)) {
        const std::size_t end = std::min(slots.size(), start + static_cast<std::size_t>(s_max));
        std::vector<int> part(slots.begin() + static_cast<std::ptrdiff_t>(start),
                              slots.begin() + static_cast<std::ptrdiff_t>(end));
        std::sort(part.begin(), part.end());
        part.erase(std::unique(part.begin(), part.end()), part.end());
        out.push_back(std::move(part));
    }
    return out;
}

/// Runs fn(0..count-1) on up to `threads` workers; rethrows the exception of
/// the lowest failing index.
void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(count);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const int workers = std::min(threads, count);
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

double score(const QcqpInstance& inst, const Assignment& x) {
    return inst.sign() * evaluate(inst, x).objective;
}

const QcqpInstance& normalized(const QcqpInstance& in, QcqpInstance& storage) {
    if (in.is_normalized()) return in;
    storage = normalize(in);
    return storage;
}

}  // namespace

PartitionPlan partition_acp(const QcqpInstance& instance, int s_max, std::uint64_t seed) {
    if (s_max < 1) throw InvalidArgument("partition_acp: s_max must be at least 1");
    SplitMix64 rng(seed);
    std::vector<int> order(instance.num_constraints());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    std::vector<int> slots;
    std::vector<bool> covered(instance.num_vars(), false);
    for (int c : order) {
        std::vector<int> vars = constraint_variables(instance.constraints[c]);
        rng.shuffle(vars);
        for (int v : vars) {
            slots.push_back(v);
            covered[v] = true;
        }
    }
    std::vector<int> rest;
    for (int v = 0; v < instance.num_vars(); ++v)
        if (!covered[v]) rest.push_back(v);
    rng.shuffle(rest);
    slots.insert(slots.end(), rest.begin(), rest.end());

    PartitionPlan plan;
    plan.strategy = PartitionStrategy::acp;
    plan.neighborhoods = chunk(slots, s_max);
    return plan;
}

PartitionPlan partition_random(const QcqpInstance& instance, int s_max, std::uint64_t seed) {
    if (s_max < 1) throw InvalidArgument("partition_random: s_max must be at least 1");
    SplitMix64 rng(seed);
    std::vector<int> vars(instance.num_vars());
    std::iota(vars.begin(), vars.end(), 0);
    rng.shuffle(vars);
    PartitionPlan plan;
    plan.strategy = PartitionStrategy::random;
    plan.neighborhoods = chunk(vars, s_max);
    return plan;
}

double variable_density(const QcqpInstance& instance) {
    if (instance.num_constraints() == 0) return 0.0;
    double total = 0.0;
    for (const auto& c : instance.constraints)
        total += static_cast<double>(constraint_variables(c).size());
    return total / instance.num_constraints();
}

PartitionStrategy choose_partition(const QcqpInstance& instance, const SearchConfig& cfg) {
    if (instance.num_constraints() == 0) return PartitionStrategy::random;
    return variable_density(instance) > cfg.density_threshold ? PartitionStrategy::random
                                                              : PartitionStrategy::acp;
}

InitialResult initial_feasible(const QcqpInstance& input, const PredictionResult& prediction,
                               const SearchConfig& cfg) {
    cfg.check();
    QcqpInstance storage;
    const QcqpInstance& inst = normalized(input, storage);
    const int n = inst.num_vars();
    if (!inst.all_binary()) throw InvalidArgument("initial_feasible: instance must be all-binary");
    if (prediction.size() != n)
        throw InvalidArgument("initial_feasible: prediction length does not match variable count");

    const int cap = cfg.s_max(n);
    const std::vector<int> order = confidence_order(prediction);
    Assignment guess(n);
    for (int i = 0; i < n; ++i) guess[i] = prediction.rounded[i];

    InitialResult out;
    double alpha = cfg.alpha;
    for (int attempt = 0;; ++attempt) {
        ++out.attempts;
        const int free_target = std::min(cap, static_cast<int>(std::ceil(alpha * n - 1e-12)));
        std::vector<bool> fixed(n, false);
        for (int k = 0; k < n - free_target; ++k) fixed[order[k]] = true;

        std::vector<int> visit(inst.num_constraints());
        std::iota(visit.begin(), visit.end(), 0);
        SplitMix64 rng(derive_seed(cfg.seed, 0x1000 + static_cast<std::uint64_t>(attempt)));
        rng.shuffle(visit);
        const RepairOutcome rep = q_repair(inst, fixed, guess, cap, visit);

        if (rep.residual_violated.empty()) {
            const SubProblem sub{&inst, guess, rep.unfixed};
            SubsolveOptions opt{cfg.subsolver_budget, derive_seed(cfg.seed, 0x2000 + attempt), true};
            const SubsolveResult res = subsolve(cfg.subsolver, sub, opt);
            if (res.feasible) {
                out.feasible = true;
                out.x = res.x;
                out.objective = res.objective;
                out.alpha = alpha;
                return out;
            }
        }
        if (alpha >= cfg.alpha_ub) break;
        alpha = std::min(alpha * 1.5, cfg.alpha_ub);
    }

    // All variables free, starting from the lower-bound point.
    ++out.attempts;
    out.used_fallback = true;
    Assignment base(n);
    for (int i = 0; i < n; ++i) base[i] = inst.vars[i].lb;
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    SubsolverKind kind = cfg.subsolver;
    if (n <= 22) {
        kind = SubsolverKind::exhaustive;
    } else if (kind == SubsolverKind::exhaustive) {
        kind = SubsolverKind::tabu;
    }
    const SubProblem sub{&inst, base, all};
    const SubsolveResult res =
            subsolve(kind, sub, {cfg.subsolver_budget, derive_seed(cfg.seed, 0x3000), true});
    out.alpha = 1.0;
    if (res.feasible) {
        out.feasible = true;
        out.x = res.x;
        out.objective = res.objective;
        return out;
    }
    out.x = base;
    out.report = "initial_feasible: no feasible point found after " + std::to_string(out.attempts) +
                 " attempts including the all-free stage";
    return out;
}

Assignment solve_neighborhood(const QcqpInstance& instance, const Assignment& incumbent,
                              const std::vector<int>& neighborhood, SubsolverKind kind,
                              const Budget& budget, std::uint64_t seed) {
    if (neighborhood.empty() || budget.iterations == 0) return incumbent;
    std::vector<int> free = neighborhood;
    std::sort(free.begin(), free.end());
    free.erase(std::unique(free.begin(), free.end()), free.end());
    const SubProblem sub{&instance, incumbent, free};
    const SubsolveResult res = subsolve(kind, sub, {budget, seed, false});
    if (res.feasible && score(instance, res.x) >= score(instance, incumbent)) return res.x;
    return incumbent;
}

CrossoverResult crossover(const QcqpInstance& instance, const std::vector<int>& n1,
                          const std::vector<int>& n2, const Assignment& x1, const Assignment& x2,
                          SubsolverKind kind, int cap, const Budget& budget, std::uint64_t seed) {
    const std::vector<int>* na = &n1;
    const Assignment* xa = &x1;
    const Assignment* xb = &x2;
    if (score(instance, x2) > score(instance, x1)) {
        na = &n2;
        xa = &x2;
        xb = &x1;
    }
    const int n = instance.num_vars();
    CrossoverResult out;
    out.merged = *xb;
    for (int v : *na) out.merged[v] = (*xa)[v];

    const RepairOutcome rep = q_repair(instance, std::vector<bool>(n, true), out.merged, cap);
    out.repaired_free = rep.unfixed;
    out.x = *xa;

    Assignment candidate;
    bool have = false;
    if (rep.unfixed.empty()) {
        if (evaluate(instance, out.merged).feasible) {
            candidate = out.merged;
            have = true;
        }
    } else {
        const SubProblem sub{&instance, out.merged, rep.unfixed};
        const SubsolveResult res = subsolve(kind, sub, {budget, seed, false});
        if (res.feasible) {
            candidate = res.x;
            have = true;
        }
    }
    if (have && score(instance, candidate) >= score(instance, *xa)) {
        out.x = std::move(candidate);
        out.from_search = true;
    }
    return out;
}

IncumbentState optimize(const QcqpInstance& input, const PredictionResult& prediction,
                        const SearchConfig& cfg) {
    cfg.check();
    QcqpInstance storage;
    const QcqpInstance& inst = normalized(input, storage);
    const int n = inst.num_vars();
    const int s_max = cfg.s_max(n);
    if (cfg.subsolver == SubsolverKind::exhaustive && s_max > 22)
        throw InvalidArgument("optimize: exhaustive subsolver needs ceil(alpha_ub * n) <= 22, got " +
                              std::to_string(s_max));

    using Clock = std::chrono::steady_clock;
    const auto t0 = Clock::now();
    auto elapsed_ms = [&] {
        return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    };

    IncumbentState state;
    state.initial = initial_feasible(inst, prediction, cfg);
    if (!state.initial.feasible) throw Error(state.initial.report);
    state.x = state.initial.x;
    state.objective = evaluate(inst, state.x).objective;
    state.trace.push_back({0, elapsed_ms(), state.objective, evaluate(inst, state.x).violated_count(), 0, 0});

    for (int r = 1; r <= cfg.rounds; ++r) {
        if (cfg.time_ms >= 0 && elapsed_ms() >= static_cast<double>(cfg.time_ms)) break;
        const std::uint64_t round_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(r));
        const PartitionPlan plan = choose_partition(inst, cfg) == PartitionStrategy::acp
                                           ? partition_acp(inst, s_max, derive_seed(round_seed, 0))
                                           : partition_random(inst, s_max, derive_seed(round_seed, 0));
        const int l = static_cast<int>(plan.neighborhoods.size());

        std::vector<Assignment> solved(l);
        parallel_for(l, cfg.threads, [&](int i) {
            solved[i] = solve_neighborhood(inst, state.x, plan.neighborhoods[i], cfg.subsolver,
                                           cfg.subsolver_budget,
                                           derive_seed(round_seed, 1 + static_cast<std::uint64_t>(i)));
        });

        const int pairs = l / 2;
        std::vector<Assignment> crossed(pairs);
        parallel_for(pairs, cfg.threads, [&](int i) {
            crossed[i] = crossover(inst, plan.neighborhoods[2 * i], plan.neighborhoods[2 * i + 1],
                                   solved[2 * i], solved[2 * i + 1], cfg.subsolver, s_max,
                                   cfg.subsolver_budget,
                                   derive_seed(round_seed, 0x10000 + static_cast<std::uint64_t>(i)))
                                 .x;
        });

        std::vector<const Assignment*> candidates;
        for (const auto& x : crossed) candidates.push_back(&x);
        if (l % 2 == 1) candidates.push_back(&solved[l - 1]);

        double best = score(inst, state.x);
        const Assignment* pick = nullptr;
        for (const Assignment* c : candidates) {
            const EvalReport rep = evaluate(inst, *c);
            if (!rep.feasible) continue;
            const double s = inst.sign() * rep.objective;
            if (s > best) {
                best = s;
                pick = c;
            }
        }
        if (pick) state.x = *pick;
        state.objective = evaluate(inst, state.x).objective;
        state.round = r;
        state.trace.push_back({r, elapsed_ms(), state.objective, evaluate(inst, state.x).violated_count(),
                               l, pairs});
    }
    return state;
}

PredictionResult relaxation_prediction(const QcqpInstance& input) {
    QcqpInstance storage;
    const QcqpInstance& inst = normalized(input, storage);
    const int n = inst.num_vars();
    std::vector<double> probs(n, 0.5);
    const BoundContext ctx = BoundContext::from_fixing(inst, std::vector<bool>(n, false), Assignment(n, 0.0));
    const LpDescription lp = linearize_subproblem(inst, ctx, {.linearize_objective = true});
    const StdFormMap map = qp_from_lp(lp);
    if (!map.trivially_infeasible && map.qp.n() > 0) {
        IpmConfig cfg;
        cfg.solver = KktSolver::primal_normal;
        cfg.adaptive_mu = true;
        const IpmResult res = ipm_solve(map.qp, cfg);
        if (res.x.allFinite()) {
            const std::vector<double> cols = map.recover(res.x);
            for (int i = 0; i < n; ++i) {
                const double span = inst.vars[i].ub - inst.vars[i].lb;
                const double v = span > 0 ? (cols[i] - inst.vars[i].lb) / span : 0.5;
                probs[i] = std::clamp(v, 0.0, 1.0);
            }
        }
    }
    return PredictionResult::from_probs(std::move(probs));
}

std::string trace_to_csv(const std::vector<TraceRow>& rows) {
    std::string out = std::string(kTraceHeader) + "\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%d,%.3f,%.17g,%d,%d,%d\n", r.round, r.wall_ms, r.objective,
                      r.violated_constraints, r.neighborhoods, r.crossovers);
        out += buf;
    }
    return out;
}

}  // namespace hyperqcqp
