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


#include "hyperqcqp/subsolvers.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <queue>

#include "hyperqcqp/error.hpp"
#include "hyperqcqp/ipm.hpp"
#include "hyperqcqp/mccormick.hpp"
#include "hyperqcqp/rng.hpp"

namespace hyperqcqp {

SubsolverKind parse_subsolver(const std::string& name) {
    if (name == "exhaustive") return SubsolverKind::exhaustive;
    if (name == "tabu") return SubsolverKind::tabu;
    if (name == "bnb") return SubsolverKind::bnb;
    throw InvalidArgument("unknown subsolver '" + name + "' (expected exhaustive, tabu or bnb)");
}

std::string to_string(SubsolverKind kind) {
    switch (kind) {
        case SubsolverKind::exhaustive: return "exhaustive";
        case SubsolverKind::tabu: return "tabu";
        case SubsolverKind::bnb: return "bnb";
    }
    return "unknown";
}

void SubProblem::check() const {
    if (instance == nullptr) throw InvalidArgument("SubProblem: no instance");
    if (!instance->is_normalized()) throw InvalidArgument("SubProblem: instance must be normalized");
    const int n = instance->num_vars();
    if (static_cast<int>(base.size()) != n)
        throw InvalidArgument("SubProblem: base length does not match variable count");
    int prev = -1;
    for (int v : free) {
        if (v <= prev || v >= n) throw InvalidArgument("SubProblem: free set must be ascending and in range");
        if (instance->vars[v].type != VarType::binary)
            throw InvalidArgument("SubProblem: free variable " + std::to_string(v) + " is not binary");
        prev = v;
    }
}

// ---------------------------------------------------------------------------
// DeltaEvaluator

DeltaEvaluator::DeltaEvaluator(const QcqpInstance& instance, Assignment x)
        : inst_(instance), x_(std::move(x)) {
    const int n = inst_.num_vars();
    if (static_cast<int>(x_.size()) != n)
        throw InvalidArgument("DeltaEvaluator: assignment length does not match variable count");

    struct Acc {
        double lin = 0.0;
        std::vector<std::pair<int, double>> partners;
    };
    std::vector<std::map<int, Acc>> acc(n);
    auto add_terms = [&](int row, const TermList& terms) {
        for (const auto& t : terms.linear) acc[t.var][row].lin += t.coef;
        for (const auto& t : terms.quadratic) {
            if (t.is_square()) {
                acc[t.i][row].lin += t.coef;
            } else {
                acc[t.i][row].partners.emplace_back(t.j, t.coef);
                acc[t.j][row].partners.emplace_back(t.i, t.coef);
            }
        }
    };
    add_terms(-1, inst_.objective);
    for (int r = 0; r < inst_.num_constraints(); ++r) add_terms(r, inst_.constraints[r].terms);

    touches_.resize(n);
    for (int k = 0; k < n; ++k) {
        for (auto& [row, a] : acc[k]) {
            Touch t{row, a.lin, static_cast<int>(partners_.size()),
                    static_cast<int>(a.partners.size())};
            partners_.insert(partners_.end(), a.partners.begin(), a.partners.end());
            touches_[k].push_back(t);
        }
    }
    refresh();
}

void DeltaEvaluator::refresh() {
    objective_ = inst_.objective.value(x_);
    activity_.resize(inst_.num_constraints());
    violation_ = 0.0;
    for (int r = 0; r < inst_.num_constraints(); ++r) {
        activity_[r] = activity(inst_.constraints[r], x_);
        violation_ += std::max(activity_[r] - inst_.constraints[r].rhs, 0.0);
    }
}

void DeltaEvaluator::reset(const Assignment& x) {
    x_ = x;
    refresh();
}

bool DeltaEvaluator::feasible(double tol) const noexcept {
    for (int r = 0; r < inst_.num_constraints(); ++r)
        if (activity_[r] - inst_.constraints[r].rhs > tol) return false;
    return true;
}

void DeltaEvaluator::flip_delta(int k, double& d_objective, double& d_violation) const {
    const double d = x_[k] > 0.5 ? -1.0 : 1.0;
    d_objective = 0.0;
    d_violation = 0.0;
    for (const Touch& t : touches_[k]) {
        double s = t.lin;
        for (int p = t.first_partner; p < t.first_partner + t.partner_count; ++p)
            s += partners_[p].second * x_[partners_[p].first];
        const double delta = d * s;
        if (t.row < 0) {
            d_objective += delta;
        } else {
            const double rhs = inst_.constraints[t.row].rhs;
            const double before = activity_[t.row];
            d_violation += std::max(before + delta - rhs, 0.0) - std::max(before - rhs, 0.0);
        }
    }
}

void DeltaEvaluator::flip(int k) {
    const double d = x_[k] > 0.5 ? -1.0 : 1.0;
    for (const Touch& t : touches_[k]) {
        double s = t.lin;
        for (int p = t.first_partner; p < t.first_partner + t.partner_count; ++p)
            s += partners_[p].second * x_[partners_[p].first];
        const double delta = d * s;
        if (t.row < 0) {
            objective_ += delta;
        } else {
            const double rhs = inst_.constraints[t.row].rhs;
            const double before = activity_[t.row];
            violation_ += std::max(before + delta - rhs, 0.0) - std::max(before - rhs, 0.0);
            activity_[t.row] = before + delta;
        }
    }
    x_[k] = d > 0 ? 1.0 : 0.0;
}

// ---------------------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

class Deadline {
 public:
    explicit Deadline(std::int64_t ms) : limited_(ms >= 0), end_(Clock::now() + std::chrono::milliseconds(std::max<std::int64_t>(ms, 0))) {}
    bool passed() const { return limited_ && Clock::now() >= end_; }

 private:
    bool limited_;
    Clock::time_point end_;
};

constexpr double kTieTol = 1e-9;

SubsolveResult finish(const SubProblem& sub, const Assignment& x, bool feasible, std::int64_t work) {
    SubsolveResult r;
    r.x = x;
    const EvalReport report = evaluate(*sub.instance, x);
    r.feasible = feasible && report.feasible;
    r.objective = report.objective;
    r.work = work;
    return r;
}

}  // namespace

SubsolveResult subsolve_exhaustive(const SubProblem& sub, const SubsolveOptions& opt) {
    sub.check();
    const QcqpInstance& inst = *sub.instance;
    const int f = static_cast<int>(sub.free.size());
    if (f > 22)
        throw InvalidArgument("subsolve_exhaustive: " + std::to_string(f) + " free variables exceed 22");

    if (opt.first_feasible && evaluate(inst, sub.base).feasible) return finish(sub, sub.base, true, 0);

    Assignment start = sub.base;
    for (int v : sub.free) start[v] = 0.0;
    DeltaEvaluator ev(inst, start);
    const double sign = inst.sign();
    const Deadline deadline(opt.budget.time_ms);
    const std::uint64_t total = std::uint64_t{1} << f;
    const std::uint64_t limit =
            opt.budget.iterations < 0 ? total
                                      : std::min<std::uint64_t>(total, static_cast<std::uint64_t>(opt.budget.iterations));

    bool have = false;
    double best_score = 0.0;
    std::uint64_t best_key = 0;
    Assignment best;
    std::uint64_t key = 0;
    std::uint64_t t = 0;
    bool exhausted = false;
    for (;;) {
        if (t >= limit) {
            exhausted = t < total;
            break;
        }
        if (ev.feasible()) {
            const double score = sign * ev.objective();
            const bool better = !have || score > best_score + kTieTol ||
                                (std::abs(score - best_score) <= kTieTol && key < best_key);
            if (better && evaluate(inst, ev.x()).feasible) {
                have = true;
                best_score = score;
                best_key = key;
                best = ev.x();
                if (opt.first_feasible) {
                    ++t;
                    break;
                }
            }
        }
        ++t;
        if (t == total) break;
        if ((t & 4095u) == 0) {
            ev.refresh();
            if (deadline.passed()) {
                exhausted = true;
                break;
            }
        }
        const int bit = std::countr_zero(t);
        ev.flip(sub.free[bit]);
        key ^= std::uint64_t{1} << bit;
    }
    SubsolveResult r = have ? finish(sub, best, true, static_cast<std::int64_t>(t))
                            : finish(sub, sub.base, false, static_cast<std::int64_t>(t));
    r.budget_exhausted = exhausted;
    return r;
}

SubsolveResult subsolve_tabu(const SubProblem& sub, const SubsolveOptions& opt) {
    sub.check();
    const QcqpInstance& inst = *sub.instance;
    const int f = static_cast<int>(sub.free.size());
    constexpr int kTenure = 7;
    constexpr int kStreak = 20;
    constexpr std::int64_t kRestart = 200;
    constexpr int kKick = 2;

    const bool base_feasible = evaluate(inst, sub.base).feasible;
    if (opt.first_feasible && base_feasible) return finish(sub, sub.base, true, 0);

    const std::int64_t moves = opt.budget.unlimited() ? 10000 : opt.budget.iterations;
    const Deadline deadline(opt.budget.time_ms);
    const double sign = inst.sign();
    SplitMix64 rng(opt.seed);

    DeltaEvaluator ev(inst, sub.base);
    bool have = base_feasible;
    double best_score = have ? sign * ev.objective() : 0.0;
    Assignment best = sub.base;

    std::vector<std::int64_t> tabu_until(f, -1);
    double rho = 1.0;
    int feasible_streak = 0;
    int infeasible_streak = 0;
    std::int64_t t = 0;
    std::int64_t last_improvement = 0;
    bool exhausted = false;
    for (; f > 0; ++t) {
        if (moves >= 0 && t >= moves) {
            exhausted = true;
            break;
        }
        if ((t & 255) == 0 && deadline.passed()) {
            exhausted = true;
            break;
        }
        if (have && t - last_improvement >= kRestart) {
            // Stagnation: restart from the best point with a few random flips.
            ev.reset(best);
            for (int k = 0; k < kKick; ++k) ev.flip(sub.free[rng.below(static_cast<std::uint64_t>(f))]);
            std::fill(tabu_until.begin(), tabu_until.end(), -1);
            last_improvement = t;
        } else if (t > 0 && t % 1000 == 0) {
            ev.refresh();
        }

        const double score = sign * ev.objective();
        const double viol = ev.total_violation();
        int chosen = -1;
        double chosen_value = -std::numeric_limits<double>::infinity();
        int ties = 0;
        for (int q = 0; q < f; ++q) {
            double dobj = 0.0, dviol = 0.0;
            ev.flip_delta(sub.free[q], dobj, dviol);
            const double new_score = score + sign * dobj;
            const double new_viol = std::max(viol + dviol, 0.0);
            const bool is_tabu = tabu_until[q] > t;
            if (is_tabu) {
                const bool aspiration = new_viol <= kFeasibilityTol &&
                                        (!have || new_score > best_score + kTieTol);
                if (!aspiration) continue;
            }
            const double value = new_score - rho * new_viol;
            if (chosen < 0 || value > chosen_value + 1e-12) {
                chosen = q;
                chosen_value = value;
                ties = 1;
            } else if (std::abs(value - chosen_value) <= 1e-12) {
                ++ties;
                if (rng.below(static_cast<std::uint64_t>(ties)) == 0) chosen = q;
            }
        }
        if (chosen < 0) {
            // Every move is tabu: take the one whose tenure ends first.
            chosen = static_cast<int>(std::min_element(tabu_until.begin(), tabu_until.end()) -
                                      tabu_until.begin());
        }
        ev.flip(sub.free[chosen]);
        tabu_until[chosen] = t + 1 + kTenure;

        if (ev.feasible()) {
            infeasible_streak = 0;
            if (++feasible_streak >= kStreak) {
                rho = std::max(rho * 0.5, 1e-6);
                feasible_streak = 0;
            }
            const double s = sign * ev.objective();
            if ((!have || s > best_score + kTieTol) && evaluate(inst, ev.x()).feasible) {
                have = true;
                best_score = s;
                best = ev.x();
                last_improvement = t;
                if (opt.first_feasible) {
                    ++t;
                    break;
                }
            }
        } else {
            feasible_streak = 0;
            if (++infeasible_streak >= kStreak) {
                rho = std::min(rho * 2.0, 1e9);
                infeasible_streak = 0;
            }
        }
    }
    SubsolveResult r = finish(sub, best, have, t);
    r.budget_exhausted = exhausted;
    return r;
}

// ---------------------------------------------------------------------------
// Branch and bound

namespace {

struct BnbNode {
    std::vector<signed char> decided;  // per free position: -1 open, 0 or 1
    double bound = std::numeric_limits<double>::infinity();  // score units
    std::vector<double> lp_values;  // per free position, empty if unknown
    std::uint64_t id = 0;
};

struct NodeOrder {
    bool operator()(const BnbNode& a, const BnbNode& b) const {
        if (a.bound != b.bound) return a.bound < b.bound;
        return a.id > b.id;
    }
};

struct BoundResult {
    bool infeasible = false;
    double bound = std::numeric_limits<double>::infinity();
    std::vector<double> lp_values;
};

double prune_slack(double bound) { return 1e-6 * (1.0 + std::abs(bound)); }

class BoundOracle {
 public:
    explicit BoundOracle(const SubProblem& sub) : sub_(sub) {
        ipm_.solver = KktSolver::primal_normal;
        ipm_.max_iter = 100;
        ipm_.adaptive_mu = true;
    }

    Assignment point(const std::vector<signed char>& decided) const {
        Assignment x = sub_.base;
        for (std::size_t q = 0; q < decided.size(); ++q)
            if (decided[q] >= 0) x[sub_.free[q]] = decided[q];
        return x;
    }

    BoundResult operator()(const std::vector<signed char>& decided) const {
        const QcqpInstance& inst = *sub_.instance;
        BoundContext ctx;
        ctx.lb = sub_.base;
        ctx.ub = sub_.base;
        for (std::size_t q = 0; q < decided.size(); ++q) {
            const int v = sub_.free[q];
            if (decided[q] >= 0) {
                ctx.lb[v] = ctx.ub[v] = decided[q];
            } else {
                ctx.lb[v] = inst.vars[v].lb;
                ctx.ub[v] = inst.vars[v].ub;
            }
        }
        BoundResult out;
        for (const auto& c : inst.constraints)
            if (constraint_min_activity(c, ctx) > c.rhs + kRepairTol) {
                out.infeasible = true;
                return out;
            }
        const LpDescription lp = linearize_subproblem(inst, ctx, {.linearize_objective = true});
        const StdFormMap map = qp_from_lp(lp);
        if (map.trivially_infeasible) {
            out.infeasible = true;
            return out;
        }
        if (map.qp.n() == 0) {
            out.bound = inst.sign() * map.lp_objective(Eigen::VectorXd());
            out.lp_values.assign(decided.size(), 0.0);
            const auto cols = map.recover(Eigen::VectorXd());
            for (std::size_t q = 0; q < decided.size(); ++q) out.lp_values[q] = cols[sub_.free[q]];
            return out;
        }
        const IpmResult res = ipm_solve(map.qp, ipm_);
        if (!res.converged) return out;  // unknown: keep the node with an infinite bound
        out.bound = inst.sign() * map.lp_objective(res.x);
        const auto cols = map.recover(res.x);
        out.lp_values.resize(decided.size());
        for (std::size_t q = 0; q < decided.size(); ++q) out.lp_values[q] = cols[sub_.free[q]];
        return out;
    }

 private:
    const SubProblem& sub_;
    IpmConfig ipm_;
};

}  // namespace

SubsolveResult subsolve_bnb(const SubProblem& sub, const SubsolveOptions& opt) {
    sub.check();
    const QcqpInstance& inst = *sub.instance;
    const int f = static_cast<int>(sub.free.size());
    const double sign = inst.sign();
    const Deadline deadline(opt.budget.time_ms);
    const BoundOracle bound_of(sub);

    bool have = false;
    double best_score = -std::numeric_limits<double>::infinity();
    Assignment best = sub.base;
    auto offer = [&](const Assignment& x) {
        const EvalReport rep = evaluate(inst, x);
        if (!rep.feasible) return;
        const double s = sign * rep.objective;
        if (!have || s > best_score + kTieTol) {
            have = true;
            best_score = s;
            best = x;
        }
    };
    offer(sub.base);
    if (opt.first_feasible && have) return finish(sub, best, true, 0);

    SubsolveResult result;
    std::priority_queue<BnbNode, std::vector<BnbNode>, NodeOrder> open;
    std::uint64_t next_id = 0;
    auto make_node = [&](std::vector<signed char> decided) -> std::optional<BnbNode> {
        BoundResult b = bound_of(decided);
        if (b.infeasible) return std::nullopt;
        BnbNode node{std::move(decided), b.bound, std::move(b.lp_values), next_id++};
        return node;
    };

    std::int64_t nodes = 0;
    bool exhausted = false;
    if (auto root = make_node(std::vector<signed char>(f, -1))) {
        if (std::isfinite(root->bound)) {
            result.root_bound = sign * root->bound;
            result.root_bound_valid = true;
        }
        open.push(std::move(*root));
    }
    while (!open.empty()) {
        if ((opt.budget.iterations >= 0 && nodes >= opt.budget.iterations) || deadline.passed()) {
            exhausted = true;
            break;
        }
        BnbNode node = open.top();
        open.pop();
        ++nodes;
        if (have && node.bound + prune_slack(node.bound) <= best_score) continue;

        int branch = -1;
        if (!node.lp_values.empty()) {
            // Rounded LP point as a primal heuristic.
            std::vector<signed char> rounded = node.decided;
            bool integral = true;
            double most = -1.0;
            for (int q = 0; q < f; ++q) {
                if (node.decided[q] >= 0) continue;
                const double v = node.lp_values[q];
                rounded[q] = v > 0.5 ? 1 : 0;
                const double frac = std::min(std::abs(v), std::abs(1.0 - v));
                if (frac > 1e-6) integral = false;
                if (frac > most + 1e-12) {
                    most = frac;
                    branch = q;
                }
            }
            offer(bound_of.point(rounded));
            if (opt.first_feasible && have) break;
            if (integral && have && best_score >= node.bound - prune_slack(node.bound)) continue;
        } else {
            for (int q = 0; q < f && branch < 0; ++q)
                if (node.decided[q] < 0) branch = q;
        }
        if (branch < 0) {
            offer(bound_of.point(node.decided));
            if (opt.first_feasible && have) break;
            continue;
        }
        for (const double value : {0.0, 1.0}) {
            std::vector<signed char> child = node.decided;
            child[branch] = static_cast<signed char>(value);
            if (auto c = make_node(std::move(child))) {
                if (have && c->bound + prune_slack(c->bound) <= best_score) continue;
                open.push(std::move(*c));
            }
        }
    }
    SubsolveResult r = finish(sub, best, have, nodes);
    r.budget_exhausted = exhausted;
    r.root_bound = result.root_bound;
    r.root_bound_valid = result.root_bound_valid;
    return r;
}

SubsolveResult subsolve(SubsolverKind kind, const SubProblem& sub, const SubsolveOptions& opt) {
    switch (kind) {
        case SubsolverKind::exhaustive: return subsolve_exhaustive(sub, opt);
        case SubsolverKind::tabu: return subsolve_tabu(sub, opt);
        case SubsolverKind::bnb: return subsolve_bnb(sub, opt);
    }
    throw InvalidArgument("subsolve: unknown kind");
}

}  // namespace hyperqcqp
