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


#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hyperqcqp/instance.hpp"

namespace hyperqcqp {

enum class SubsolverKind { exhaustive, tabu, bnb };

SubsolverKind parse_subsolver(const std::string& name);
std::string to_string(SubsolverKind kind);

/// Work limits; a negative field is unlimited. `iterations` counts
/// enumerated points (exhaustive), moves (tabu) or nodes (bnb).
struct Budget {
    std::int64_t iterations = -1;
    std::int64_t time_ms = -1;

    bool unlimited() const noexcept { return iterations < 0 && time_ms < 0; }
};

/// Variables outside `free` are held at `base`. `instance` must be
/// normalized and outlive the subproblem; free variables must be binary.
struct SubProblem {
    const QcqpInstance* instance = nullptr;
    Assignment base;
    std::vector<int> free;  // ascending

    void check() const;
};

struct SubsolveOptions {
    Budget budget;
    std::uint64_t seed = 0;
    bool first_feasible = false;  // return as soon as any feasible point is found
};

struct SubsolveResult {
    bool feasible = false;
    Assignment x;
    double objective = 0.0;
    std::int64_t work = 0;
    bool budget_exhausted = false;
    double root_bound = 0.0;  // bnb only: root relaxation value, original sense
    bool root_bound_valid = false;
};

/// Maximization score of an objective value: sign() * objective.
inline double score_of(const QcqpInstance& inst, double objective) noexcept {
    return inst.sign() * objective;
}

/// Incremental objective and violation bookkeeping for single binary flips.
class DeltaEvaluator {
 public:
    DeltaEvaluator(const QcqpInstance& instance, Assignment x);

    const Assignment& x() const noexcept { return x_; }
    double objective() const noexcept { return objective_; }
    double total_violation() const noexcept { return violation_; }
    bool feasible(double tol = kFeasibilityTol) const noexcept;

    /// Objective and total-violation change if binary variable k flips.
    void flip_delta(int k, double& d_objective, double& d_violation) const;
    void flip(int k);

    /// Recomputes every activity from scratch (drift control).
    void refresh();

    /// Moves to `x` and recomputes everything.
    void reset(const Assignment& x);

 private:
    struct Touch {
        int row;  // -1: objective
        double lin;  // linear + square coefficient
        int first_partner;
        int partner_count;
    };

    const QcqpInstance& inst_;
    Assignment x_;
    std::vector<double> activity_;
    double objective_ = 0.0;
    double violation_ = 0.0;
    std::vector<std::vector<Touch>> touches_;
    std::vector<std::pair<int, double>> partners_;
};

/// Exact optimum over the free set by Gray-code enumeration. Scores within
/// 1e-9 count as ties and resolve to the smallest binary counter value of
/// the free assignment, reading the lowest free index as the lowest bit
/// (the oracle's order restricted to the free set). Throws InvalidArgument
/// beyond 22 free variables.
SubsolveResult subsolve_exhaustive(const SubProblem& sub, const SubsolveOptions& opt = {});

/// Single-flip tabu search from `base` over the free set. Moves maximize
/// score - rho * violation with tenure 7; rho starts at 1, doubles after
/// 20 consecutive infeasible moves and halves after 20 consecutive feasible
/// ones. A tabu move is admissible when it yields a new best feasible
/// point. When every move is tabu, the entry that expires first is taken.
/// Score ties are broken by a seeded draw. Default budget 10^4 moves.
SubsolveResult subsolve_tabu(const SubProblem& sub, const SubsolveOptions& opt = {});

/// Best-first branch and bound over the free set with McCormick LP bounds
/// (objective products linearized too) solved by the interior-point method.
/// Branches on the most fractional free variable, ties by index.
SubsolveResult subsolve_bnb(const SubProblem& sub, const SubsolveOptions& opt = {});

SubsolveResult subsolve(SubsolverKind kind, const SubProblem& sub, const SubsolveOptions& opt = {});

}  // namespace hyperqcqp
