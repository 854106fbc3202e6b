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

#include <span>
#include <utility>
#include <vector>

#include "hyperqcqp/instance.hpp"

namespace hyperqcqp {

inline constexpr double kRepairTol = 1e-9;

/// Range of a product x*y over a box.
struct TermBounds {
    double lo = 0.0;
    double hi = 0.0;
};

/// Extremes of x*y over [l_x, u_x] x [l_y, u_y]: the min and max of the four
/// corner products, which is where the McCormick envelopes attain them.
TermBounds mccormick_box(double l_x, double u_x, double l_y, double u_y);

/// The two McCormick over-estimators evaluated at (x, y); their min bounds xy
/// from above on the box.
double mccormick_over(double l_x, double u_x, double l_y, double u_y, double x, double y) noexcept;

/// The two McCormick under-estimators evaluated at (x, y); their max bounds
/// xy from below on the box.
double mccormick_under(double l_x, double u_x, double l_y, double u_y, double x,
                       double y) noexcept;

/// Per-variable bounds under a partial fixing: original bounds for free
/// variables, the fixed value (lb == ub) for fixed ones.
struct BoundContext {
    std::vector<double> lb;
    std::vector<double> ub;

    static BoundContext from_fixing(const QcqpInstance& instance, const std::vector<bool>& fixed,
                                    const Assignment& values);

    bool is_fixed(int i) const noexcept { return lb[i] == ub[i]; }
};

/// Smallest value the left-hand side of a `<=` constraint can take over the
/// box: linear terms take the bound favoured by their sign and each product
/// term takes the favoured end of its `mccormick_box`.
double constraint_min_activity(const Constraint& c, const BoundContext& ctx);

struct RepairStep {
    int constraint = 0;
    int variable = 0;
    double min_activity_before = 0.0;
    double min_activity_after = 0.0;
};

struct RepairOutcome {
    std::vector<int> fixed;              // ascending
    std::vector<int> unfixed;            // ascending
    std::vector<int> unfixed_by_repair;  // in the order the repair freed them
    std::vector<int> residual_violated;  // constraints still failing the bound test
    std::vector<RepairStep> trace;
};

/// Visit constraints (index order, or `order` when given); whenever the
/// min-activity of a constraint exceeds its rhs, walk its terms in storage
/// order (linear, then quadratic) and free the fixed variables of each term,
/// re-bounding after every release, until the bound test passes. The total
/// number of free variables never exceeds `cap`; a term that would overflow
/// the cap is skipped, and a constraint left failing is reported in
/// `residual_violated`. Variables already free stay free.
RepairOutcome q_repair(const QcqpInstance& instance, const std::vector<bool>& fixed,
                       const Assignment& incumbent, int cap,
                       std::span<const int> order = {});

struct LpColumn {
    double lb = 0.0;
    double ub = 0.0;
    int var = -1;       // original variable index, or -1 for a product column
    int i = -1, j = -1; // product column x_i * x_j
};

/// Row reads `sum coef * column <= rhs`.
struct LpRow {
    std::vector<std::pair<int, double>> coefs;
    double rhs = 0.0;
};

/// Relaxed subproblem. Columns 0..n-1 are the original variables (fixed ones
/// carry lb == ub); product columns follow, one per distinct free pair.
struct LpDescription {
    ObjectiveSense sense = ObjectiveSense::minimize;
    std::vector<LpColumn> columns;
    std::vector<LpRow> rows;
    bool objective_linearized = false;
    std::vector<double> objective;  // per column, meaningful when linearized
    double objective_constant = 0.0;
    TermList quadratic_objective;  // the untouched objective when not linearized

    int num_original() const noexcept;
};

struct LinearizeOptions {
    /// Also replace objective products by their McCormick columns, giving a
    /// pure LP (used for bounding and for relaxation rounding).
    bool linearize_objective = false;
};

/// McCormick linearization of the constraint system at `ctx`. A product
/// whose factors are both fixed becomes a constant, one fixed factor turns it
/// into a linear term, and two free factors get a product column bounded by
/// `mccormick_box` together with the four envelope rows.
LpDescription linearize_subproblem(const QcqpInstance& instance, const BoundContext& ctx,
                                   LinearizeOptions options = {});

}  // namespace hyperqcqp
