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

#include "hyperqcqp/mccormick.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "hyperqcqp/error.hpp"

namespace hyperqcqp {

TermBounds mccormick_box(double l_x, double u_x, double l_y, double u_y) {
    if (!std::isfinite(l_x) || !std::isfinite(u_x) || !std::isfinite(l_y) || !std::isfinite(u_y))
        throw InvalidArgument("mccormick_box: bounds must be finite");
    const double a = l_x * l_y;
    const double b = l_x * u_y;
    const double c = u_x * l_y;
    const double d = u_x * u_y;
    return {std::min({a, b, c, d}), std::max({a, b, c, d})};
}

double mccormick_over(double l_x, double u_x, double l_y, double u_y, double x,
                      double y) noexcept {
    return std::min(l_y * x + u_x * y - l_y * u_x, l_x * y + u_y * x - l_x * u_y);
}

double mccormick_under(double l_x, double u_x, double l_y, double u_y, double x,
                       double y) noexcept {
    return std::max(l_y * x + l_x * y - l_x * l_y, u_y * x + u_x * y - u_x * u_y);
}

BoundContext BoundContext::from_fixing(const QcqpInstance& instance, const std::vector<bool>& fixed,
                                       const Assignment& values) {
    const int n = instance.num_vars();
    if (static_cast<int>(fixed.size()) != n || static_cast<int>(values.size()) != n)
        throw InvalidArgument("BoundContext: fixing mask and values must have length n");
    BoundContext ctx;
    ctx.lb.resize(n);
    ctx.ub.resize(n);
    for (int i = 0; i < n; ++i) {
        if (fixed[i]) {
            ctx.lb[i] = ctx.ub[i] = values[i];
        } else {
            ctx.lb[i] = instance.vars[i].lb;
            ctx.ub[i] = instance.vars[i].ub;
        }
    }
    return ctx;
}

double constraint_min_activity(const Constraint& c, const BoundContext& ctx) {
    double total = 0.0;
    for (const auto& t : c.terms.linear)
        total += t.coef > 0 ? t.coef * ctx.lb[t.var] : t.coef * ctx.ub[t.var];
    for (const auto& t : c.terms.quadratic) {
        const TermBounds b = mccormick_box(ctx.lb[t.i], ctx.ub[t.i], ctx.lb[t.j], ctx.ub[t.j]);
        total += t.coef > 0 ? t.coef * b.lo : t.coef * b.hi;
    }
    return total;
}

RepairOutcome q_repair(const QcqpInstance& instance, const std::vector<bool>& fixed,
                       const Assignment& incumbent, int cap, std::span<const int> order) {
    const int n = instance.num_vars();
    if (static_cast<int>(incumbent.size()) != n)
        throw InvalidArgument("q_repair: incumbent length " + std::to_string(incumbent.size()) +
                              " does not match variable count " + std::to_string(n));
    if (static_cast<int>(fixed.size()) != n)
        throw InvalidArgument("q_repair: fixed mask length does not match variable count");

    std::vector<bool> is_fixed = fixed;
    BoundContext ctx = BoundContext::from_fixing(instance, is_fixed, incumbent);
    int free_count = static_cast<int>(std::count(is_fixed.begin(), is_fixed.end(), false));

    std::vector<int> visit;
    if (order.empty()) {
        visit.resize(instance.num_constraints());
        std::iota(visit.begin(), visit.end(), 0);
    } else {
        visit.assign(order.begin(), order.end());
    }

    RepairOutcome out;
    auto release = [&](int var) {
        is_fixed[var] = false;
        ctx.lb[var] = instance.vars[var].lb;
        ctx.ub[var] = instance.vars[var].ub;
        ++free_count;
        out.unfixed_by_repair.push_back(var);
    };

    for (int ci : visit) {
        const Constraint& c = instance.constraints[ci];
        double bound = constraint_min_activity(c, ctx);
        if (bound <= c.rhs + kRepairTol) continue;

        auto release_term = [&](std::initializer_list<int> vars) {
            int need = 0;
            int prev = -1;
            for (int v : vars) {
                if (is_fixed[v] && v != prev) ++need;
                prev = v;
            }
            if (need == 0 || free_count + need > cap) return;
            prev = -1;
            for (int v : vars) {
                if (is_fixed[v] && v != prev) {
                    release(v);
                    const double after = constraint_min_activity(c, ctx);
                    out.trace.push_back({ci, v, bound, after});
                    bound = after;
                }
                prev = v;
            }
        };

        for (const auto& t : c.terms.linear) {
            if (bound <= c.rhs + kRepairTol) break;
            release_term({t.var});
        }
        for (const auto& t : c.terms.quadratic) {
            if (bound <= c.rhs + kRepairTol) break;
            release_term({t.i, t.j});
        }
        if (bound > c.rhs + kRepairTol) out.residual_violated.push_back(ci);
    }

    for (int i = 0; i < n; ++i) (is_fixed[i] ? out.fixed : out.unfixed).push_back(i);
    return out;
}

int LpDescription::num_original() const noexcept {
    int count = 0;
    for (const auto& c : columns)
        if (c.var >= 0) ++count;
    return count;
}

namespace {

class RowBuilder {
 public:
    void add(int col, double coef) {
        if (coef == 0.0) return;
        auto [it, inserted] = entries_.try_emplace(col, coef);
        if (!inserted) it->second += coef;
    }

    LpRow finish(double rhs) {
        LpRow row;
        row.rhs = rhs;
        for (const auto& [col, coef] : entries_)
            if (coef != 0.0) row.coefs.emplace_back(col, coef);
        entries_.clear();
        return row;
    }

 private:
    std::map<int, double> entries_;
};

}  // namespace

LpDescription linearize_subproblem(const QcqpInstance& instance, const BoundContext& ctx,
                                   LinearizeOptions options) {
    if (!instance.is_normalized())
        throw InvalidArgument("linearize_subproblem: instance must be normalized");
    const int n = instance.num_vars();

    LpDescription lp;
    lp.sense = instance.sense;
    lp.objective_linearized = options.linearize_objective;
    for (int i = 0; i < n; ++i) lp.columns.push_back({ctx.lb[i], ctx.ub[i], i, -1, -1});

    std::map<std::pair<int, int>, int> product_column;
    auto product = [&](int i, int j) {
        auto it = product_column.find({i, j});
        if (it != product_column.end()) return it->second;
        const TermBounds b = mccormick_box(ctx.lb[i], ctx.ub[i], ctx.lb[j], ctx.ub[j]);
        const int col = static_cast<int>(lp.columns.size());
        lp.columns.push_back({b.lo, b.hi, -1, i, j});
        product_column.emplace(std::make_pair(i, j), col);

        const double lx = ctx.lb[i], ux = ctx.ub[i], ly = ctx.lb[j], uy = ctx.ub[j];
        RowBuilder rb;
        // phi >= ly*x + lx*y - lx*ly
        rb.add(i, ly), rb.add(j, lx), rb.add(col, -1.0);
        lp.rows.push_back(rb.finish(lx * ly));
        // phi >= uy*x + ux*y - ux*uy
        rb.add(i, uy), rb.add(j, ux), rb.add(col, -1.0);
        lp.rows.push_back(rb.finish(ux * uy));
        // phi <= ly*x + ux*y - ly*ux
        rb.add(col, 1.0), rb.add(i, -ly), rb.add(j, -ux);
        lp.rows.push_back(rb.finish(-ly * ux));
        // phi <= lx*y + uy*x - lx*uy
        rb.add(col, 1.0), rb.add(i, -uy), rb.add(j, -lx);
        lp.rows.push_back(rb.finish(-lx * uy));
        return col;
    };

    // Accumulates a product term into `rb`, returning the constant part.
    auto linearize_product = [&](RowBuilder& rb, const QuadraticTerm& t) -> double {
        const bool fi = ctx.is_fixed(t.i);
        const bool fj = ctx.is_fixed(t.j);
        if (fi && fj) return t.coef * ctx.lb[t.i] * ctx.lb[t.j];
        if (fi) {
            rb.add(t.j, t.coef * ctx.lb[t.i]);
        } else if (fj) {
            rb.add(t.i, t.coef * ctx.lb[t.j]);
        } else {
            rb.add(product(t.i, t.j), t.coef);
        }
        return 0.0;
    };

    for (const auto& c : instance.constraints) {
        RowBuilder rb;
        double constant = 0.0;
        for (const auto& t : c.terms.linear) rb.add(t.var, t.coef);
        for (const auto& t : c.terms.quadratic) constant += linearize_product(rb, t);
        lp.rows.push_back(rb.finish(c.rhs - constant));
    }

    if (options.linearize_objective) {
        RowBuilder rb;
        for (const auto& t : instance.objective.linear) rb.add(t.var, t.coef);
        for (const auto& t : instance.objective.quadratic)
            lp.objective_constant += linearize_product(rb, t);
        const LpRow row = rb.finish(0.0);
        lp.objective.assign(lp.columns.size(), 0.0);
        for (const auto& [col, coef] : row.coefs) lp.objective[col] = coef;
    } else {
        lp.quadratic_objective = instance.objective;
        lp.objective.assign(lp.columns.size(), 0.0);
    }
    return lp;
}

}  // namespace hyperqcqp
