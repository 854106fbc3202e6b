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

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <limits>

#include "hyperqcqp/error.hpp"
#include "hyperqcqp/generators.hpp"
#include "hyperqcqp/ipm.hpp"
#include "hyperqcqp/mccormick.hpp"
#include "hyperqcqp/rng.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace hyperqcqp;
using namespace hyperqcqp::testing;
using Catch::Approx;

TEST_CASE("mccormick_box corner products", "[mccormick]") {
    auto b = mccormick_box(0, 1, 0, 1);
    CHECK(b.lo == 0.0);
    CHECK(b.hi == 1.0);
    b = mccormick_box(-1, 2, -3, 1);
    CHECK(b.lo == -6.0);
    CHECK(b.hi == 3.0);
    b = mccormick_box(1, 1, 0, 1);
    CHECK(b.lo == 0.0);
    CHECK(b.hi == 1.0);
    CHECK_THROWS_AS(mccormick_box(0, std::numeric_limits<double>::infinity(), 0, 1), InvalidArgument);
}

TEST_CASE("envelopes sandwich the product on random boxes", "[mccormick]") {
    SplitMix64 r(11);
    for (int k = 0; k < 2000; ++k) {
        double lx = r.uniform(-5, 5), ux = lx + r.uniform(0, 5);
        double ly = r.uniform(-5, 5), uy = ly + r.uniform(0, 5);
        const double x = r.uniform(lx, ux), y = r.uniform(ly, uy);
        const auto b = mccormick_box(lx, ux, ly, uy);
        CHECK(b.lo <= x * y + 1e-9);
        CHECK(x * y <= b.hi + 1e-9);
        CHECK(mccormick_under(lx, ux, ly, uy, x, y) <= x * y + 1e-9);
        CHECK(mccormick_over(lx, ux, ly, uy, x, y) >= x * y - 1e-9);
    }
}

TEST_CASE("constraint_min_activity sign rule", "[mccormick]") {
    auto inst = binary_instance(2);
    const Constraint c = le(terms({{0, 1.0}}, {{0, 1, 1.0}}), 1.0);
    auto both = BoundContext::from_fixing(inst, {true, true}, {1.0, 1.0});
    CHECK(constraint_min_activity(c, both) == 2.0);
    auto none = BoundContext::from_fixing(inst, {false, false}, {1.0, 1.0});
    CHECK(constraint_min_activity(c, none) == 0.0);
    const Constraint neg = le(terms({{0, -2.0}}), 0.0);
    CHECK(constraint_min_activity(neg, none) == -2.0);
    const Constraint negq = le(terms({}, {{0, 1, -1.5}}), 0.0);
    CHECK(constraint_min_activity(negq, none) == -1.5);
}

TEST_CASE("q_repair hand trace", "[mccormick]") {
    auto inst = binary_instance(2);
    inst.objective = terms({{0, 1.0}});
    inst.constraints.push_back(le(terms({{0, 1.0}}, {{0, 1, 1.0}}), 1.0));
    const auto out = q_repair(inst, {true, true}, {1.0, 1.0}, 2);
    CHECK(out.unfixed == std::vector<int>{0});
    CHECK(out.fixed == std::vector<int>{1});
    CHECK(out.unfixed_by_repair == std::vector<int>{0});
    CHECK(out.residual_violated.empty());
    REQUIRE(out.trace.size() == 1);
    CHECK(out.trace[0].min_activity_before == 2.0);
    CHECK(out.trace[0].min_activity_after == 0.0);

    SECTION("cap 0 leaves the sets unchanged") {
        const auto capped = q_repair(inst, {true, true}, {1.0, 1.0}, 0);
        CHECK(capped.residual_violated == std::vector<int>{0});
        CHECK(capped.unfixed.empty());
        CHECK(capped.fixed == std::vector<int>{0, 1});
    }
    SECTION("satisfied constraints are a no-op") {
        const auto noop = q_repair(inst, {true, false}, {0.0, 1.0}, 2);
        CHECK(noop.fixed == std::vector<int>{0});
        CHECK(noop.unfixed == std::vector<int>{1});
        CHECK(noop.trace.empty());
    }
    CHECK_THROWS_AS(q_repair(inst, {true, true}, {1.0}, 2), InvalidArgument);
}

TEST_CASE("q_repair only frees variables of violated constraints", "[mccormick]") {
    const auto inst = normalize(gen_randqcp({.n = 30, .m = 20, .seed = 5}));
    SplitMix64 r(3);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<bool> fixed(30);
        Assignment x(30);
        for (int i = 0; i < 30; ++i) {
            fixed[i] = r.uniform() < 0.8;
            x[i] = r.uniform() < 0.7 ? 1.0 : 0.0;
        }
        const auto out = q_repair(inst, fixed, x, 30);
        CHECK(out.residual_violated.empty());
        CHECK(out.fixed.size() + out.unfixed.size() == 30u);
        for (const auto& step : out.trace) {
            CHECK(step.min_activity_before > inst.constraints[step.constraint].rhs + kRepairTol);
            const auto& c = inst.constraints[step.constraint];
            bool member = false;
            for (const auto& t : c.terms.linear) member |= t.var == step.variable;
            for (const auto& t : c.terms.quadratic) member |= t.i == step.variable || t.j == step.variable;
            CHECK(member);
        }
        std::vector<bool> now_fixed(30, false);
        for (int v : out.fixed) now_fixed[v] = true;
        for (int i = 0; i < 30; ++i)
            if (!fixed[i]) CHECK_FALSE(now_fixed[i]);
        const auto ctx = BoundContext::from_fixing(inst, now_fixed, x);
        for (const auto& c : inst.constraints) CHECK(constraint_min_activity(c, ctx) <= c.rhs + kRepairTol);
    }
}

TEST_CASE("linearize_subproblem instantiates the envelope rows", "[mccormick]") {
    auto inst = binary_instance(2);
    inst.objective = terms({{0, 1.0}});
    inst.constraints.push_back(le(terms({}, {{0, 1, 1.0}}), 0.5));
    const auto ctx = BoundContext::from_fixing(inst, {false, false}, {0.0, 0.0});
    const auto lp = linearize_subproblem(inst, ctx);
    REQUIRE(lp.columns.size() == 3u);
    CHECK(lp.columns[2].i == 0);
    CHECK(lp.columns[2].j == 1);
    CHECK(lp.rows.size() == 5u);
    // The four unit-box envelope rows, as sorted (column, coef) lists with rhs:
    // -phi <= 0, x0 + x1 - phi <= 1, phi - x0 <= 0, phi - x1 <= 0.
    using Row = std::pair<std::vector<std::pair<int, double>>, double>;
    std::vector<Row> got;
    for (const auto& row : lp.rows) {
        auto c = row.coefs;
        c.erase(std::remove_if(c.begin(), c.end(), [](auto& e) { return e.second == 0.0; }), c.end());
        std::sort(c.begin(), c.end());
        got.emplace_back(c, row.rhs);
    }
    const std::vector<Row> want = {{{{2, -1.0}}, 0.0},
                                   {{{0, 1.0}, {1, 1.0}, {2, -1.0}}, 1.0},
                                   {{{0, -1.0}, {2, 1.0}}, 0.0},
                                   {{{1, -1.0}, {2, 1.0}}, 0.0},
                                   {{{2, 1.0}}, 0.5}};
    for (const auto& w : want) CHECK(std::find(got.begin(), got.end(), w) != got.end());
    CHECK_FALSE(lp.objective_linearized);

    SECTION("a factor fixed at 0 removes the product") {
        const auto fixed = linearize_subproblem(inst, BoundContext::from_fixing(inst, {true, false}, {0.0, 0.0}));
        CHECK(fixed.columns.size() == 2u);
        REQUIRE(fixed.rows.size() == 1u);
        CHECK(fixed.rows[0].coefs.empty());
    }
    SECTION("no quadratic terms gives the original system") {
        auto lin = binary_instance(2);
        lin.objective = terms({{0, 1.0}});
        lin.constraints.push_back(le(terms({{0, 1.0}, {1, 2.0}}), 2.0));
        const auto l = linearize_subproblem(lin, BoundContext::from_fixing(lin, {false, false}, {0.0, 0.0}));
        CHECK(l.columns.size() == 2u);
        REQUIRE(l.rows.size() == 1u);
        CHECK(l.rows[0].rhs == 2.0);
        CHECK(l.rows[0].coefs.size() == 2u);
    }
}

TEST_CASE("McCormick LP optimum matches vertex enumeration", "[mccormick][ipm]") {
    auto inst = binary_instance(3);
    inst.objective = terms({{0, 1.0}, {1, 0.8}, {2, 0.6}}, {{0, 1, 0.5}, {1, 2, -0.7}});
    inst.constraints.push_back(le(terms({{0, 0.9}, {1, 0.4}}, {{0, 2, 0.6}}), 1.0));
    inst.constraints.push_back(le(terms({{1, 0.5}, {2, 0.7}}, {{1, 2, 0.3}}), 0.9));
    const auto ctx = BoundContext::from_fixing(inst, {false, false, false}, {0.0, 0.0, 0.0});
    const auto lp = linearize_subproblem(inst, ctx, {.linearize_objective = true});
    const auto map = qp_from_lp(lp);
    IpmConfig cfg;
    cfg.solver = KktSolver::primal_normal;
    const auto res = ipm_solve(map.qp, cfg);
    REQUIRE(res.converged);
    const auto d = dense_from_lp(lp);
    const auto ref = lp_vertex_oracle(d.c, d.G, d.h);
    REQUIRE(ref);
    CHECK(map.lp_objective(res.x) == Approx(d.sign * ref->objective + d.constant).margin(1e-6));
}
