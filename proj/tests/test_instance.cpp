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

#include "hyperqcqp/error.hpp"
#include "hyperqcqp/generators.hpp"
#include "hyperqcqp/instance.hpp"
#include "hyperqcqp/oracle.hpp"
#include "test_util.hpp"

using namespace hyperqcqp;
using namespace hyperqcqp::testing;
using Catch::Approx;

TEST_CASE("load_instance accepts the smallest document", "[instance]") {
    const auto inst = load_instance(R"({"name":"one","sense":"max",
        "vars":[{"name":"x","lb":0,"ub":1,"type":"binary"}],
        "objective":{"linear":[[0,1.0]],"quadratic":[]},"constraints":[]})");
    CHECK(inst.num_vars() == 1);
    CHECK(inst.num_constraints() == 0);
    CHECK(inst.objective.linear.size() == 1);
}

TEST_CASE("load_instance rejects invalid documents with a field path", "[instance]") {
    const std::string head = R"({"name":"q","sense":"min","vars":[{"name":"a","lb":0,"ub":1,"type":"binary"},
        {"name":"b","lb":0,"ub":1,"type":"binary"},{"name":"c","lb":0,"ub":1,"type":"binary"}],)";
    SECTION("quadratic entry with i > j") {
        try {
            load_instance(head + R"("objective":{"linear":[],"quadratic":[[2,1,0.5]]},"constraints":[]})");
            FAIL("expected SchemaError");
        } catch (const SchemaError& e) {
            CHECK(e.path().find("objective.quadratic[0]") != std::string::npos);
        }
    }
    SECTION("index out of range") {
        CHECK_THROWS_AS(load_instance(head + R"("objective":{"linear":[[5,1.0]]},"constraints":[]})"),
                        SchemaError);
    }
    SECTION("lb > ub") {
        CHECK_THROWS_AS(load_instance(R"({"name":"q","sense":"min","vars":[{"name":"a","lb":2,"ub":1,"type":"integer"}],
            "objective":{"linear":[[0,1.0]]},"constraints":[]})"),
                        SchemaError);
    }
    SECTION("truncated text") {
        CHECK_THROWS_AS(load_instance(head), SchemaError);
    }
}

TEST_CASE("save and load round-trip", "[instance]") {
    const auto inst = gen_qmkp({.n = 4, .m = 2, .edge_factor = 1.0, .seed = 7});
    const std::string text = save_instance(inst);
    const auto back = load_instance(text);
    CHECK(back == inst);
    CHECK(save_instance(back) == text);
}

TEST_CASE("normalize rewrites senses", "[instance]") {
    auto inst = binary_instance(2);
    inst.objective = terms({{0, 1.0}});
    SECTION("ge is negated") {
        inst.constraints.push_back({terms({{0, 1.0}}), ConstraintSense::ge, 1.0});
        const auto n = normalize(inst);
        REQUIRE(n.num_constraints() == 1);
        CHECK(n.constraints[0].sense == ConstraintSense::le);
        CHECK(n.constraints[0].terms.linear[0].coef == -1.0);
        CHECK(n.constraints[0].rhs == -1.0);
    }
    SECTION("eq is split") {
        inst.constraints.push_back({terms({{0, 1.0}}, {{0, 1, 1.0}}), ConstraintSense::eq, 2.0});
        const auto n = normalize(inst);
        REQUIRE(n.num_constraints() == 2);
        CHECK(n.constraints[0].terms == inst.constraints[0].terms);
        CHECK(n.constraints[0].rhs == 2.0);
        CHECK(n.constraints[1].terms == inst.constraints[0].terms.scaled(-1.0));
        CHECK(n.constraints[1].rhs == -2.0);
    }
    SECTION("idempotent") {
        inst.constraints.push_back({terms({{1, 1.0}}), ConstraintSense::ge, 0.5});
        const auto once = normalize(inst);
        CHECK(normalize(once) == once);
        CHECK(once.is_normalized());
    }
}

TEST_CASE("evaluate", "[instance]") {
    auto inst = binary_instance(2);
    inst.objective = terms({{0, 1.0}}, {{0, 1, 1.0}});
    inst.constraints.push_back(le(terms({}, {{0, 1, 1.0}}), 0.0));
    const auto r = evaluate(inst, {1.0, 1.0});
    CHECK(r.objective == 2.0);
    CHECK(r.violations[0] == 1.0);
    CHECK_FALSE(r.feasible);
    CHECK(r.violated_count() == 1);
    CHECK_THROWS_AS(evaluate(inst, {1.0}), InvalidArgument);

    const auto q = gen_qmkp({.n = 4, .m = 2, .edge_factor = 1.0, .seed = 7});
    const auto z = evaluate(q, Assignment(4, 0.0));
    CHECK(z.objective == 0.0);
    CHECK(z.feasible);
}

TEST_CASE("evaluate is linear in the objective", "[instance]") {
    const auto a = gen_qmkp({.n = 6, .m = 1, .edge_factor = 1.0, .seed = 1});
    const auto b = gen_qmkp({.n = 6, .m = 1, .edge_factor = 1.0, .seed = 2});
    auto sum = a;
    sum.objective.linear.insert(sum.objective.linear.end(), b.objective.linear.begin(),
                                b.objective.linear.end());
    sum.objective.quadratic.insert(sum.objective.quadratic.end(), b.objective.quadratic.begin(),
                                   b.objective.quadratic.end());
    for (const auto& x : all_points(6))
        CHECK(evaluate(sum, x).objective ==
              Approx(evaluate(a, x).objective + evaluate(b, x).objective).margin(1e-12));
}

TEST_CASE("brute_force_oracle", "[instance][oracle]") {
    SECTION("4-case enumeration") {
        auto inst = binary_instance(2);
        inst.objective = terms({{0, 1.0}, {1, 1.0}});
        inst.constraints.push_back(le(terms({}, {{0, 1, 1.0}}), 0.0));
        const auto r = brute_force_oracle(inst);
        REQUIRE(r.feasible);
        CHECK(r.objective == 1.0);
        CHECK(r.x == Assignment{1.0, 0.0});
    }
    SECTION("infeasible marker") {
        auto inst = binary_instance(1);
        inst.objective = terms({{0, 1.0}});
        inst.constraints.push_back(le(terms({{0, 1.0}}), -1.0));
        CHECK_FALSE(brute_force_oracle(inst).feasible);
    }
    SECTION("agrees with an independent enumeration") {
        const auto inst = normalize(gen_randqcp({.n = 12, .m = 10, .arity_min = 2, .arity_max = 4, .seed = 3}));
        const auto r = brute_force_oracle(inst);
        double best = -1e300;
        for (const auto& x : all_points(12)) {
            double obj = 0.0;
            for (const auto& t : inst.objective.linear) obj += t.coef * x[t.var];
            bool ok = true;
            for (const auto& c : inst.constraints) {
                double a = 0.0;
                for (const auto& t : c.terms.linear) a += t.coef * x[t.var];
                for (const auto& t : c.terms.quadratic) a += t.coef * x[t.i] * x[t.j];
                ok = ok && a <= c.rhs + 1e-6;
            }
            if (ok) best = std::max(best, obj);
        }
        REQUIRE(r.feasible);
        CHECK(r.objective == Approx(best).margin(1e-12));
    }
    SECTION("rejects oversized and non-binary instances") {
        auto big = binary_instance(23);
        big.objective = terms({{0, 1.0}});
        CHECK_THROWS_AS(brute_force_oracle(big), InvalidArgument);
        auto mixed = binary_instance(2);
        mixed.objective = terms({{0, 1.0}});
        mixed.vars[1] = {"y", 0.0, 3.0, VarType::integer};
        CHECK_THROWS_AS(brute_force_oracle(mixed), InvalidArgument);
    }
}
