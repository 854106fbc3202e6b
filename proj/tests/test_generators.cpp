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

#include <set>

#include "hyperqcqp/error.hpp"
#include "hyperqcqp/generators.hpp"
#include "hyperqcqp/oracle.hpp"

using namespace hyperqcqp;

namespace {

void check_unit_interval(const TermList& t) {
    for (const auto& l : t.linear) CHECK((l.coef > 0.0 && l.coef < 1.0));
    for (const auto& q : t.quadratic) CHECK((q.coef > 0.0 && q.coef < 1.0));
}

}  // namespace

TEST_CASE("gen_qmkp structure", "[generators]") {
    const auto inst = gen_qmkp({.n = 16, .m = 3, .seed = 1});
    CHECK(inst.sense == ObjectiveSense::maximize);
    CHECK(inst.num_vars() == 16);
    CHECK(inst.num_constraints() == 3);
    CHECK(inst.all_binary());
    CHECK(inst.objective.linear.size() == 16);
    CHECK(inst.objective.quadratic.size() == 80);
    std::set<std::pair<int, int>> pairs;
    for (const auto& q : inst.objective.quadratic) {
        CHECK(q.i < q.j);
        pairs.insert({q.i, q.j});
    }
    CHECK(pairs.size() == 80);
    check_unit_interval(inst.objective);
    for (const auto& c : inst.constraints) {
        check_unit_interval(c.terms);
        CHECK(c.terms.quadratic.empty());
        double sum = 0.0;
        for (const auto& t : c.terms.linear) sum += t.coef;
        CHECK(c.rhs == 0.5 * sum);
    }
    CHECK(evaluate(inst, Assignment(16, 0.0)).feasible);
}

TEST_CASE("gen_qmkp is seeded", "[generators]") {
    const QmkpParams p{.n = 4, .m = 2, .edge_factor = 1.0, .seed = 7};
    CHECK(save_instance(gen_qmkp(p)) == save_instance(gen_qmkp(p)));
    auto q = p;
    q.seed = 8;
    CHECK(save_instance(gen_qmkp(q)) != save_instance(gen_qmkp(p)));
    const auto a = brute_force_oracle(gen_qmkp({.n = 16, .m = 3, .seed = 1}));
    const auto b = brute_force_oracle(gen_qmkp({.n = 16, .m = 3, .seed = 1}));
    CHECK(a.objective == b.objective);
    CHECK(a.x == b.x);
}

TEST_CASE("gen_qmkp rejects too many edges and bad params", "[generators]") {
    CHECK_THROWS_AS(gen_qmkp({.n = 4, .m = 1, .edge_factor = 2.0}), InvalidArgument);
    CHECK_THROWS_AS(gen_qmkp({.n = 1, .m = 1}), InvalidArgument);
    CHECK_THROWS_AS(gen_qmkp({.n = 8, .m = 0}), InvalidArgument);
}

TEST_CASE("gen_randqcp structure", "[generators]") {
    const auto inst = gen_randqcp({.n = 12, .m = 10, .arity_min = 2, .arity_max = 4, .seed = 3});
    CHECK(inst.sense == ObjectiveSense::maximize);
    CHECK(inst.objective.quadratic.empty());
    CHECK(inst.num_constraints() == 10);
    check_unit_interval(inst.objective);
    for (const auto& c : inst.constraints) {
        const int arity = static_cast<int>(c.terms.linear.size());
        CHECK(arity >= 2);
        CHECK(arity <= 4);
        CHECK(c.rhs == static_cast<double>(arity));
        CHECK(static_cast<int>(c.terms.quadratic.size()) == arity * (arity - 1) / 2);
        for (std::size_t k = 1; k < c.terms.linear.size(); ++k)
            CHECK(c.terms.linear[k - 1].var < c.terms.linear[k].var);
        check_unit_interval(c.terms);
    }
    CHECK(evaluate(inst, Assignment(12, 0.0)).feasible);
    CHECK(save_instance(inst) ==
          save_instance(gen_randqcp({.n = 12, .m = 10, .arity_min = 2, .arity_max = 4, .seed = 3})));
    CHECK(brute_force_oracle(inst).feasible);
}

TEST_CASE("gen_randqcp validates arity", "[generators]") {
    CHECK_THROWS_AS(gen_randqcp({.n = 4, .m = 2, .arity_min = 1, .arity_max = 3}), InvalidArgument);
    CHECK_THROWS_AS(gen_randqcp({.n = 4, .m = 2, .arity_min = 3, .arity_max = 2}), InvalidArgument);
    CHECK_THROWS_AS(gen_randqcp({.n = 4, .m = 2, .arity_min = 2, .arity_max = 5}), InvalidArgument);
}
