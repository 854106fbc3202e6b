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

#include <map>

#include "hyperqcqp/generators.hpp"
#include "hyperqcqp/hypergraph.hpp"
#include "test_util.hpp"

using namespace hyperqcqp;
using namespace hyperqcqp::testing;

TEST_CASE("minimal hypergraph", "[hypergraph]") {
    auto inst = binary_instance(1);
    inst.objective = terms({{0, 1.0}});
    const auto h = build_hypergraph(inst, 0);
    CHECK(h.num_vertices() == 4);
    REQUIRE(h.num_hyperedges() == 1);
    const auto& e = h.hyperedges[0];
    CHECK(e.members == std::array<int, 3>{0, h.aux_zero_vertex(), h.objective_vertex()});
    CHECK(e.kind == TermKind::linear);
    CHECK(h.edge_features(0, 0) == 1.0);
}

TEST_CASE("square and linear terms map to the right aux vertices", "[hypergraph]") {
    auto inst = binary_instance(3);
    inst.objective = terms({}, {{1, 1, 0.75}});
    inst.constraints.push_back(le(terms({{2, -2.5}}), 1.0));
    const auto h = build_hypergraph(inst, 0);
    REQUIRE(h.num_hyperedges() == 2);
    CHECK(h.hyperedges[0].members == std::array<int, 3>{1, h.aux_square_vertex(), h.objective_vertex()});
    CHECK(h.edge_features(0, 0) == 0.75);
    CHECK(h.edge_features(0, 1) == 1.0);  // objective edge
    CHECK(h.edge_features(0, 3) == 1.0);  // square
    CHECK(h.hyperedges[1].members == std::array<int, 3>{2, h.aux_zero_vertex(), h.constraint_vertex(0)});
    CHECK(h.edge_features(1, 0) == -2.5);
    CHECK(h.edge_features(1, 2) == 1.0);  // linear
}

TEST_CASE("term bijection, 3-uniformity, incidence and determinism", "[hypergraph]") {
    const auto inst = normalize(gen_qmkp({.n = 4, .m = 2, .edge_factor = 1.0, .seed = 7}));
    std::size_t terms_total = inst.objective.size();
    for (const auto& c : inst.constraints) terms_total += c.terms.size();
    const auto h = build_hypergraph(inst, 5);
    CHECK(static_cast<std::size_t>(h.num_hyperedges()) == terms_total);

    std::map<int, int> degree;
    for (int e = 0; e < h.num_hyperedges(); ++e) {
        const auto& he = h.hyperedges[e];
        const TermList& owner = he.constraint < 0 ? inst.objective : inst.constraints[he.constraint].terms;
        const double coef = he.kind == TermKind::linear ? owner.linear[he.term].coef
                                                        : owner.quadratic[he.term].coef;
        CHECK(he.coef == coef);
        CHECK(h.edge_features(e, 0) == coef);
        for (int v : he.members) {
            ++degree[v];
            const auto& inc = h.vertex_edges[v];
            CHECK(std::find(inc.begin(), inc.end(), e) != inc.end());
        }
    }
    for (int v = 0; v < h.num_vertices(); ++v)
        CHECK(static_cast<int>(h.vertex_edges[v].size()) == degree[v]);

    const auto again = build_hypergraph(inst, 5);
    CHECK(again.vertex_features == h.vertex_features);
    CHECK(again.edge_features == h.edge_features);
    const auto other = build_hypergraph(inst, 6);
    CHECK(other.vertex_features != h.vertex_features);

    const auto b = star_expand(h);
    CHECK(b.num_e_nodes == h.num_hyperedges());
    CHECK(b.edges.size() == 3 * static_cast<std::size_t>(h.num_hyperedges()));
    for (std::size_t k = 0; k < b.edges.size(); ++k)
        CHECK(b.edge_features.row(k) == h.edge_features.row(b.edges[k].second));
}

TEST_CASE("objective-only instance star expansion", "[hypergraph]") {
    auto inst = binary_instance(3);
    inst.objective = terms({{0, 1.0}, {2, 0.5}}, {{0, 1, 1.0}});
    const auto h = build_hypergraph(inst, 0);
    const auto b = star_expand(h);
    CHECK(b.num_e_nodes == 3);
    int to_objective = 0;
    for (auto [v, e] : b.edges) to_objective += v == h.objective_vertex();
    CHECK(to_objective == 3);
}
