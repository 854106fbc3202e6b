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

#include "hyperqcqp/hypergraph.hpp"

#include <algorithm>
#include <cmath>

#include "hyperqcqp/error.hpp"
#include "hyperqcqp/rng.hpp"
#include "json.hpp"

namespace hyperqcqp {

namespace {

constexpr int kKindOffset = 6;

double scaled_bound(double b) { return std::clamp(b, -1e6, 1e6) * 1e-3; }

double slog(double v) { return std::copysign(std::log1p(std::abs(v)), v); }

void add_term_edges(VariableRelationalHypergraph& h, const TermList& terms, int constraint,
                    int target) {
    for (std::size_t k = 0; k < terms.linear.size(); ++k) {
        const auto& t = terms.linear[k];
        h.hyperedges.push_back({{h.variable_vertex(t.var), h.aux_zero_vertex(), target},
                                TermKind::linear, constraint, static_cast<int>(k), t.coef});
    }
    for (std::size_t k = 0; k < terms.quadratic.size(); ++k) {
        const auto& t = terms.quadratic[k];
        if (t.is_square()) {
            h.hyperedges.push_back({{h.variable_vertex(t.i), h.aux_square_vertex(), target},
                                    TermKind::square, constraint, static_cast<int>(k), t.coef});
        } else {
            h.hyperedges.push_back({{h.variable_vertex(t.i), h.variable_vertex(t.j), target},
                                    TermKind::bilinear, constraint, static_cast<int>(k), t.coef});
        }
    }
}

}  // namespace

VariableRelationalHypergraph build_hypergraph(const QcqpInstance& instance,
                                              std::uint64_t feature_seed) {
    if (!instance.is_normalized())
        throw InvalidArgument("build_hypergraph: instance must be normalized");

    VariableRelationalHypergraph h;
    const int n = instance.num_vars();
    const int m = instance.num_constraints();
    h.num_variables = n;
    h.num_constraints = m;

    const int num_v = n + 3 + m;
    h.kinds.resize(num_v);
    h.vertex_features = Matrix::Zero(num_v, kVertexFeatureWidth);

    SplitMix64 rng(feature_seed);
    for (int i = 0; i < n; ++i) {
        const auto& v = instance.vars[i];
        auto row = h.vertex_features.row(i);
        row(0) = v.type == VarType::binary ? 1.0 : 0.0;
        row(1) = v.type == VarType::integer ? 1.0 : 0.0;
        row(2) = v.type == VarType::continuous ? 1.0 : 0.0;
        row(3) = scaled_bound(v.lb);
        row(4) = scaled_bound(v.ub);
        row(5) = rng.uniform();
        row(kKindOffset + 0) = 1.0;
        h.kinds[i] = VertexKind::variable;
    }
    h.kinds[h.aux_zero_vertex()] = VertexKind::aux_zero;
    h.vertex_features(h.aux_zero_vertex(), kKindOffset + 1) = 1.0;
    h.kinds[h.aux_square_vertex()] = VertexKind::aux_square;
    h.vertex_features(h.aux_square_vertex(), kKindOffset + 2) = 1.0;
    for (int j = 0; j < m; ++j) {
        const auto& c = instance.constraints[j];
        auto row = h.vertex_features.row(h.constraint_vertex(j));
        row(0) = slog(c.rhs);
        row(1) = slog(static_cast<double>(c.terms.size()));
        row(kKindOffset + 3) = 1.0;
        h.kinds[h.constraint_vertex(j)] = VertexKind::constraint;
    }
    {
        auto row = h.vertex_features.row(h.objective_vertex());
        row(0) = instance.sign();
        row(1) = slog(static_cast<double>(instance.objective.size()));
        row(kKindOffset + 4) = 1.0;
        h.kinds[h.objective_vertex()] = VertexKind::objective;
    }

    add_term_edges(h, instance.objective, -1, h.objective_vertex());
    for (int j = 0; j < m; ++j) add_term_edges(h, instance.constraints[j].terms, j, h.constraint_vertex(j));

    const int num_e = h.num_hyperedges();
    h.edge_features = Matrix::Zero(num_e, kEdgeFeatureWidth);
    h.vertex_edges.assign(num_v, {});
    for (int e = 0; e < num_e; ++e) {
        const auto& edge = h.hyperedges[e];
        auto row = h.edge_features.row(e);
        row(0) = edge.coef;
        row(1) = edge.constraint < 0 ? 1.0 : 0.0;
        row(2) = edge.kind == TermKind::linear ? 1.0 : 0.0;
        row(3) = edge.kind == TermKind::square ? 1.0 : 0.0;
        row(4) = edge.kind == TermKind::bilinear ? 1.0 : 0.0;
        for (int v : edge.members) h.vertex_edges[v].push_back(e);
    }
    return h;
}

BipartiteView star_expand(const VariableRelationalHypergraph& h) {
    BipartiteView view;
    view.num_v_nodes = h.num_vertices();
    view.num_e_nodes = h.num_hyperedges();
    view.edges.reserve(3 * h.hyperedges.size());
    view.edge_features.resize(3 * h.num_hyperedges(), kEdgeFeatureWidth);
    int k = 0;
    for (int e = 0; e < h.num_hyperedges(); ++e) {
        for (int v : h.hyperedges[e].members) {
            view.edges.emplace_back(v, e);
            view.edge_features.row(k++) = h.edge_features.row(e);
        }
    }
    return view;
}

std::string hypergraph_to_json(const VariableRelationalHypergraph& h) {
    static const char* kind_names[] = {"variable", "aux_zero", "aux_square", "constraint",
                                       "objective"};
    static const char* term_names[] = {"linear", "square", "bilinear"};
    nlohmann::ordered_json doc;
    doc["num_variables"] = h.num_variables;
    doc["num_constraints"] = h.num_constraints;
    auto& vertices = doc["vertices"] = nlohmann::ordered_json::array();
    for (int v = 0; v < h.num_vertices(); ++v) {
        nlohmann::ordered_json jv;
        jv["id"] = v;
        jv["kind"] = kind_names[static_cast<int>(h.kinds[v])];
        jv["feature"] = std::vector<double>(h.vertex_features.row(v).begin(),
                                            h.vertex_features.row(v).end());
        vertices.push_back(std::move(jv));
    }
    auto& edges = doc["hyperedges"] = nlohmann::ordered_json::array();
    for (int e = 0; e < h.num_hyperedges(); ++e) {
        const auto& edge = h.hyperedges[e];
        nlohmann::ordered_json je;
        je["members"] = edge.members;
        je["kind"] = term_names[static_cast<int>(edge.kind)];
        je["constraint"] = edge.constraint;
        je["term"] = edge.term;
        je["feature"] = std::vector<double>(h.edge_features.row(e).begin(),
                                            h.edge_features.row(e).end());
        edges.push_back(std::move(je));
    }
    return doc.dump(2) + "\n";
}

}  // namespace hyperqcqp
