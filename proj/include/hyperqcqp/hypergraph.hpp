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

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hyperqcqp/instance.hpp"
#include "hyperqcqp/linalg.hpp"

namespace hyperqcqp {

enum class VertexKind { variable, aux_zero, aux_square, constraint, objective };

/// Vertex feature layout, shared by every kind (unused slots are zero):
///
///   [0..5]  payload
///           variable:   is_binary, is_integer, is_continuous, lb', ub', random
///           constraint: slog(rhs), slog(term count)
///           objective:  +1 max / -1 min, slog(term count)
///   [6..10] one-hot kind in VertexKind order
///
/// lb'/ub' are bounds clipped to [-1e6, 1e6] and scaled by 1e-3;
/// slog(v) = sign(v) * log(1 + |v|).
inline constexpr int kVertexFeatureWidth = 11;

/// Hyperedge features: coefficient, is_objective, is_linear, is_square,
/// is_bilinear.
inline constexpr int kEdgeFeatureWidth = 5;

enum class TermKind { linear, square, bilinear };

struct Hyperedge {
    /// Two members from the extended variable set, then the constraint or
    /// objective vertex. Linear: (v_i, v0, target); square: (v_i, v2, target);
    /// bilinear: (v_i, v_j, target).
    std::array<int, 3> members{};
    TermKind kind = TermKind::linear;
    int constraint = -1;  // -1 means the objective
    int term = 0;         // index into the owning TermList's linear/quadratic vector
    double coef = 0.0;
};

struct VariableRelationalHypergraph {
    int num_variables = 0;
    int num_constraints = 0;
    std::vector<VertexKind> kinds;
    Matrix vertex_features;  // |V| x kVertexFeatureWidth
    std::vector<Hyperedge> hyperedges;
    Matrix edge_features;  // |E| x kEdgeFeatureWidth
    std::vector<std::vector<int>> vertex_edges;  // incident hyperedges per vertex

    int num_vertices() const noexcept { return static_cast<int>(kinds.size()); }
    int num_hyperedges() const noexcept { return static_cast<int>(hyperedges.size()); }

    int variable_vertex(int i) const noexcept { return i; }
    int aux_zero_vertex() const noexcept { return num_variables; }
    int aux_square_vertex() const noexcept { return num_variables + 1; }
    int constraint_vertex(int j) const noexcept { return num_variables + 2 + j; }
    int objective_vertex() const noexcept { return num_variables + 2 + num_constraints; }
};

/// Star expansion: one e-node per hyperedge, joined to its three members.
struct BipartiteView {
    int num_v_nodes = 0;
    int num_e_nodes = 0;
    std::vector<std::pair<int, int>> edges;  // (v_node, e_node)
    Matrix edge_features;                    // row k is the feature of edges[k]'s e-node
};

/// One hyperedge per term of the objective and of every constraint, in
/// storage order (objective first). Requires a normalized instance.
VariableRelationalHypergraph build_hypergraph(const QcqpInstance& instance,
                                              std::uint64_t feature_seed);

BipartiteView star_expand(const VariableRelationalHypergraph& h);

/// Debug dump: vertices with kind and features, hyperedges with members,
/// origin and features.
std::string hypergraph_to_json(const VariableRelationalHypergraph& h);

}  // namespace hyperqcqp
