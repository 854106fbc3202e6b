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

#include "hyperqcqp/instance.hpp"

namespace hyperqcqp {

/// Quadratic multiple knapsack:
///   max  sum_i c_i x_i + sum_{(i,j) in E} q_ij x_i x_j
///   s.t. sum_i a_i^k x_i <= b^k,  b^k = 0.5 * sum_i a_i^k,  x binary.
struct QmkpParams {
    int n = 16;
    int m = 3;
    double edge_factor = 5.0;  // |E| = round(edge_factor * n)
    std::uint64_t seed = 0;
};

/// Random hypergraph QCQP, one constraint per hyperedge e:
///   sum_{i in e} a_i x_i + sum_{i<j in e} q_ij x_i x_j <= |e|
/// with a linear objective sum_i c_i x_i to maximize.
struct RandqcpParams {
    int n = 16;
    int m = 12;
    int arity_min = 2;
    int arity_max = 5;
    std::uint64_t seed = 0;
};

/// Draw order (SplitMix64 seeded with `seed`): c_0..c_{n-1}; the edge set;
/// q for each edge in (i, j) order; then a^k_i row by row. U(0,1) draws that
/// land on exactly 0 are redrawn since stored coefficients must be nonzero.
QcqpInstance gen_qmkp(const QmkpParams& p);

/// Draw order: c_0..c_{n-1}; then per hyperedge its arity, its members
/// (sampled without replacement, stored ascending), a_i per member and q_ij
/// per member pair.
QcqpInstance gen_randqcp(const RandqcpParams& p);

}  // namespace hyperqcqp
