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

// Independent reference solvers used only by tests and the acceptance run.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hyperqcqp/ipm.hpp"
#include "hyperqcqp/mccormick.hpp"
#include "hyperqcqp/rng.hpp"

namespace hyperqcqp::testing {

struct ReferenceSolution {
    Eigen::VectorXd x;
    double objective = std::numeric_limits<double>::infinity();
};

/// Active-set enumeration: for every subset S of the rows of [A; I] x >= [b; 0]
/// solve the equality-constrained KKT system and keep the best feasible
/// stationary point. Exact for strictly convex Q.
inline ReferenceSolution active_set_oracle(const QpStd& qp, double feas_tol = 1e-9) {
    const int n = qp.n(), m = qp.m(), rows = m + n;
    Eigen::MatrixXd G(rows, n);
    G << qp.A, Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd h(rows);
    h << qp.b, Eigen::VectorXd::Zero(n);
    ReferenceSolution best;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << rows); ++mask) {
        std::vector<int> act;
        for (int r = 0; r < rows; ++r)
            if (mask >> r & 1U) act.push_back(r);
        if (static_cast<int>(act.size()) > n) continue;
        const int k = static_cast<int>(act.size());
        Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + k, n + k);
        Eigen::VectorXd rhs(n + k);
        K.topLeftCorner(n, n) = qp.Q;
        rhs.head(n) = -qp.c;
        for (int a = 0; a < k; ++a) {
            K.block(0, n + a, n, 1) = -G.row(act[a]).transpose();
            K.block(n + a, 0, 1, n) = G.row(act[a]);
            rhs[n + a] = h[act[a]];
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
        if (lu.rank() < n + k) continue;
        const Eigen::VectorXd sol = lu.solve(rhs);
        const Eigen::VectorXd x = sol.head(n);
        if (((G * x - h).array() < -feas_tol).any()) continue;
        const double obj = qp.objective(x);
        if (obj < best.objective) {
            best.objective = obj;
            best.x = x;
        }
    }
    return best;
}

/// min c'x s.t. G x >= h by enumerating every vertex (n-row subsets with a
/// nonsingular block). Assumes a bounded feasible region.
inline std::optional<ReferenceSolution> lp_vertex_oracle(const Eigen::VectorXd& c, const Eigen::MatrixXd& G,
                                                         const Eigen::VectorXd& h, double feas_tol = 1e-9) {
    const int n = static_cast<int>(c.size());
    const int rows = static_cast<int>(G.rows());
    std::optional<ReferenceSolution> best;
    std::vector<int> pick(n);
    // Lexicographic n-combinations of the rows.
    for (int i = 0; i < n; ++i) pick[i] = i;
    if (n > rows) return best;
    for (;;) {
        Eigen::MatrixXd B(n, n);
        Eigen::VectorXd rb(n);
        for (int i = 0; i < n; ++i) {
            B.row(i) = G.row(pick[i]);
            rb[i] = h[pick[i]];
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
        if (lu.rank() == n) {
            const Eigen::VectorXd x = lu.solve(rb);
            if (!((G * x - h).array() < -feas_tol).any()) {
                const double obj = c.dot(x);
                if (!best || obj < best->objective) best = ReferenceSolution{x, obj};
            }
        }
        int i = n - 1;
        while (i >= 0 && pick[i] == rows - n + i) --i;
        if (i < 0) break;
        ++pick[i];
        for (int j = i + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
    }
    return best;
}

/// The LP relaxation as min c'x s.t. G x >= h (columns' bounds included),
/// plus the constant and sign that recover the source objective.
struct DenseLp {
    Eigen::VectorXd c;
    Eigen::MatrixXd G;
    Eigen::VectorXd h;
    double constant = 0.0;
    double sign = 1.0;  // source objective = sign * (c'x) + constant
};

inline DenseLp dense_from_lp(const LpDescription& lp) {
    const int n = static_cast<int>(lp.columns.size());
    const int r = static_cast<int>(lp.rows.size());
    DenseLp d;
    d.sign = lp.sense == ObjectiveSense::maximize ? -1.0 : 1.0;
    d.c = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < n; ++k) d.c[k] = d.sign * lp.objective[k];
    d.constant = lp.objective_constant;
    d.G = Eigen::MatrixXd::Zero(r + 2 * n, n);
    d.h = Eigen::VectorXd::Zero(r + 2 * n);
    for (int i = 0; i < r; ++i) {
        for (auto [col, coef] : lp.rows[i].coefs) d.G(i, col) -= coef;
        d.h[i] = -lp.rows[i].rhs;
    }
    for (int k = 0; k < n; ++k) {
        d.G(r + 2 * k, k) = 1.0;
        d.h[r + 2 * k] = lp.columns[k].lb;
        d.G(r + 2 * k + 1, k) = -1.0;
        d.h[r + 2 * k + 1] = -lp.columns[k].ub;
    }
    return d;
}

}  // namespace hyperqcqp::testing
