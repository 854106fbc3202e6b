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


// Message-passing replay of the interior-point iteration. Node state lives in
// plain per-node arrays; the only couplings are the messages below.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "hyperqcqp/error.hpp"
#include "hyperqcqp/ipm.hpp"
#include "ipm_internal.hpp"

namespace hyperqcqp {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Edge {
    int con;
    int var;
    double a;
};

struct ObjectiveEdge {
    int i;
    int j;  // i <= j
    double q;
};

class Graph {
 public:
    explicit Graph(const QpStd& qp) : n_(qp.n()), m_(qp.m()), c_(qp.c), b_(qp.b) {
        by_var_.resize(n_);
        by_con_.resize(m_);
        for (int j = 0; j < m_; ++j)
            for (int i = 0; i < n_; ++i)
                if (qp.A(j, i) != 0.0) {
                    const int e = static_cast<int>(edges_.size());
                    edges_.push_back({j, i, qp.A(j, i)});
                    by_var_[i].push_back(e);
                    by_con_[j].push_back(e);
                }
        for (int i = 0; i < n_; ++i)
            for (int j = i; j < n_; ++j)
                if (qp.Q(i, j) != 0.0) objective_edges_.push_back({i, j, qp.Q(i, j)});
    }

    int n() const { return n_; }
    int m() const { return m_; }
    const VectorXd& b() const { return b_; }

    /// h_i = sum over incident edges of a_ji * msg_j.
    VectorXd constraints_to_variables(const VectorXd& msg) const {
        VectorXd h = VectorXd::Zero(n_);
        for (int i = 0; i < n_; ++i)
            for (int e : by_var_[i]) h[i] += edges_[e].a * msg[edges_[e].con];
        return h;
    }

    /// h_j = sum over incident edges of a_ji * msg_i.
    VectorXd variables_to_constraints(const VectorXd& msg) const {
        VectorXd h = VectorXd::Zero(m_);
        for (int j = 0; j < m_; ++j)
            for (int e : by_con_[j]) h[j] += edges_[e].a * msg[edges_[e].var];
        return h;
    }

    static double sum_to_objective(const VectorXd& a, const VectorXd& b) {
        return detail::seq_dot(a, b);
    }

    /// Objective node broadcasts c.
    VectorXd objective_c() const { return c_; }

    /// Objective node receives x_i and returns (Qx)_i through its hyperedges.
    VectorXd objective_q_times(const VectorXd& x) const {
        VectorXd h = VectorXd::Zero(n_);
        for (const auto& e : objective_edges_) {
            h[e.i] += e.q * x[e.j];
            if (e.i != e.j) h[e.j] += e.q * x[e.i];
        }
        return h;
    }

    /// Objective node assembles its local matrix Q + diag(d) from its
    /// hyperedges and the per-variable messages d_i.
    Eigen::LDLT<MatrixXd> objective_factor(const VectorXd& d) const {
        MatrixXd M = MatrixXd::Zero(n_, n_);
        for (const auto& e : objective_edges_) {
            M(e.i, e.j) = e.q;
            M(e.j, e.i) = e.q;
        }
        for (int i = 0; i < n_; ++i) M(i, i) += d[i];
        Eigen::LDLT<MatrixXd> ldlt(M);
        if (ldlt.info() != Eigen::Success) throw NumericalError("ipm: X^-1 Z + Q is singular");
        return ldlt;
    }

 private:
    int n_;
    int m_;
    VectorXd c_;
    VectorXd b_;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> by_var_;
    std::vector<std::vector<int>> by_con_;
    std::vector<ObjectiveEdge> objective_edges_;
};

struct Nodes {
    VectorXd x, z;  // variable nodes
    VectorXd y, w;  // constraint nodes
    double mu = 0.0;  // objective node
};

VectorXd emulate_cg(const Graph& g, const Nodes& s, const Eigen::LDLT<MatrixXd>& m_inv,
                    int iters, int* breakdown) {
    *breakdown = -1;
    const int n = g.n();
    const int m = g.m();
    VectorXd dy = VectorXd::Zero(m);
    if (m == 0 || iters <= 0) return dy;

    // Line 1: initial p.
    const VectorXd h1 = g.constraints_to_variables(s.y);
    const VectorXd h3 = g.objective_c();
    const VectorXd h4 = g.objective_q_times(s.x);
    VectorXd r(n);
    for (int i = 0; i < n; ++i) r[i] = h3[i] - h1[i] + h4[i] - s.mu / s.x[i];
    const VectorXd h6 = m_inv.solve(r);
    const VectorXd h7 = g.variables_to_constraints(h6);
    const VectorXd ax = g.variables_to_constraints(s.x);
    VectorXd p(m);
    for (int j = 0; j < m; ++j) p[j] = g.b()[j] - ax[j] + s.mu / s.y[j] + h7[j];

    VectorXd v = -p;
    double vv = Graph::sum_to_objective(v, v);
    const double vv0 = vv;
    for (int k = 0; k < iters; ++k) {
        if (vv <= 1e-30 * vv0 || vv == 0.0) break;
        const VectorXd t1 = g.constraints_to_variables(p);
        const VectorXd t3 = m_inv.solve(t1);
        const VectorXd t4 = g.variables_to_constraints(t3);
        VectorXd u(m);
        for (int j = 0; j < m; ++j) u[j] = t4[j] + s.w[j] / s.y[j] * p[j];
        const double pu = Graph::sum_to_objective(p, u);
        if (!(pu > 0.0)) {
            *breakdown = k;
            break;
        }
        const double alpha = vv / pu;
        for (int j = 0; j < m; ++j) dy[j] += alpha * p[j];
        for (int j = 0; j < m; ++j) v[j] += alpha * u[j];
        const double vv_new = Graph::sum_to_objective(v, v);
        const double beta = vv_new / vv;
        vv = vv_new;
        for (int j = 0; j < m; ++j) p[j] = -v[j] + beta * p[j];
    }
    return dy;
}

IpmIteration emulate_step(const Graph& g, Nodes& s, const IpmConfig& cfg) {
    const int n = g.n();
    const int m = g.m();
    VectorXd d(n);
    for (int i = 0; i < n; ++i) d[i] = s.z[i] / s.x[i];
    const auto m_inv = g.objective_factor(d);

    IpmIteration it;
    if (cfg.solver != KktSolver::conjugate_gradient)
        throw InvalidArgument("mpnn_emulate_ipm: only the conjugate-gradient schedule is emulated");
    if (cfg.adaptive_mu)
        throw InvalidArgument("mpnn_emulate_ipm: only the geometric mu schedule is emulated");
    const int iters = cfg.cg_iters < 0 ? m : cfg.cg_iters;
    VectorXd dy = emulate_cg(g, s, m_inv, iters, &it.cg_breakdown);

    // dx: constraints send y + dy, objective sends mu, c and Qx.
    VectorXd ydy(m);
    for (int j = 0; j < m; ++j) ydy[j] = s.y[j] + dy[j];
    const VectorXd h1 = g.constraints_to_variables(ydy);
    const VectorXd h3 = g.objective_c();
    const VectorXd h4 = g.objective_q_times(s.x);
    VectorXd r(n);
    for (int i = 0; i < n; ++i) r[i] = h1[i] + s.mu / s.x[i] - h3[i] - h4[i];
    VectorXd dx = m_inv.solve(r);

    VectorXd dz(n), dw(m);
    for (int i = 0; i < n; ++i) dz[i] = s.mu / s.x[i] - s.z[i] - s.z[i] / s.x[i] * dx[i];
    for (int j = 0; j < m; ++j) dw[j] = s.mu / s.y[j] - s.w[j] - s.w[j] / s.y[j] * dy[j];

    // Per-node step limits, min-reduced at the objective node.
    double alpha_v = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        alpha_v = std::min(alpha_v, detail::coordinate_step(s.x[i], dx[i], s.z[i], dz[i]));
    double alpha_c = std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j)
        alpha_c = std::min(alpha_c, detail::coordinate_step(s.y[j], dy[j], s.w[j], dw[j]));
    const double alpha = std::min({alpha_v, alpha_c, 1.0 / cfg.step_scale});

    const double step = cfg.step_scale * alpha;
    for (int i = 0; i < n; ++i) {
        s.x[i] += step * dx[i];
        s.z[i] += step * dz[i];
    }
    for (int j = 0; j < m; ++j) {
        s.y[j] += step * dy[j];
        s.w[j] += step * dw[j];
    }
    s.mu *= cfg.delta;

    it.alpha = alpha;
    it.stalled = !(alpha > 1e-12);
    it.direction = {std::move(dx), std::move(dw), std::move(dy), std::move(dz)};
    it.state = {s.x, s.w, s.y, s.z, s.mu};
    return it;
}

}  // namespace

IpmTrace mpnn_emulate_ipm(const QpStd& qp, const IpmConfig& cfg, int iters) {
    qp.check_shape();
    cfg.check();
    const Graph g(qp);
    Nodes s;
    s.x = VectorXd::Ones(g.n());
    s.z = VectorXd::Ones(g.n());
    s.y = VectorXd::Ones(g.m());
    s.w = VectorXd::Ones(g.m());
    // Line 1: mu from a variable-to-objective and a constraint-to-objective sum.
    const int total = g.n() + g.m();
    s.mu = total == 0 ? 0.0
                      : (Graph::sum_to_objective(s.z, s.x) + Graph::sum_to_objective(s.y, s.w)) /
                                total;
    IpmTrace trace;
    for (int k = 0; k < iters; ++k) {
        trace.iterations.push_back(emulate_step(g, s, cfg));
        trace.iterations.back().residuals = kkt_residuals(qp, trace.iterations.back().state);
    }
    return trace;
}

}  // namespace hyperqcqp
