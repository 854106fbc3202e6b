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

#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hyperqcqp/instance.hpp"
#include "hyperqcqp/mccormick.hpp"

namespace hyperqcqp {

/// min 0.5 x'Qx + c'x  s.t.  Ax >= b, x >= 0.
struct QpStd {
    Eigen::MatrixXd Q;
    Eigen::VectorXd c;
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    bool convexity_checked = false;

    int n() const noexcept { return static_cast<int>(c.size()); }
    int m() const noexcept { return static_cast<int>(b.size()); }
    double objective(const Eigen::VectorXd& x) const { return 0.5 * x.dot(Q * x) + c.dot(x); }

    /// Throws InvalidArgument on inconsistent shapes or an asymmetric Q.
    void check_shape() const;
};

/// Attempts a Cholesky factorization of Q + eps*I; sets `convexity_checked`
/// on success.
bool check_convexity(QpStd& qp, double eps = 1e-10);

/// Random strictly feasible convex QP: Q = M'M + I, A ~ U(-1,1),
/// b = A x0 - U(0,1) with x0 ~ U(0,2); n and m uniform on [1, max].
QpStd random_convex_qp(std::uint64_t seed, int max_n = 8, int max_m = 8);

/// Primal x, z (bound duals) and dual y, w (constraint slacks,
/// Ax - w = b), all strictly positive.
struct IpmState {
    Eigen::VectorXd x;
    Eigen::VectorXd w;
    Eigen::VectorXd y;
    Eigen::VectorXd z;
    double mu = 0.0;

    /// All-ones point with mu = (z'x + y'w) / (n + m).
    static IpmState initial(const QpStd& qp);
};

enum class KktSolver {
    conjugate_gradient,  // reduced system in dy solved by the CG recursion
    primal_normal,       // n x n system in dx, dense factorization
};

struct IpmConfig {
    double delta = 0.1;
    double tol = 1e-8;
    int max_iter = 200;
    int cg_iters = -1;  // negative: m
    double step_scale = 0.99;
    KktSolver solver = KktSolver::conjugate_gradient;
    /// When positive, a CG direction whose reduced-system relative residual
    /// exceeds this (or whose recursion broke down) is replaced by the
    /// primal-normal direction. Zero runs the CG recursion unguarded.
    double cg_fallback_tol = 1e-9;
    /// Set mu to delta times the complementarity gap of the new iterate
    /// instead of shrinking it geometrically. Keeps the iterates centred on
    /// degenerate LPs; the message-passing emulation supports only the
    /// geometric schedule.
    bool adaptive_mu = false;

    void check() const;
};

struct KktResiduals {
    double primal = 0.0;           // max |Ax - w - b|
    double dual = 0.0;             // max |A'y + z - Qx - c|
    double complementarity = 0.0;  // (x'z + y'w) / (n + m)

    double max() const noexcept;
};

KktResiduals kkt_residuals(const QpStd& qp, const IpmState& s);

struct IpmDirection {
    Eigen::VectorXd dx;
    Eigen::VectorXd dw;
    Eigen::VectorXd dy;
    Eigen::VectorXd dz;
};

struct IpmDirectionInfo {
    int cg_breakdown = -1;  // CG iteration where p'u <= 0 stopped the recursion
    double cg_residual = 0.0;
    bool used_fallback = false;
};

struct IpmIteration {
    IpmState state;  // after the update
    IpmDirection direction;
    double alpha = 0.0;  // step before scaling
    KktResiduals residuals;  // at `state`
    bool stalled = false;
    int cg_breakdown = -1;
    bool used_fallback = false;
};

struct IpmTrace {
    std::vector<IpmIteration> iterations;
};

struct IpmResult {
    Eigen::VectorXd x;
    double objective = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
    int iterations = 0;
    IpmState state;
    KktResiduals residuals;
    IpmTrace trace;
    std::string message;
};

/// Conjugate gradients on the reduced system
///   (A M^-1 A' + Y^-1 W) dy = b - Ax + mu Y^-1 e + A M^-1 (c - A'y + Qx - mu X^-1 e)
/// with M = X^-1 Z + Q. Starts from dy = 0, p = rhs, v = -p. Stops early once
/// v'v falls below 1e-30 of its initial value. Throws NumericalError naming
/// the iteration if p'u <= 0.
Eigen::VectorXd cg_solve(const QpStd& qp, const IpmState& s, int iters);

/// Newton direction at `s` using the configured KKT solver. Inside an
/// iteration a CG breakdown ends the recursion early (reported in `info`)
/// instead of throwing.
IpmDirection ipm_direction(const QpStd& qp, const IpmState& s, const IpmConfig& cfg,
                           IpmDirectionInfo* info = nullptr);

/// Largest alpha keeping every product (x+a dx)_i (z+a dz)_i and
/// (y+a dy)_j (w+a dw)_j nonnegative: the smallest positive root of each
/// per-coordinate quadratic, or +inf if none.
double max_step(const IpmState& s, const IpmDirection& d);

/// One iteration: direction, step alpha = min(max_step, 1/step_scale), update
/// by step_scale * alpha, then mu <- delta * mu (or delta times the new
/// complementarity gap under `adaptive_mu`).
IpmIteration ipm_step(const QpStd& qp, const IpmState& s, const IpmConfig& cfg);

/// Iterates from the all-ones point until kkt_residuals(...).max() < tol or
/// max_iter. A non-converged run returns the iterate with the smallest
/// residual and `converged = false`.
IpmResult ipm_solve(const QpStd& qp, const IpmConfig& cfg = {}, bool keep_trace = false);

/// Runs `iters` iterations as a message-passing schedule on the bipartite
/// variable/constraint graph plus an objective node. Variable nodes own
/// (x, z), constraint nodes own (y, w), the objective node owns Q and c.
/// Every cross-node quantity travels as a per-edge message or a per-node
/// reduction; the CG recursion follows the same line order as `cg_solve`.
/// The fallback of `cfg.cg_fallback_tol` is a global solve and is never used
/// here. Only the conjugate-gradient solver is supported.
IpmTrace mpnn_emulate_ipm(const QpStd& qp, const IpmConfig& cfg, int iters);

/// Same count of iterations of `ipm_step` from the initial point, with the
/// CG fallback disabled.
IpmTrace direct_ipm_trace(const QpStd& qp, const IpmConfig& cfg, int iters);

/// Largest elementwise difference between two traces over x, w, y, z, mu,
/// the directions and alpha. Throws if the lengths differ.
double trace_deviation(const IpmTrace& a, const IpmTrace& b);

/// Maps an LP relaxation to standard form. Fixed columns are substituted,
/// free columns shifted to x' = x - lb with x' <= ub - lb as an extra row,
/// rows negated into >= form and maximization negated.
struct StdFormMap {
    QpStd qp;
    std::vector<int> column;       // std variable k -> LP column
    Eigen::VectorXd lb;            // LP column lower bounds
    std::vector<double> fixed;     // LP column value if fixed, NaN otherwise
    double objective_offset = 0.0;  // constant dropped from the std-form objective
    double sign_flip = 1.0;         // -1 when the source maximizes
    bool trivially_infeasible = false;  // a row with no free column is violated

    /// LP column values from a std-form point.
    std::vector<double> recover(const Eigen::VectorXd& x) const;
    /// Source objective (original sense) of a std-form point:
    /// sign_flip * (qp.objective(x) + objective_offset).
    double lp_objective(const Eigen::VectorXd& x) const;
};

/// Requires a linearized objective.
StdFormMap qp_from_lp(const LpDescription& lp);

/// Convex continuous instance with linear constraints and finite lower
/// bounds, e.g. for the `ipm` command. Quadratic constraints are rejected.
StdFormMap qp_from_instance(const QcqpInstance& instance);

}  // namespace hyperqcqp
