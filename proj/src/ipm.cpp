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


#include "hyperqcqp/ipm.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "hyperqcqp/error.hpp"
#include "hyperqcqp/rng.hpp"
#include "ipm_internal.hpp"

namespace hyperqcqp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void QpStd::check_shape() const {
    const auto nn = c.size();
    const auto mm = b.size();
    if (Q.rows() != nn || Q.cols() != nn)
        throw InvalidArgument("QpStd: Q must be " + std::to_string(nn) + "x" + std::to_string(nn));
    if (A.rows() != mm || A.cols() != nn)
        throw InvalidArgument("QpStd: A must be " + std::to_string(mm) + "x" + std::to_string(nn));
    if (nn > 0 && (Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + Q.cwiseAbs().maxCoeff()))
        throw InvalidArgument("QpStd: Q must be symmetric");
}

bool check_convexity(QpStd& qp, double eps) {
    qp.check_shape();
    MatrixXd shifted = qp.Q;
    shifted.diagonal().array() += eps;
    Eigen::LLT<MatrixXd> llt(shifted);
    qp.convexity_checked = llt.info() == Eigen::Success;
    return qp.convexity_checked;
}

IpmState IpmState::initial(const QpStd& qp) {
    IpmState s;
    s.x = VectorXd::Ones(qp.n());
    s.z = VectorXd::Ones(qp.n());
    s.y = VectorXd::Ones(qp.m());
    s.w = VectorXd::Ones(qp.m());
    const int total = qp.n() + qp.m();
    s.mu = total == 0 ? 0.0 : (detail::seq_dot(s.z, s.x) + detail::seq_dot(s.y, s.w)) / total;
    return s;
}

void IpmConfig::check() const {
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("IpmConfig: delta must lie in (0, 1)");
    if (!(step_scale > 0.0 && step_scale <= 1.0))
        throw InvalidArgument("IpmConfig: step_scale must lie in (0, 1]");
    if (max_iter < 0) throw InvalidArgument("IpmConfig: max_iter must be nonnegative");
    if (!(tol > 0.0)) throw InvalidArgument("IpmConfig: tol must be positive");
}

double KktResiduals::max() const noexcept { return std::max({primal, dual, complementarity}); }

KktResiduals kkt_residuals(const QpStd& qp, const IpmState& s) {
    KktResiduals r;
    if (qp.m() > 0) r.primal = (qp.A * s.x - s.w - qp.b).cwiseAbs().maxCoeff();
    if (qp.n() > 0)
        r.dual = (qp.A.transpose() * s.y + s.z - qp.Q * s.x - qp.c).cwiseAbs().maxCoeff();
    const int total = qp.n() + qp.m();
    if (total > 0) r.complementarity = (s.x.dot(s.z) + s.y.dot(s.w)) / total;
    return r;
}

namespace {

Eigen::LDLT<MatrixXd> factor_m(const QpStd& qp, const IpmState& s) {
    MatrixXd M = qp.Q;
    for (int i = 0; i < qp.n(); ++i) M(i, i) += s.z[i] / s.x[i];
    Eigen::LDLT<MatrixXd> ldlt(M);
    if (ldlt.info() != Eigen::Success) throw NumericalError("ipm: X^-1 Z + Q is singular");
    return ldlt;
}

struct CgOutcome {
    VectorXd dy;
    int breakdown = -1;
    double rel_residual = 0.0;  // |P dy - rhs| / |rhs|, computed on request
};

CgOutcome cg_with(const QpStd& qp, const IpmState& s, int iters,
                  const Eigen::LDLT<MatrixXd>& m_inv, bool measure) {
    using detail::seq_dot;
    using detail::seq_mul;
    using detail::seq_mul_t;
    const int n = qp.n();
    const int m = qp.m();
    CgOutcome out;
    out.dy = VectorXd::Zero(m);
    if (m == 0 || iters <= 0) return out;

    const VectorXd aty = seq_mul_t(qp.A, s.y);
    const VectorXd qx = seq_mul(qp.Q, s.x);
    VectorXd r(n);
    for (int i = 0; i < n; ++i) r[i] = qp.c[i] - aty[i] + qx[i] - s.mu / s.x[i];
    const VectorXd am = seq_mul(qp.A, m_inv.solve(r));
    const VectorXd ax = seq_mul(qp.A, s.x);
    VectorXd rhs(m);
    for (int j = 0; j < m; ++j) rhs[j] = qp.b[j] - ax[j] + s.mu / s.y[j] + am[j];

    auto apply_p = [&](const VectorXd& p) {
        const VectorXd t = seq_mul(qp.A, m_inv.solve(seq_mul_t(qp.A, p)));
        VectorXd u(m);
        for (int j = 0; j < m; ++j) u[j] = t[j] + s.w[j] / s.y[j] * p[j];
        return u;
    };

    VectorXd& dy = out.dy;
    VectorXd p = rhs;
    VectorXd v = -p;
    double vv = seq_dot(v, v);
    const double vv0 = vv;
    for (int k = 0; k < iters; ++k) {
        if (vv <= 1e-30 * vv0 || vv == 0.0) break;
        const VectorXd u = apply_p(p);
        const double pu = seq_dot(p, u);
        if (!(pu > 0.0)) {
            out.breakdown = k;
            break;
        }
        const double alpha = vv / pu;
        for (int j = 0; j < m; ++j) dy[j] += alpha * p[j];
        for (int j = 0; j < m; ++j) v[j] += alpha * u[j];
        const double vv_new = seq_dot(v, v);
        const double beta = vv_new / vv;
        vv = vv_new;
        for (int j = 0; j < m; ++j) p[j] = -v[j] + beta * p[j];
    }
    if (measure) {
        const double scale = std::sqrt(seq_dot(rhs, rhs));
        const VectorXd res = apply_p(dy) - rhs;
        out.rel_residual = scale > 0.0 ? std::sqrt(seq_dot(res, res)) / scale : 0.0;
    }
    return out;
}

IpmDirection complete_direction(const IpmState& s, VectorXd dx, VectorXd dy) {
    const auto n = s.x.size();
    const auto m = s.y.size();
    IpmDirection d;
    d.dz.resize(n);
    d.dw.resize(m);
    for (Eigen::Index i = 0; i < n; ++i) d.dz[i] = s.mu / s.x[i] - s.z[i] - s.z[i] / s.x[i] * dx[i];
    for (Eigen::Index j = 0; j < m; ++j) d.dw[j] = s.mu / s.y[j] - s.w[j] - s.w[j] / s.y[j] * dy[j];
    d.dx = std::move(dx);
    d.dy = std::move(dy);
    return d;
}

// dx = M^-1 (A'(y + dy) + mu X^-1 e - c - Qx)
VectorXd primal_from_dual(const QpStd& qp, const IpmState& s, const VectorXd& dy,
                          const Eigen::LDLT<MatrixXd>& m_inv) {
    const int n = qp.n();
    VectorXd ydy = s.y + dy;
    const VectorXd h1 = detail::seq_mul_t(qp.A, ydy);
    const VectorXd qx = detail::seq_mul(qp.Q, s.x);
    VectorXd r(n);
    for (int i = 0; i < n; ++i) r[i] = h1[i] + s.mu / s.x[i] - qp.c[i] - qx[i];
    return m_inv.solve(r);
}

IpmDirection primal_normal_direction(const QpStd& qp, const IpmState& s) {
    // (M + A' W^-1 Y A) dx = r + A' (mu W^-1 e - y + W^-1 Y rho)
    const VectorXd r = qp.A.transpose() * s.y - qp.c - qp.Q * s.x + s.mu * s.x.cwiseInverse();
    const VectorXd rho = qp.b - qp.A * s.x + s.w;
    const VectorXd yw = s.y.cwiseQuotient(s.w);
    MatrixXd T = qp.Q;
    T.diagonal() += s.z.cwiseQuotient(s.x);
    T.noalias() += qp.A.transpose() * yw.asDiagonal() * qp.A;
    const VectorXd t = s.mu * s.w.cwiseInverse() - s.y + yw.cwiseProduct(rho);
    Eigen::LDLT<MatrixXd> ldlt(T);
    if (ldlt.info() != Eigen::Success) throw NumericalError("ipm: primal normal matrix is singular");
    VectorXd dx = ldlt.solve(r + qp.A.transpose() * t);
    VectorXd dy = s.mu * s.w.cwiseInverse() - s.y - yw.cwiseProduct(qp.A * dx - rho);
    return complete_direction(s, std::move(dx), std::move(dy));
}

}  // namespace

VectorXd cg_solve(const QpStd& qp, const IpmState& s, int iters) {
    qp.check_shape();
    const CgOutcome out = cg_with(qp, s, iters, factor_m(qp, s), false);
    if (out.breakdown >= 0)
        throw NumericalError("cg_solve: breakdown p'u <= 0 at iteration " +
                             std::to_string(out.breakdown));
    return out.dy;
}

IpmDirection ipm_direction(const QpStd& qp, const IpmState& s, const IpmConfig& cfg,
                           IpmDirectionInfo* info) {
    IpmDirectionInfo local;
    IpmDirectionInfo& meta = info ? *info : local;
    meta = {};
    if (cfg.solver == KktSolver::primal_normal) return primal_normal_direction(qp, s);

    const auto m_inv = factor_m(qp, s);
    const int iters = cfg.cg_iters < 0 ? qp.m() : cfg.cg_iters;
    const bool guarded = cfg.cg_fallback_tol > 0.0;
    CgOutcome cg = cg_with(qp, s, iters, m_inv, guarded);
    meta.cg_breakdown = cg.breakdown;
    meta.cg_residual = cg.rel_residual;
    if (guarded && (cg.breakdown >= 0 || !(cg.rel_residual <= cfg.cg_fallback_tol))) {
        meta.used_fallback = true;
        return primal_normal_direction(qp, s);
    }
    VectorXd dx = primal_from_dual(qp, s, cg.dy, m_inv);
    return complete_direction(s, std::move(dx), std::move(cg.dy));
}

double max_step(const IpmState& s, const IpmDirection& d) {
    double alpha = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < s.x.size(); ++i)
        alpha = std::min(alpha, detail::coordinate_step(s.x[i], d.dx[i], s.z[i], d.dz[i]));
    for (Eigen::Index j = 0; j < s.y.size(); ++j)
        alpha = std::min(alpha, detail::coordinate_step(s.y[j], d.dy[j], s.w[j], d.dw[j]));
    return alpha;
}

IpmIteration ipm_step(const QpStd& qp, const IpmState& s, const IpmConfig& cfg) {
    IpmIteration it;
    IpmDirectionInfo info;
    it.direction = ipm_direction(qp, s, cfg, &info);
    it.cg_breakdown = info.cg_breakdown;
    it.used_fallback = info.used_fallback;
    it.alpha = std::min(max_step(s, it.direction), 1.0 / cfg.step_scale);
    it.stalled = !(it.alpha > 1e-12);
    const double step = cfg.step_scale * it.alpha;
    it.state.x = s.x + step * it.direction.dx;
    it.state.z = s.z + step * it.direction.dz;
    it.state.y = s.y + step * it.direction.dy;
    it.state.w = s.w + step * it.direction.dw;
    it.residuals = kkt_residuals(qp, it.state);
    it.state.mu = cfg.adaptive_mu ? cfg.delta * it.residuals.complementarity : cfg.delta * s.mu;
    return it;
}

namespace {

bool finite_state(const IpmState& s) {
    return s.x.allFinite() && s.y.allFinite() && s.z.allFinite() && s.w.allFinite();
}

}  // namespace

IpmResult ipm_solve(const QpStd& qp, const IpmConfig& cfg, bool keep_trace) {
    qp.check_shape();
    cfg.check();
    IpmResult result;
    IpmState s = IpmState::initial(qp);
    KktResiduals res = kkt_residuals(qp, s);
    result.state = s;
    result.residuals = res;
    double best = res.max();
    int iter = 0;
    for (; iter < cfg.max_iter && !(res.max() < cfg.tol); ++iter) {
        IpmIteration it;
        try {
            it = ipm_step(qp, s, cfg);
        } catch (const NumericalError& e) {
            result.message = e.what();
            break;
        }
        if (!finite_state(it.state)) {
            result.message = "ipm: non-finite iterate at iteration " + std::to_string(iter);
            break;
        }
        s = it.state;
        res = it.residuals;
        if (res.max() <= best) {
            best = res.max();
            result.state = s;
            result.residuals = res;
        }
        if (keep_trace) result.trace.iterations.push_back(std::move(it));
    }
    result.iterations = iter;
    result.converged = result.residuals.max() < cfg.tol;
    if (!result.converged && result.message.empty())
        result.message = "ipm: no convergence within " + std::to_string(cfg.max_iter) + " iterations";
    result.x = result.state.x;
    result.objective = qp.objective(result.x);
    return result;
}

IpmTrace direct_ipm_trace(const QpStd& qp, const IpmConfig& config, int iters) {
    qp.check_shape();
    config.check();
    IpmConfig cfg = config;
    cfg.cg_fallback_tol = 0.0;
    cfg.adaptive_mu = false;
    IpmTrace trace;
    IpmState s = IpmState::initial(qp);
    for (int k = 0; k < iters; ++k) {
        trace.iterations.push_back(ipm_step(qp, s, cfg));
        s = trace.iterations.back().state;
    }
    return trace;
}

double trace_deviation(const IpmTrace& a, const IpmTrace& b) {
    if (a.iterations.size() != b.iterations.size())
        throw InvalidArgument("trace_deviation: traces differ in length");
    double dev = 0.0;
    auto scalar = [&](double u, double v) {
        if (u == v || (std::isnan(u) && std::isnan(v))) return;
        const double d = std::abs(u - v);
        dev = std::isnan(d) ? std::numeric_limits<double>::infinity() : std::max(dev, d);
    };
    auto diff = [&](const VectorXd& u, const VectorXd& v) {
        if (u.size() != v.size()) throw InvalidArgument("trace_deviation: vector sizes differ");
        for (Eigen::Index k = 0; k < u.size(); ++k) scalar(u[k], v[k]);
    };
    for (std::size_t k = 0; k < a.iterations.size(); ++k) {
        const auto& p = a.iterations[k];
        const auto& q = b.iterations[k];
        diff(p.state.x, q.state.x);
        diff(p.state.w, q.state.w);
        diff(p.state.y, q.state.y);
        diff(p.state.z, q.state.z);
        diff(p.direction.dx, q.direction.dx);
        diff(p.direction.dw, q.direction.dw);
        diff(p.direction.dy, q.direction.dy);
        diff(p.direction.dz, q.direction.dz);
        scalar(p.state.mu, q.state.mu);
        scalar(p.alpha, q.alpha);
    }
    return dev;
}

std::vector<double> StdFormMap::recover(const VectorXd& x) const {
    std::vector<double> out(fixed.size());
    for (std::size_t c = 0; c < fixed.size(); ++c) out[c] = fixed[c];
    for (std::size_t k = 0; k < column.size(); ++k) out[column[k]] = lb[column[k]] + x[k];
    return out;
}

double StdFormMap::lp_objective(const VectorXd& x) const {
    return sign_flip * (qp.objective(x) + objective_offset);
}

namespace {

struct ColumnSpec {
    double lb = 0.0;
    double ub = 0.0;
};

// Rows are `sum coef * col <= rhs`; the objective is
// 0.5 col'H col + g'col + g0 in the source sense.
StdFormMap build_std(const std::vector<ColumnSpec>& cols,
                     const std::vector<LpRow>& rows, const MatrixXd& H, const VectorXd& g,
                     double g0, bool maximize) {
    const int nc = static_cast<int>(cols.size());
    StdFormMap map;
    map.lb.resize(nc);
    map.fixed.assign(nc, std::numeric_limits<double>::quiet_NaN());
    std::vector<int> std_index(nc, -1);
    for (int c = 0; c < nc; ++c) {
        if (!std::isfinite(cols[c].lb))
            throw InvalidArgument("std form: column " + std::to_string(c) + " needs a finite lower bound");
        if (cols[c].ub < cols[c].lb)
            throw InvalidArgument("std form: column " + std::to_string(c) + " has lb > ub");
        map.lb[c] = cols[c].lb;
        if (cols[c].lb == cols[c].ub) {
            map.fixed[c] = cols[c].lb;
        } else {
            std_index[c] = static_cast<int>(map.column.size());
            map.column.push_back(c);
        }
    }
    const int n = static_cast<int>(map.column.size());
    // Base point: lb for free columns, the fixed value otherwise.
    VectorXd base(nc);
    for (int c = 0; c < nc; ++c) base[c] = cols[c].lb;

    std::vector<std::pair<std::vector<std::pair<int, double>>, double>> ge_rows;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        double rhs = rows[r].rhs;
        std::vector<std::pair<int, double>> coefs;
        for (const auto& [c, a] : rows[r].coefs) {
            rhs -= a * base[c];
            if (std_index[c] >= 0) coefs.emplace_back(std_index[c], -a);
        }
        if (coefs.empty()) {
            if (rhs < -kFeasibilityTol) map.trivially_infeasible = true;
            continue;
        }
        ge_rows.emplace_back(std::move(coefs), -rhs);
    }
    for (int k = 0; k < n; ++k) {
        const ColumnSpec& spec = cols[map.column[k]];
        if (std::isfinite(spec.ub)) ge_rows.push_back({{{k, -1.0}}, -(spec.ub - spec.lb)});
    }

    const double flip = maximize ? -1.0 : 1.0;
    map.sign_flip = flip;
    QpStd& qp = map.qp;
    qp.Q = MatrixXd::Zero(n, n);
    qp.c = VectorXd::Zero(n);
    const VectorXd grad_base = H * base + g;
    for (int k = 0; k < n; ++k) {
        qp.c[k] = flip * grad_base[map.column[k]];
        for (int l = 0; l < n; ++l) qp.Q(k, l) = flip * H(map.column[k], map.column[l]);
    }
    map.objective_offset = flip * (0.5 * base.dot(H * base) + g.dot(base) + g0);

    qp.A = MatrixXd::Zero(static_cast<Eigen::Index>(ge_rows.size()), n);
    qp.b = VectorXd::Zero(static_cast<Eigen::Index>(ge_rows.size()));
    for (std::size_t r = 0; r < ge_rows.size(); ++r) {
        for (const auto& [k, a] : ge_rows[r].first) qp.A(static_cast<Eigen::Index>(r), k) += a;
        qp.b[static_cast<Eigen::Index>(r)] = ge_rows[r].second;
    }
    return map;
}

}  // namespace

StdFormMap qp_from_lp(const LpDescription& lp) {
    if (!lp.objective_linearized)
        throw InvalidArgument("qp_from_lp: LP objective must be linearized");
    const int nc = static_cast<int>(lp.columns.size());
    std::vector<ColumnSpec> cols(nc);
    for (int c = 0; c < nc; ++c) cols[c] = {lp.columns[c].lb, lp.columns[c].ub};
    VectorXd g = VectorXd::Zero(nc);
    for (int c = 0; c < nc && c < static_cast<int>(lp.objective.size()); ++c) g[c] = lp.objective[c];
    StdFormMap map = build_std(cols, lp.rows, MatrixXd::Zero(nc, nc), g, lp.objective_constant,
                               lp.sense == ObjectiveSense::maximize);
    map.qp.convexity_checked = true;
    return map;
}

StdFormMap qp_from_instance(const QcqpInstance& instance) {
    const QcqpInstance norm = normalize(instance);
    const int n = norm.num_vars();
    std::vector<ColumnSpec> cols(n);
    for (int i = 0; i < n; ++i) cols[i] = {norm.vars[i].lb, norm.vars[i].ub};
    std::vector<LpRow> rows;
    for (std::size_t r = 0; r < norm.constraints.size(); ++r) {
        const Constraint& c = norm.constraints[r];
        if (!c.terms.quadratic.empty())
            throw InvalidArgument("qp_from_instance: constraint " + std::to_string(r) +
                                  " is quadratic");
        LpRow row;
        row.rhs = c.rhs;
        for (const auto& t : c.terms.linear) row.coefs.emplace_back(t.var, t.coef);
        rows.push_back(std::move(row));
    }
    MatrixXd H = MatrixXd::Zero(n, n);
    VectorXd g = VectorXd::Zero(n);
    for (const auto& t : norm.objective.linear) g[t.var] += t.coef;
    for (const auto& t : norm.objective.quadratic) {
        if (t.is_square()) {
            H(t.i, t.i) += 2.0 * t.coef;
        } else {
            H(t.i, t.j) += t.coef;
            H(t.j, t.i) += t.coef;
        }
    }
    StdFormMap map =
            build_std(cols, rows, H, g, 0.0, norm.sense == ObjectiveSense::maximize);
    if (!check_convexity(map.qp))
        throw InvalidArgument("qp_from_instance: objective is not convex in the minimization sense");
    return map;
}

QpStd random_convex_qp(std::uint64_t seed, int max_n, int max_m) {
    SplitMix64 r(seed);
    const int n = 1 + static_cast<int>(r.below(max_n));
    const int m = 1 + static_cast<int>(r.below(max_m));
    QpStd qp;
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = r.uniform(-1, 1);
    qp.Q = M.transpose() * M + Eigen::MatrixXd::Identity(n, n);
    qp.Q = 0.5 * (qp.Q + qp.Q.transpose()).eval();
    qp.c.resize(n);
    for (int i = 0; i < n; ++i) qp.c[i] = r.uniform(-3, 3);
    qp.A.resize(m, n);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) qp.A(j, i) = r.uniform(-1, 1);
    Eigen::VectorXd x0(n);
    for (int i = 0; i < n; ++i) x0[i] = r.uniform(0, 2);
    qp.b = qp.A * x0;
    for (int j = 0; j < m; ++j) qp.b[j] -= r.uniform(0, 1);
    return qp;
}

}  // namespace hyperqcqp
