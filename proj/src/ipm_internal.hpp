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

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace hyperqcqp::detail {

/// Largest alpha > 0 with (a + alpha da)(b + alpha db) >= 0 on [0, alpha],
/// given a, b > 0.
inline double coordinate_step(double a, double da, double b, double db) noexcept {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double qa = da * db;
    const double qb = a * db + da * b;
    const double qc = a * b;
    if (qa == 0.0) return qb < 0.0 ? -qc / qb : inf;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0) return inf;
    const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
    double best = inf;
    if (q != 0.0) {
        const double r1 = q / qa;
        const double r2 = qc / q;
        if (r1 > 0.0) best = std::min(best, r1);
        if (r2 > 0.0) best = std::min(best, r2);
    }
    return best;
}

// Reductions below sum strictly left to right. Both the matrix form and the
// message-passing form of the iteration use this order, which keeps the two
// reproducible against each other to the last bit.

inline double seq_dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) noexcept {
    double s = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

/// (A x)_j = sum_i A(j, i) x_i.
inline Eigen::VectorXd seq_mul(const Eigen::MatrixXd& A, const Eigen::VectorXd& x) {
    Eigen::VectorXd h = Eigen::VectorXd::Zero(A.rows());
    for (Eigen::Index j = 0; j < A.rows(); ++j)
        for (Eigen::Index i = 0; i < A.cols(); ++i)
            if (A(j, i) != 0.0) h[j] += A(j, i) * x[i];
    return h;
}

/// (A' y)_i = sum_j A(j, i) y_j.
inline Eigen::VectorXd seq_mul_t(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
    Eigen::VectorXd h = Eigen::VectorXd::Zero(A.cols());
    for (Eigen::Index i = 0; i < A.cols(); ++i)
        for (Eigen::Index j = 0; j < A.rows(); ++j)
            if (A(j, i) != 0.0) h[i] += A(j, i) * y[j];
    return h;
}

}  // namespace hyperqcqp::detail
