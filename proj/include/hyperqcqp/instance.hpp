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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hyperqcqp {

inline constexpr double kFeasibilityTol = 1e-6;
inline constexpr double kIntegralityTol = 1e-6;

enum class VarType { binary, integer, continuous };

struct VarInfo {
    std::string name;
    double lb = 0.0;
    double ub = 1.0;
    VarType type = VarType::binary;

    friend bool operator==(const VarInfo&, const VarInfo&) = default;
};

struct LinearTerm {
    int var = 0;
    double coef = 0.0;

    friend bool operator==(const LinearTerm&, const LinearTerm&) = default;
};

/// Monomial coefficient: `coef * x_i * x_j` with `i <= j`; `i == j` is a
/// square term. Each unordered pair is stored once, so converting to a
/// symmetric matrix halves the off-diagonal coefficient.
struct QuadraticTerm {
    int i = 0;
    int j = 0;
    double coef = 0.0;

    bool is_square() const noexcept { return i == j; }

    friend bool operator==(const QuadraticTerm&, const QuadraticTerm&) = default;
};

struct TermList {
    std::vector<LinearTerm> linear;
    std::vector<QuadraticTerm> quadratic;

    std::size_t size() const noexcept { return linear.size() + quadratic.size(); }
    bool empty() const noexcept { return linear.empty() && quadratic.empty(); }

    /// Sum of all monomials at `x`.
    double value(const std::vector<double>& x) const noexcept;

    /// Every term multiplied by `factor`.
    TermList scaled(double factor) const;

    friend bool operator==(const TermList&, const TermList&) = default;
};

enum class ConstraintSense { le, ge, eq };

struct Constraint {
    TermList terms;
    ConstraintSense sense = ConstraintSense::le;
    double rhs = 0.0;

    friend bool operator==(const Constraint&, const Constraint&) = default;
};

enum class ObjectiveSense { minimize, maximize };

using Assignment = std::vector<double>;

struct QcqpInstance {
    std::string name;
    ObjectiveSense sense = ObjectiveSense::minimize;
    std::vector<VarInfo> vars;
    TermList objective;
    std::vector<Constraint> constraints;
    std::optional<std::uint64_t> seed_provenance;

    int num_vars() const noexcept { return static_cast<int>(vars.size()); }
    int num_constraints() const noexcept { return static_cast<int>(constraints.size()); }

    /// +1 for maximization, -1 for minimization. `sign() * objective` is the
    /// score every search routine maximizes.
    double sign() const noexcept { return sense == ObjectiveSense::maximize ? 1.0 : -1.0; }

    bool is_normalized() const noexcept;
    bool all_binary() const noexcept;

    friend bool operator==(const QcqpInstance&, const QcqpInstance&) = default;
};

struct EvalReport {
    double objective = 0.0;
    std::vector<double> activities;
    std::vector<double> violations;
    double max_violation = 0.0;
    double bound_violation = 0.0;
    double integrality_violation = 0.0;
    bool feasible = false;

    int violated_count() const noexcept;
};

/// Throws SchemaError naming the offending field if any invariant fails:
/// indices in range, `i <= j`, no duplicate keys, finite nonzero
/// coefficients, `lb <= ub`, binary bounds exactly [0, 1], no empty
/// constraint.
void validate(const QcqpInstance& instance);

QcqpInstance load_instance(std::string_view json_text);
QcqpInstance load_instance_file(const std::filesystem::path& path);

/// Canonical serialization: schema key order, terms in stored order,
/// shortest round-trip decimal encoding of every double.
std::string save_instance(const QcqpInstance& instance);
void save_instance_file(const QcqpInstance& instance, const std::filesystem::path& path);

/// Rewrite every constraint in `<=` form. `>=` rows are negated termwise;
/// `==` rows become a `<=` pair. Variable order and objective are untouched.
QcqpInstance normalize(const QcqpInstance& instance);

EvalReport evaluate(const QcqpInstance& instance, const Assignment& x,
                    double tol = kFeasibilityTol);

/// Activity of a single constraint's left-hand side.
double activity(const Constraint& constraint, const Assignment& x) noexcept;

}  // namespace hyperqcqp
