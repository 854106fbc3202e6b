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

#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "hyperqcqp/instance.hpp"

namespace hyperqcqp::testing {

inline QcqpInstance binary_instance(int n, ObjectiveSense sense = ObjectiveSense::maximize) {
    QcqpInstance inst;
    inst.name = "t";
    inst.sense = sense;
    for (int i = 0; i < n; ++i) inst.vars.push_back({"x" + std::to_string(i), 0.0, 1.0, VarType::binary});
    return inst;
}

inline TermList terms(std::initializer_list<std::pair<int, double>> lin,
                      std::initializer_list<QuadraticTerm> quad = {}) {
    TermList t;
    for (auto [v, c] : lin) t.linear.push_back({v, c});
    t.quadratic.assign(quad.begin(), quad.end());
    return t;
}

inline Constraint le(TermList t, double rhs) { return {std::move(t), ConstraintSense::le, rhs}; }

/// All 2^n binary points in counter order, x_0 the lowest bit.
inline std::vector<Assignment> all_points(int n) {
    std::vector<Assignment> out;
    for (long k = 0; k < (1L << n); ++k) {
        Assignment x(n);
        for (int i = 0; i < n; ++i) x[i] = (k >> i) & 1;
        out.push_back(std::move(x));
    }
    return out;
}

}  // namespace hyperqcqp::testing
