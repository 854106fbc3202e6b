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

#include "hyperqcqp/instance.hpp"

namespace hyperqcqp {

struct OracleResult {
    bool feasible = false;  // false: no assignment satisfies the constraints
    Assignment x;
    double objective = 0.0;
};

/// Exact optimum of an all-binary instance by enumerating all 2^n points as
/// a binary counter with x_0 as the lowest bit. Each point is scored with a
/// full `evaluate` and the first strictly better point wins, so ties resolve
/// to the smallest counter value: max x0 + x1 s.t. x0*x1 <= 0 yields (1, 0).
OracleResult brute_force_oracle(const QcqpInstance& instance, int max_free = 22);

}  // namespace hyperqcqp
