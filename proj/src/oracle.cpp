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

#include "hyperqcqp/oracle.hpp"

#include <cstdint>

#include "hyperqcqp/error.hpp"

namespace hyperqcqp {

OracleResult brute_force_oracle(const QcqpInstance& instance, int max_free) {
    const int n = instance.num_vars();
    if (n > max_free)
        throw InvalidArgument("brute_force_oracle: " + std::to_string(n) +
                              " variables exceeds limit " + std::to_string(max_free));
    if (!instance.all_binary())
        throw InvalidArgument("brute_force_oracle: non-binary variable present");

    const double sign = instance.sign();
    OracleResult best;
    double best_score = 0.0;
    Assignment x(n, 0.0);
    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        for (int i = 0; i < n; ++i) x[i] = static_cast<double>((mask >> i) & 1U);
        const EvalReport r = evaluate(instance, x);
        if (!r.feasible) continue;
        const double score = sign * r.objective;
        if (!best.feasible || score > best_score) {
            best.feasible = true;
            best.x = x;
            best.objective = r.objective;
            best_score = score;
        }
    }
    return best;
}

}  // namespace hyperqcqp
