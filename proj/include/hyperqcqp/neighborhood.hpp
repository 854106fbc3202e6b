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
#include <string>
#include <vector>

#include "hyperqcqp/instance.hpp"
#include "hyperqcqp/prediction.hpp"
#include "hyperqcqp/subsolvers.hpp"

namespace hyperqcqp {

struct SearchConfig {
    double alpha = 0.2;     // initial free proportion
    double alpha_ub = 0.5;  // cap on the free proportion
    double density_threshold = 32.0;
    int rounds = 20;
    std::int64_t time_ms = -1;  // wall-clock limit on the round loop, negative: none
    std::uint64_t seed = 0;
    SubsolverKind subsolver = SubsolverKind::exhaustive;
    Budget subsolver_budget;
    int threads = 1;

    void check() const;
    /// ceil(alpha_ub * n), at least 1.
    int s_max(int n) const;
};

enum class PartitionStrategy { acp, random };

struct PartitionPlan {
    std::vector<std::vector<int>> neighborhoods;  // each ascending
    PartitionStrategy strategy = PartitionStrategy::acp;
};

/// Constraints are shuffled; their variable lists (ascending, one slot per
/// membership) are concatenated, followed by one slot per variable that occurs
/// in no constraint; the slot stream is cut into ceil(slots / s_max) chunks
/// of s_max. A variable can recur across chunks.
PartitionPlan partition_acp(const QcqpInstance& instance, int s_max, std::uint64_t seed);

/// Shuffled variables cut into ceil(n / s_max) disjoint chunks.
PartitionPlan partition_random(const QcqpInstance& instance, int s_max, std::uint64_t seed);

/// Mean number of distinct variables per constraint; zero constraints give 0.
double variable_density(const QcqpInstance& instance);

/// random when the density exceeds the threshold or there are no constraints.
PartitionStrategy choose_partition(const QcqpInstance& instance, const SearchConfig& cfg);

struct InitialResult {
    bool feasible = false;
    Assignment x;
    double objective = 0.0;
    double alpha = 0.0;      // free proportion of the successful attempt
    int attempts = 0;
    bool used_fallback = false;  // the all-free stage was needed
    std::string report;
};

/// Fix the most confident (1 - alpha) n variables at their rounded
/// prediction, repair with cap s_max, and search the free set for a first
/// feasible point. Failed attempts escalate alpha <- min(1.5 alpha, alpha_ub);
/// after an attempt at alpha_ub fails, all variables are freed from the
/// all-lower-bound point.
InitialResult initial_feasible(const QcqpInstance& instance, const PredictionResult& prediction,
                               const SearchConfig& cfg);

/// Re-optimizes the variables in `neighborhood` with the rest held at the
/// incumbent. Never returns anything worse than the incumbent.
Assignment solve_neighborhood(const QcqpInstance& instance, const Assignment& incumbent,
                              const std::vector<int>& neighborhood, SubsolverKind kind,
                              const Budget& budget, std::uint64_t seed = 0);

struct CrossoverResult {
    Assignment x;
    Assignment merged;  // x' before repair
    std::vector<int> repaired_free;
    bool from_search = false;  // false: fell back to the better parent
};

/// Takes x1 on n1 and x2 elsewhere (after ordering the parents so x1 is the
/// better one), repairs from the all-fixed state, searches the freed set and
/// returns the better of that result and x1.
CrossoverResult crossover(const QcqpInstance& instance, const std::vector<int>& n1,
                          const std::vector<int>& n2, const Assignment& x1, const Assignment& x2,
                          SubsolverKind kind, int cap, const Budget& budget,
                          std::uint64_t seed = 0);

struct TraceRow {
    int round = 0;
    double wall_ms = 0.0;
    double objective = 0.0;
    int violated_constraints = 0;
    int neighborhoods = 0;
    int crossovers = 0;
};

struct IncumbentState {
    Assignment x;
    double objective = 0.0;
    int round = 0;
    InitialResult initial;
    std::vector<TraceRow> trace;
};

/// initial_feasible, then `rounds` rounds of partition, parallel neighborhood
/// solves and pairwise crossover. Results are merged in neighborhood index
/// order, so the outcome does not depend on the thread count. Throws
/// Error if no initial feasible point is found.
IncumbentState optimize(const QcqpInstance& instance, const PredictionResult& prediction,
                        const SearchConfig& cfg);

/// Prediction without a model: the McCormick LP of the whole instance
/// (objective linearized) solved by the interior-point method, with the LP
/// values clipped to [0, 1] as probabilities.
PredictionResult relaxation_prediction(const QcqpInstance& instance);

inline constexpr const char* kTraceHeader =
        "round,wall_ms,objective,violated_constraints,neighborhoods,crossovers";

/// CSV with `header` and one line per row; objective printed with 17
/// significant digits.
std::string trace_to_csv(const std::vector<TraceRow>& rows);

}  // namespace hyperqcqp
