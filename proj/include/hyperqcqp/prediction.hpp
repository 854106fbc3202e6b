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

#include <vector>

namespace hyperqcqp {

/// Per-variable prediction. `confidence_loss` is min(p, 1 - p); `rounded`
/// is 1 where p > 0.5.
struct PredictionResult {
    std::vector<double> logits;
    std::vector<double> probs;
    std::vector<double> confidence_loss;
    std::vector<int> rounded;

    int size() const noexcept { return static_cast<int>(probs.size()); }

    static PredictionResult from_logits(std::vector<double> logits);
    /// Logits are recovered as log(p / (1 - p)) with p clipped to
    /// [1e-12, 1 - 1e-12].
    static PredictionResult from_probs(std::vector<double> probs);
};

/// Indices sorted by ascending confidence loss, ties by index, so the first
/// entries are the most confidently predicted.
std::vector<int> confidence_order(const PredictionResult& p);

}  // namespace hyperqcqp
