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


#include "hyperqcqp/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hyperqcqp/error.hpp"

namespace hyperqcqp {

namespace {

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

void fill_derived(PredictionResult& r) {
    const std::size_t n = r.probs.size();
    r.confidence_loss.resize(n);
    r.rounded.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        r.confidence_loss[i] = std::min(r.probs[i], 1.0 - r.probs[i]);
        r.rounded[i] = r.probs[i] > 0.5 ? 1 : 0;
    }
}

}  // namespace

PredictionResult PredictionResult::from_logits(std::vector<double> logits) {
    PredictionResult r;
    r.probs.resize(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (!std::isfinite(logits[i])) throw InvalidArgument("prediction: non-finite logit");
        r.probs[i] = sigmoid(logits[i]);
    }
    r.logits = std::move(logits);
    fill_derived(r);
    return r;
}

PredictionResult PredictionResult::from_probs(std::vector<double> probs) {
    PredictionResult r;
    r.logits.resize(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (!(probs[i] >= 0.0 && probs[i] <= 1.0))
            throw InvalidArgument("prediction: probability outside [0, 1]");
        const double p = std::clamp(probs[i], 1e-12, 1.0 - 1e-12);
        r.logits[i] = std::log(p / (1.0 - p));
    }
    r.probs = std::move(probs);
    fill_derived(r);
    return r;
}

std::vector<int> confidence_order(const PredictionResult& p) {
    std::vector<int> order(p.confidence_loss.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return p.confidence_loss[a] < p.confidence_loss[b];
    });
    return order;
}

}  // namespace hyperqcqp
