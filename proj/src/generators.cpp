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

#include "hyperqcqp/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hyperqcqp/error.hpp"
#include "hyperqcqp/rng.hpp"

namespace hyperqcqp {

namespace {

double positive_uniform(SplitMix64& rng) {
    double u;
    do {
        u = rng.uniform();
    } while (u == 0.0);
    return u;
}

std::vector<VarInfo> binary_vars(int n) {
    std::vector<VarInfo> vars;
    vars.reserve(n);
    for (int i = 0; i < n; ++i) vars.push_back({"x" + std::to_string(i), 0.0, 1.0, VarType::binary});
    return vars;
}

std::vector<std::pair<int, int>> sample_pairs(int n, std::size_t count, SplitMix64& rng) {
    const std::size_t total = static_cast<std::size_t>(n) * (n - 1) / 2;
    std::vector<std::pair<int, int>> out;
    if (4 * count >= total) {
        std::vector<std::pair<int, int>> all;
        all.reserve(total);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) all.emplace_back(i, j);
        rng.shuffle(all);
        out.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(count));
    } else {
        std::set<std::pair<int, int>> seen;
        while (seen.size() < count) {
            int i = static_cast<int>(rng.below(n));
            int j = static_cast<int>(rng.below(n));
            if (i == j) continue;
            if (i > j) std::swap(i, j);
            seen.emplace(i, j);
        }
        out.assign(seen.begin(), seen.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

QcqpInstance gen_qmkp(const QmkpParams& p) {
    if (p.n < 2) throw InvalidArgument("gen_qmkp: n must be at least 2");
    if (p.m < 1) throw InvalidArgument("gen_qmkp: m must be at least 1");
    if (!(p.edge_factor > 0.0)) throw InvalidArgument("gen_qmkp: edge_factor must be positive");
    const auto edges = static_cast<std::size_t>(std::llround(p.edge_factor * p.n));
    const std::size_t max_edges = static_cast<std::size_t>(p.n) * (p.n - 1) / 2;
    if (edges > max_edges)
        throw InvalidArgument("gen_qmkp: edge_factor*n = " + std::to_string(edges) +
                              " exceeds n(n-1)/2 = " + std::to_string(max_edges));

    SplitMix64 rng(p.seed);
    QcqpInstance inst;
    inst.name = "qmkp_n" + std::to_string(p.n) + "_m" + std::to_string(p.m) + "_s" +
                std::to_string(p.seed);
    inst.sense = ObjectiveSense::maximize;
    inst.vars = binary_vars(p.n);
    inst.seed_provenance = p.seed;

    for (int i = 0; i < p.n; ++i) inst.objective.linear.push_back({i, positive_uniform(rng)});
    for (const auto& [i, j] : sample_pairs(p.n, edges, rng))
        inst.objective.quadratic.push_back({i, j, positive_uniform(rng)});

    for (int k = 0; k < p.m; ++k) {
        Constraint c;
        c.sense = ConstraintSense::le;
        double sum = 0.0;
        for (int i = 0; i < p.n; ++i) {
            const double a = positive_uniform(rng);
            c.terms.linear.push_back({i, a});
            sum += a;
        }
        c.rhs = 0.5 * sum;
        inst.constraints.push_back(std::move(c));
    }
    return inst;
}

QcqpInstance gen_randqcp(const RandqcpParams& p) {
    if (p.n < 2) throw InvalidArgument("gen_randqcp: n must be at least 2");
    if (p.m < 1) throw InvalidArgument("gen_randqcp: m must be at least 1");
    if (p.arity_min < 2 || p.arity_min > p.arity_max || p.arity_max > p.n)
        throw InvalidArgument("gen_randqcp: need 2 <= arity_min <= arity_max <= n");

    SplitMix64 rng(p.seed);
    QcqpInstance inst;
    inst.name = "randqcp_n" + std::to_string(p.n) + "_m" + std::to_string(p.m) + "_s" +
                std::to_string(p.seed);
    inst.sense = ObjectiveSense::maximize;
    inst.vars = binary_vars(p.n);
    inst.seed_provenance = p.seed;

    for (int i = 0; i < p.n; ++i) inst.objective.linear.push_back({i, positive_uniform(rng)});

    std::vector<int> pool(p.n);
    for (int e = 0; e < p.m; ++e) {
        const int arity = static_cast<int>(rng.between(p.arity_min, p.arity_max));
        std::iota(pool.begin(), pool.end(), 0);
        // partial Fisher-Yates: the first `arity` slots are the sample
        for (int k = 0; k < arity; ++k) {
            const int r = k + static_cast<int>(rng.below(static_cast<std::uint64_t>(p.n - k)));
            std::swap(pool[k], pool[r]);
        }
        std::vector<int> members(pool.begin(), pool.begin() + arity);
        std::sort(members.begin(), members.end());

        Constraint c;
        c.sense = ConstraintSense::le;
        for (int v : members) c.terms.linear.push_back({v, positive_uniform(rng)});
        for (int a = 0; a < arity; ++a)
            for (int b = a + 1; b < arity; ++b)
                c.terms.quadratic.push_back({members[a], members[b], positive_uniform(rng)});
        c.rhs = static_cast<double>(arity);
        inst.constraints.push_back(std::move(c));
    }
    return inst;
}

}  // namespace hyperqcqp
