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

// Command-line front end: dataset generation, labeling, training, solving,
// oracle comparison, IPM utilities and benchmarking.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hyperqcqp/error.hpp"
#include "hyperqcqp/generators.hpp"
#include "hyperqcqp/hypergraph.hpp"
#include "hyperqcqp/instance.hpp"
#include "hyperqcqp/ipm.hpp"
#include "hyperqcqp/neighborhood.hpp"
#include "hyperqcqp/oracle.hpp"
#include "hyperqcqp/predictor.hpp"
#include "hyperqcqp/rng.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace hyperqcqp;

namespace {

constexpr const char* kOutDirEnv = "HYPERQCQP_OUT_DIR";

// ---------------------------------------------------------------------------
// Config file: a JSON object whose top-level scalars are global flags and
// whose nested objects are per-subcommand flags, keyed by long flag name
// ("alpha_ub" and "alpha-ub" are both accepted). Flags given on the command
// line win.

class JsonConfig : public CLI::Config {
 public:
    explicit JsonConfig(const CLI::App* root) : root_(root) {}

    std::string to_config(const CLI::App*, bool, bool, std::string) const override { return {}; }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        json doc;
        try {
            input >> doc;
        } catch (const json::exception& e) {
            throw CLI::ConversionError(std::string("config: ") + e.what());
        }
        if (!doc.is_object()) throw CLI::ConversionError("config: top level must be an object");
        std::vector<CLI::ConfigItem> items;
        const auto selected = root_->get_subcommands();
        for (const auto& [key, value] : doc.items()) {
            if (!value.is_object()) {
                items.push_back(item({}, key, value));
                continue;
            }
            // Sections for other subcommands are ignored rather than invoking them.
            const bool active = std::any_of(selected.begin(), selected.end(),
                                            [&](const CLI::App* s) { return s->get_name() == key; });
            if (!active) continue;
            for (const auto& [k, v] : value.items()) items.push_back(item({key}, k, v));
        }
        return items;
    }

 private:
    static std::string scalar(const json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        return v.dump();
    }

    static CLI::ConfigItem item(std::vector<std::string> parents, std::string name, const json& v) {
        CLI::ConfigItem it;
        it.parents = std::move(parents);
        std::replace(name.begin(), name.end(), '_', '-');
        it.name = std::move(name);
        if (v.is_array())
            for (const auto& e : v) it.inputs.push_back(scalar(e));
        else
            it.inputs.push_back(scalar(v));
        return it;
    }

    const CLI::App* root_;
};

json typed(const std::string& s) {
    if (s == "true") return true;
    if (s == "false") return false;
    char* end = nullptr;
    const double d = std::strtod(s.c_str(), &end);
    if (!s.empty() && end == s.c_str() + s.size()) {
        if (d == std::floor(d) && std::abs(d) < 9e15 && s.find_first_of(".eE") == std::string::npos)
            return static_cast<std::int64_t>(d);
        return d;
    }
    return s;
}

void collect_options(const CLI::App& app, json& out) {
    for (const CLI::Option* o : app.get_options()) {
        const std::string name = o->get_single_name();
        if (name.empty() || name == "help") continue;
        if (o->get_expected_min() == 0) {  // flag
            out[name] = o->count() > 0 && o->as<bool>();
            continue;
        }
        std::vector<std::string> values = o->results();
        if (values.empty() && !o->get_default_str().empty()) values.push_back(o->get_default_str());
        if (values.empty())
            out[name] = nullptr;
        else if (o->get_expected_max() > 1) {
            json arr = json::array();
            for (const auto& v : values) arr.push_back(typed(v));
            out[name] = std::move(arr);
        } else
            out[name] = typed(values.front());
    }
}

// ---------------------------------------------------------------------------

struct Context {
    std::uint64_t seed = 0;
    int threads = 1;
    fs::path out_dir;
    json config;  // effective configuration, echoed into every output
};

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    out << text;
    if (!out) throw Error("write failed: " + p.string());
}

void write_json(const fs::path& p, const json& doc) { write_text(p, doc.dump(2) + "\n"); }

fs::path resolve(const fs::path& base_dir, const std::string& entry) {
    const fs::path p(entry);
    return p.is_absolute() ? p : base_dir / p;
}

struct LoadedManifest {
    DatasetManifest manifest;
    fs::path dir;
};

LoadedManifest read_manifest(const fs::path& p) {
    LoadedManifest m{load_manifest(read_text(p)), fs::absolute(p).parent_path()};
    if (m.manifest.entries.empty()) throw InvalidArgument("manifest " + p.string() + " has no entries");
    return m;
}

/// Manifest document (library schema) with the effective config attached.
void write_manifest(const fs::path& p, const DatasetManifest& m, const json& config) {
    json doc = json::parse(save_manifest(m));
    doc["config"] = config;
    write_json(p, doc);
}

std::string relative_to(const fs::path& target, const fs::path& dir) {
    return fs::relative(fs::absolute(target), fs::absolute(dir)).generic_string();
}

json assignment_json(const Assignment& x) {
    json a = json::array();
    for (double v : x) a.push_back(v);
    return a;
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

/// Runs body(i) for i in [0, count) on `threads` workers; results go into
/// caller-owned slots, so completion order does not matter.
template <class F>
void parallel_for(int count, int threads, F&& body) {
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < count; i = next++) body(i);
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < std::min(threads, count); ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

QcqpInstance load_normalized(const fs::path& p) { return normalize(load_instance_file(p)); }

// ---------------------------------------------------------------------------
// generate

struct GenerateArgs {
    std::string family;
    int n = 16;
    std::optional<int> m;
    int count = 1;
    double edge_factor = 5.0;
    int arity_min = 2;
    int arity_max = 5;
    std::string prefix;
    bool force = false;
};

int cmd_generate(const Context& ctx, const GenerateArgs& a) {
    if (a.count < 1) throw InvalidArgument("--count must be at least 1");
    const std::string prefix = a.prefix.empty() ? a.family : a.prefix;
    DatasetManifest manifest{"none", {}};
    std::vector<std::pair<fs::path, std::string>> files;
    for (int k = 0; k < a.count; ++k) {
        const std::uint64_t seed = ctx.seed + static_cast<std::uint64_t>(k);
        QcqpInstance inst;
        if (a.family == "qmkp")
            inst = gen_qmkp({.n = a.n, .m = a.m.value_or(3), .edge_factor = a.edge_factor, .seed = seed});
        else
            inst = gen_randqcp({.n = a.n, .m = a.m.value_or(12), .arity_min = a.arity_min,
                                .arity_max = a.arity_max, .seed = seed});
        char name[64];
        std::snprintf(name, sizeof name, "%s_%04d.json", prefix.c_str(), k);
        files.emplace_back(ctx.out_dir / name, save_instance(inst));
        manifest.entries.push_back({name, ""});
    }
    const fs::path manifest_path = ctx.out_dir / (prefix + "_manifest.json");
    if (!a.force) {
        for (const auto& [p, text] : files)
            if (fs::exists(p)) throw Error(p.string() + " exists (use --force to overwrite)");
        if (fs::exists(manifest_path)) throw Error(manifest_path.string() + " exists (use --force to overwrite)");
    }
    for (const auto& [p, text] : files) write_text(p, text);
    write_manifest(manifest_path, manifest, ctx.config);
    std::cout << "wrote " << files.size() << " instances and " << manifest_path.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// label

struct LabelArgs {
    std::string manifest;
    std::string labeler = "oracle";
    std::string subsolver = "tabu";
    int rounds = 20;
    double alpha_ub = 0.5;
    std::int64_t budget = -1;
    std::string out_manifest = "labeled_manifest.json";
};

int cmd_label(const Context& ctx, const LabelArgs& a) {
    const auto in = read_manifest(a.manifest);
    DatasetManifest out{a.labeler == "oracle" ? "oracle" : "optimize:" + a.subsolver, {}};
    const fs::path out_path = ctx.out_dir / a.out_manifest;
    int skipped = 0;
    for (std::size_t k = 0; k < in.manifest.entries.size(); ++k) {
        const fs::path inst_path = resolve(in.dir, in.manifest.entries[k].instance);
        try {
            const QcqpInstance inst = load_normalized(inst_path);
            Assignment x;
            double objective = 0.0;
            if (a.labeler == "oracle") {
                const auto o = brute_force_oracle(inst);
                if (!o.feasible) throw Error("instance is infeasible");
                x = o.x;
                objective = o.objective;
            } else {
                SearchConfig cfg;
                cfg.alpha_ub = a.alpha_ub;
                cfg.alpha = std::min(cfg.alpha, a.alpha_ub);
                cfg.rounds = a.rounds;
                cfg.subsolver = parse_subsolver(a.subsolver);
                cfg.subsolver_budget.iterations = a.budget;
                cfg.seed = derive_seed(ctx.seed, k);
                cfg.threads = ctx.threads;
                const auto st = optimize(inst, relaxation_prediction(inst), cfg);
                x = st.x;
                objective = st.objective;
            }
            if (!evaluate(inst, x).feasible) throw Error("label does not re-validate as feasible");
            json doc = json::parse(save_labels(std::vector<double>(x.begin(), x.end())));
            doc["objective"] = objective;
            doc["provenance"] = {{"source", out.label_source}, {"instance", inst_path.generic_string()},
                                 {"config", ctx.config}};
            const fs::path label_path = ctx.out_dir / (inst_path.stem().string() + ".labels.json");
            write_json(label_path, doc);
            out.entries.push_back({relative_to(inst_path, out_path.parent_path()),
                                   relative_to(label_path, out_path.parent_path())});
        } catch (const Error& e) {
            ++skipped;
            std::cerr << "skipped " << inst_path.string() << ": " << e.what() << "\n";
        }
    }
    write_manifest(out_path, out, ctx.config);
    std::cout << "labeled " << out.entries.size() << ", skipped " << skipped << "; wrote " << out_path.string()
              << "\n";
    return out.entries.empty() ? 1 : 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
    std::string manifest;
    int epochs = 30;
    TrainConfig train;
    ModelDims dims;
    std::string init_weights;
    std::string weights_out = "weights.json";
};

int cmd_train(const Context& ctx, TrainArgs a) {
    const auto m = read_manifest(a.manifest);
    std::vector<Sample> data;
    for (const auto& e : m.manifest.entries) {
        if (e.labels.empty()) throw InvalidArgument("manifest entry " + e.instance + " has no labels");
        const QcqpInstance inst = load_normalized(resolve(m.dir, e.instance));
        auto labels = load_labels(read_text(resolve(m.dir, e.labels)));
        if (static_cast<int>(labels.size()) != inst.num_vars())
            throw SchemaError(e.labels, "label count does not match the instance");
        data.push_back({build_hypergraph(inst, ctx.seed), std::move(labels)});
    }
    a.train.seed = ctx.seed;
    const ModelWeights start = a.init_weights.empty() ? init_weights(ctx.seed, a.dims)
                                                      : load_weights_file(a.init_weights);
    const auto t0 = std::chrono::steady_clock::now();
    const auto result = train(data, a.epochs, a.train, start);
    const fs::path weights_path = ctx.out_dir / a.weights_out;
    save_weights_file(result.weights, weights_path);
    json report;
    report["config"] = ctx.config;
    report["label_source"] = m.manifest.label_source;
    report["samples"] = data.size();
    report["parameters"] = result.weights.num_parameters();
    report["wall_ms"] = elapsed_ms(t0);
    report["loss_curve"] = result.loss_curve;
    report["weights"] = weights_path.generic_string();
    write_json(ctx.out_dir / "train_report.json", report);
    if (!result.loss_curve.empty())
        std::printf("epochs %zu first %.6f last %.6f\n", result.loss_curve.size(), result.loss_curve.front(),
                    result.loss_curve.back());
    std::cout << "wrote " << weights_path.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// predict

int cmd_predict(const Context& ctx, const std::string& instance, const std::string& weights, const std::string& out) {
    const QcqpInstance inst = load_normalized(instance);
    const auto p = predict(load_weights_file(weights), build_hypergraph(inst, ctx.seed));
    json doc;
    doc["config"] = ctx.config;
    doc["logits"] = p.logits;
    doc["probs"] = p.probs;
    doc["rounded"] = p.rounded;
    doc["confidence_order"] = confidence_order(p);
    write_json(ctx.out_dir / out, doc);
    std::cout << "wrote " << (ctx.out_dir / out).string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// solve

struct SolveArgs {
    std::string instance;
    std::string weights;
    bool no_predictor = false;
    double alpha = 0.2;
    double alpha_ub = 0.5;
    int rounds = 20;
    std::int64_t time_ms = -1;
    std::string subsolver = "exhaustive";
    std::int64_t budget = -1;
    double density_threshold = 32.0;
    std::string trace_out = "trace.csv";
    std::string out = "solution.json";
};

SearchConfig search_config(const Context& ctx, const SolveArgs& a) {
    SearchConfig cfg;
    cfg.alpha = a.alpha;
    cfg.alpha_ub = a.alpha_ub;
    cfg.rounds = a.rounds;
    cfg.time_ms = a.time_ms;
    cfg.subsolver = parse_subsolver(a.subsolver);
    cfg.subsolver_budget.iterations = a.budget;
    cfg.density_threshold = a.density_threshold;
    cfg.seed = ctx.seed;
    cfg.threads = ctx.threads;
    cfg.check();
    return cfg;
}

PredictionResult prediction_for(const QcqpInstance& inst, const std::string& weights, std::uint64_t seed) {
    if (weights.empty()) return relaxation_prediction(inst);
    return predict(load_weights_file(weights), build_hypergraph(inst, seed));
}

int cmd_solve(const Context& ctx, const SolveArgs& a) {
    if (a.weights.empty() && !a.no_predictor) throw InvalidArgument("solve needs --weights or --no-predictor");
    const QcqpInstance inst = load_normalized(a.instance);
    const SearchConfig cfg = search_config(ctx, a);
    const auto st = optimize(inst, prediction_for(inst, a.weights, ctx.seed), cfg);
    const fs::path trace_path = ctx.out_dir / a.trace_out;
    write_text(trace_path, trace_to_csv(st.trace));
    const auto rep = evaluate(inst, st.x);
    json doc;
    doc["config"] = ctx.config;
    doc["instance"] = a.instance;
    doc["objective"] = st.objective;
    doc["feasible"] = rep.feasible;
    doc["rounds"] = st.round;
    doc["initial"] = {{"objective", st.initial.objective},
                      {"attempts", st.initial.attempts},
                      {"alpha", st.initial.alpha},
                      {"used_fallback", st.initial.used_fallback}};
    doc["trace"] = trace_path.generic_string();
    doc["x"] = assignment_json(st.x);
    write_json(ctx.out_dir / a.out, doc);
    std::printf("objective %.10g feasible %s rounds %d\n", st.objective, rep.feasible ? "yes" : "no", st.round);
    return rep.feasible ? 0 : 1;
}

// ---------------------------------------------------------------------------
// oracle

int cmd_oracle(const Context& ctx, const std::vector<std::string>& instances, const std::string& manifest,
               bool compare, const SolveArgs& solve) {
    std::vector<fs::path> paths(instances.begin(), instances.end());
    if (!manifest.empty()) {
        const auto m = read_manifest(manifest);
        for (const auto& e : m.manifest.entries) paths.push_back(resolve(m.dir, e.instance));
    }
    if (paths.empty()) throw InvalidArgument("oracle needs --instance or --manifest");
    json rows = json::array();
    std::printf(compare ? "%-32s %16s %16s %10s\n" : "%-32s %16s\n", "instance", "optimum", "framework", "ratio");
    for (const auto& p : paths) {
        const QcqpInstance inst = load_normalized(p);
        const auto o = brute_force_oracle(inst);
        json row = {{"instance", p.generic_string()}, {"feasible", o.feasible}, {"objective", o.objective},
                    {"x", assignment_json(o.x)}};
        const std::string name = p.filename().string();
        if (compare && o.feasible) {
            const auto st = optimize(inst, relaxation_prediction(inst), search_config(ctx, solve));
            const double ratio = o.objective != 0.0 ? st.objective / o.objective : 1.0;
            row["framework_objective"] = st.objective;
            row["ratio"] = ratio;
            std::printf("%-32s %16.8g %16.8g %10.6f\n", name.c_str(), o.objective, st.objective, ratio);
        } else {
            std::printf("%-32s %16.8g%s\n", name.c_str(), o.objective, o.feasible ? "" : " (infeasible)");
        }
        rows.push_back(std::move(row));
    }
    write_json(ctx.out_dir / "oracle.json", {{"config", ctx.config}, {"rows", rows}});
    return 0;
}

// ---------------------------------------------------------------------------
// ipm / check-equivalence

struct IpmArgs {
    std::string instance;
    IpmConfig ipm;
    std::string solver = "cg";
    std::string out = "ipm.json";
};

int cmd_ipm(const Context& ctx, IpmArgs a) {
    a.ipm.solver = a.solver == "cg" ? KktSolver::conjugate_gradient : KktSolver::primal_normal;
    a.ipm.check();
    const QcqpInstance inst = load_instance_file(a.instance);
    const StdFormMap map = qp_from_instance(inst);
    const IpmResult r = ipm_solve(map.qp, a.ipm);
    const auto res = kkt_residuals(map.qp, r.state);
    const auto x = map.recover(r.x);
    json doc;
    doc["config"] = ctx.config;
    doc["converged"] = r.converged;
    doc["iterations"] = r.iterations;
    doc["objective"] = map.lp_objective(r.x);
    doc["kkt"] = {{"primal", res.primal}, {"dual", res.dual}, {"complementarity", res.complementarity}};
    doc["x"] = x;
    write_json(ctx.out_dir / a.out, doc);
    std::printf("converged %s iterations %d objective %.12g kkt %.3e\n", r.converged ? "yes" : "no",
                r.iterations, map.lp_objective(r.x), res.max());
    return r.converged ? 0 : 1;
}

struct EquivalenceArgs {
    int instances = 20;
    int iterations = 30;
    double tol = 1e-9;
    int max_n = 8;
    int max_m = 8;
};

int cmd_check_equivalence(const Context& ctx, const EquivalenceArgs& a) {
    IpmConfig cfg;
    json rows = json::array();
    bool ok = true;
    std::printf("%5s %3s %3s %14s\n", "qp", "n", "m", "max_dev");
    for (int k = 0; k < a.instances; ++k) {
        const QpStd qp = random_convex_qp(derive_seed(ctx.seed, k), a.max_n, a.max_m);
        const double dev = trace_deviation(mpnn_emulate_ipm(qp, cfg, a.iterations), direct_ipm_trace(qp, cfg, a.iterations));
        const bool pass = dev < a.tol;
        ok = ok && pass;
        std::printf("%5d %3d %3d %14.3e%s\n", k, qp.n(), qp.m(), dev, pass ? "" : "  FAIL");
        rows.push_back({{"qp", k}, {"n", qp.n()}, {"m", qp.m()}, {"max_deviation", dev}});
    }
    write_json(ctx.out_dir / "equivalence.json", {{"config", ctx.config}, {"ok", ok}, {"rows", rows}});
    return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
    std::string manifest;
    std::vector<std::string> methods{"lns-exhaustive"};
    int seeds = 5;
    SolveArgs solve;
    std::string weights;
    std::int64_t tabu_moves = 1000;
};

struct BenchRow {
    std::string instance, method;
    int seed_index = 0;
    std::uint64_t seed = 0;
    double objective = 0.0;
    double wall_ms = 0.0;
    bool feasible = false;
    int rounds = 0;
    std::string trace, solution, error;
};

/// Whole-instance tabu from the all-lower-bound point, one trace row per
/// segment of `moves` moves, each segment resuming from the best point.
IncumbentState plain_tabu(const QcqpInstance& inst, int rounds, std::int64_t moves, std::uint64_t seed) {
    IncumbentState st;
    std::vector<int> all(inst.num_vars());
    for (int i = 0; i < inst.num_vars(); ++i) all[i] = i;
    Assignment x(inst.num_vars());
    for (int i = 0; i < inst.num_vars(); ++i) x[i] = inst.vars[i].lb;
    const auto t0 = std::chrono::steady_clock::now();
    auto record = [&](int r) {
        const auto rep = evaluate(inst, x);
        st.trace.push_back({r, elapsed_ms(t0), rep.objective, rep.violated_count(), 1, 0});
    };
    record(0);
    for (int r = 1; r <= rounds; ++r) {
        const auto res = subsolve_tabu({&inst, x, all}, {.budget = {.iterations = moves}, .seed = derive_seed(seed, r)});
        x = res.x;
        record(r);
    }
    st.x = x;
    st.objective = evaluate(inst, x).objective;
    st.round = rounds;
    return st;
}

int cmd_bench(const Context& ctx, const BenchArgs& a) {
    const auto m = read_manifest(a.manifest);
    if (a.seeds < 1) throw InvalidArgument("--seeds must be at least 1");
    for (const auto& method : a.methods)
        if (method != "tabu" && !method.starts_with("lns-"))
            throw InvalidArgument("unknown method " + method + " (expected tabu or lns-<subsolver>)");
    std::vector<BenchRow> rows;
    for (const auto& e : m.manifest.entries)
        for (const auto& method : a.methods)
            for (int s = 0; s < a.seeds; ++s) {
                BenchRow r;
                r.instance = resolve(m.dir, e.instance).generic_string();
                r.method = method;
                r.seed_index = s;
                r.seed = derive_seed(ctx.seed, s);
                rows.push_back(std::move(r));
            }
    const fs::path trace_dir = ctx.out_dir / "traces", sol_dir = ctx.out_dir / "solutions";
    fs::create_directories(trace_dir);
    fs::create_directories(sol_dir);

    parallel_for(static_cast<int>(rows.size()), ctx.threads, [&](int k) {
        BenchRow& r = rows[k];
        const std::string stem = fs::path(r.instance).stem().string() + "__" + r.method + "__s" + std::to_string(r.seed_index);
        try {
            const QcqpInstance inst = load_normalized(r.instance);
            const auto t0 = std::chrono::steady_clock::now();
            IncumbentState st;
            if (r.method == "tabu") {
                st = plain_tabu(inst, a.solve.rounds, a.tabu_moves, r.seed);
            } else {
                Context local = ctx;
                local.seed = r.seed;
                local.threads = 1;
                SolveArgs sa = a.solve;
                sa.subsolver = r.method.substr(4);
                st = optimize(inst, prediction_for(inst, a.weights, ctx.seed), search_config(local, sa));
            }
            r.wall_ms = elapsed_ms(t0);
            r.trace = (trace_dir / (stem + ".csv")).generic_string();
            write_text(r.trace, trace_to_csv(st.trace));
            r.solution = (sol_dir / (stem + ".json")).generic_string();
            write_json(r.solution, {{"instance", r.instance}, {"objective", st.objective}, {"x", assignment_json(st.x)}});
            // Re-validate from the written file rather than the in-memory point.
            const json sol = json::parse(read_text(r.solution));
            const auto rep = evaluate(inst, sol["x"].get<Assignment>());
            r.objective = rep.objective;
            r.feasible = rep.feasible;
            r.rounds = st.round;
        } catch (const std::exception& e) {
            r.error = e.what();
        }
    });

    json out_rows = json::array();
    std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
    std::map<std::string, std::vector<double>> per_method;
    bool failed = false;
    for (const auto& r : rows) {
        json row = {{"instance", r.instance}, {"method", r.method},       {"seed", r.seed},
                    {"objective", r.objective}, {"wall_ms", r.wall_ms}, {"feasible", r.feasible},
                    {"rounds", r.rounds},       {"trace", r.trace},     {"solution", r.solution}};
        if (!r.error.empty()) row["error"] = r.error;
        out_rows.push_back(std::move(row));
        if (!r.error.empty() || !r.feasible) {
            failed = true;
            continue;
        }
        groups[{r.instance, r.method}].push_back(r.objective);
        per_method[r.method].push_back(r.objective);
    }
    auto stats = [](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        const double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
        return json{{"runs", v.size()}, {"mean", mean}, {"std", sd}};
    };
    json summary = json::array();
    for (const auto& [key, v] : groups) {
        json s = stats(v);
        s["instance"] = key.first;
        s["method"] = key.second;
        summary.push_back(std::move(s));
    }
    json methods = json::object();
    for (const auto& [name, v] : per_method) methods[name] = stats(v);
    write_json(ctx.out_dir / "bench_summary.json",
               {{"config", ctx.config}, {"rows", out_rows}, {"per_instance", summary}, {"per_method", methods}});
    for (const auto& [name, v] : per_method) {
        const json s = stats(v);
        std::printf("%-20s runs %3zu mean %.8g std %.4g\n", name.c_str(), v.size(), s["mean"].get<double>(),
                    s["std"].get<double>());
    }
    std::cout << "wrote " << rows.size() << " traces and " << (ctx.out_dir / "bench_summary.json").string() << "\n";
    return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hyperqcqp: binary QCQP heuristics with hypergraph prediction and neighborhood search"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.set_config("--config", "", "JSON config file (flags on the command line override it)");
    app.config_formatter(std::make_shared<JsonConfig>(&app));

    std::uint64_t seed = 0;
    int threads = 1;
    std::string out_dir = "out";
    app.add_option("--seed", seed, "Master seed")->capture_default_str();
    app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--out-dir", out_dir, "Output directory")->envname(kOutDirEnv)->capture_default_str();

    // generate
    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Write seeded instances and a manifest");
    g->add_option("--family", gen.family, "qmkp or randqcp")->required()->check(CLI::IsMember({"qmkp", "randqcp"}));
    g->add_option("--n", gen.n, "Variables")->capture_default_str();
    g->add_option("--m", gen.m, "Knapsacks (qmkp, default 3) or constraints (randqcp, default 12)");
    g->add_option("--count", gen.count, "Number of instances")->capture_default_str();
    g->add_option("--edge-factor", gen.edge_factor, "qmkp: |E| = edge_factor * n")->capture_default_str();
    g->add_option("--arity-min", gen.arity_min, "randqcp: smallest hyperedge arity")->capture_default_str();
    g->add_option("--arity-max", gen.arity_max, "randqcp: largest hyperedge arity")->capture_default_str();
    g->add_option("--prefix", gen.prefix, "File name prefix (default: family)");
    g->add_flag("--force", gen.force, "Overwrite existing files");

    // label
    LabelArgs lab;
    auto* l = app.add_subcommand("label", "Attach solution labels to a manifest");
    l->add_option("--manifest", lab.manifest, "Input manifest")->required();
    l->add_option("--labeler", lab.labeler, "oracle or optimize")->check(CLI::IsMember({"oracle", "optimize"}))->capture_default_str();
    l->add_option("--subsolver", lab.subsolver, "Subsolver for the optimize labeler")->capture_default_str();
    l->add_option("--rounds", lab.rounds, "Rounds for the optimize labeler")->capture_default_str();
    l->add_option("--alpha-ub", lab.alpha_ub, "Free-proportion cap for the optimize labeler")->capture_default_str();
    l->add_option("--budget", lab.budget, "Subsolver iteration budget (negative: default)")->capture_default_str();
    l->add_option("--out-manifest", lab.out_manifest, "Labeled manifest file name")->capture_default_str();

    // train
    TrainArgs tr;
    auto* t = app.add_subcommand("train", "Train the hypergraph predictor on a labeled manifest");
    t->add_option("--manifest", tr.manifest, "Labeled manifest")->required();
    t->add_option("--epochs", tr.epochs)->capture_default_str();
    t->add_option("--lr", tr.train.lr)->capture_default_str();
    t->add_option("--weight-decay", tr.train.weight_decay)->capture_default_str();
    t->add_option("--batch-size", tr.train.batch_size)->capture_default_str();
    t->add_option("--plateau-tol", tr.train.plateau_tol)->capture_default_str();
    t->add_option("--embed", tr.dims.embed)->capture_default_str();
    t->add_option("--hidden", tr.dims.hidden)->capture_default_str();
    t->add_option("--layers", tr.dims.layers)->capture_default_str();
    t->add_option("--head-hidden", tr.dims.head_hidden)->capture_default_str();
    t->add_option("--init-weights", tr.init_weights, "Start from these weights instead of a fresh init");
    t->add_option("--weights-out", tr.weights_out)->capture_default_str();

    // predict
    std::string pred_instance, pred_weights, pred_out = "prediction.json";
    auto* p = app.add_subcommand("predict", "Per-variable probabilities from trained weights");
    p->add_option("--instance", pred_instance)->required();
    p->add_option("--weights", pred_weights)->required();
    p->add_option("--out", pred_out)->capture_default_str();

    // solve (its search flags are shared with oracle --compare and bench)
    auto add_search_flags = [](CLI::App* c, SolveArgs& s) {
        c->add_option("--alpha", s.alpha, "Initial free proportion")->capture_default_str();
        c->add_option("--alpha-ub", s.alpha_ub, "Free-proportion cap")->capture_default_str();
        c->add_option("--rounds", s.rounds)->capture_default_str();
        c->add_option("--time-ms", s.time_ms, "Wall-clock limit (negative: none)")->capture_default_str();
        c->add_option("--subsolver", s.subsolver, "exhaustive, tabu or bnb")->capture_default_str();
        c->add_option("--budget", s.budget, "Subsolver iteration budget (negative: default)")->capture_default_str();
        c->add_option("--density-threshold", s.density_threshold, "ACP/random switch")->capture_default_str();
    };
    SolveArgs sol;
    auto* s = app.add_subcommand("solve", "Run the neighborhood search on one instance");
    s->add_option("--instance", sol.instance)->required();
    auto* w_opt = s->add_option("--weights", sol.weights, "Trained predictor weights");
    s->add_flag("--no-predictor", sol.no_predictor, "Use LP relaxation rounding instead of a model")->excludes(w_opt);
    add_search_flags(s, sol);
    s->add_option("--trace-out", sol.trace_out)->capture_default_str();
    s->add_option("--out", sol.out)->capture_default_str();

    // oracle
    std::vector<std::string> or_instances;
    std::string or_manifest;
    bool or_compare = false;
    SolveArgs or_solve;
    auto* o = app.add_subcommand("oracle", "Brute-force optima, optionally against the framework");
    o->add_option("--instance", or_instances, "Instance files");
    o->add_option("--manifest", or_manifest, "Manifest of instances");
    o->add_flag("--compare", or_compare, "Also run solve --no-predictor and print the ratio");
    add_search_flags(o, or_solve);

    // ipm
    IpmArgs ia;
    auto* ip = app.add_subcommand("ipm", "Solve a convex continuous QP instance with the interior-point method");
    ip->add_option("--instance", ia.instance)->required();
    ip->add_option("--delta", ia.ipm.delta)->capture_default_str();
    ip->add_option("--tol", ia.ipm.tol)->capture_default_str();
    ip->add_option("--max-iter", ia.ipm.max_iter)->capture_default_str();
    ip->add_option("--solver", ia.solver, "cg or normal")->check(CLI::IsMember({"cg", "normal"}))->capture_default_str();
    ip->add_option("--out", ia.out)->capture_default_str();

    // check-equivalence
    EquivalenceArgs eq;
    auto* e = app.add_subcommand("check-equivalence", "Compare message-passing and matrix IPM traces");
    e->add_option("--instances", eq.instances)->capture_default_str();
    e->add_option("--iterations", eq.iterations)->capture_default_str();
    e->add_option("--tol", eq.tol)->capture_default_str();
    e->add_option("--max-n", eq.max_n)->capture_default_str();
    e->add_option("--max-m", eq.max_m)->capture_default_str();

    // bench
    BenchArgs ba;
    auto* b = app.add_subcommand("bench", "Methods x seeds over a manifest with per-run traces");
    b->add_option("--manifest", ba.manifest)->required();
    b->add_option("--methods", ba.methods, "tabu and/or lns-<subsolver>")->capture_default_str();
    b->add_option("--seeds", ba.seeds)->capture_default_str();
    b->add_option("--weights", ba.weights, "Predictor weights (default: relaxation rounding)");
    b->add_option("--tabu-moves", ba.tabu_moves, "Moves per round for the tabu method")->capture_default_str();
    add_search_flags(b, ba.solve);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        return app.exit(err);
    }

    Context ctx;
    ctx.seed = seed;
    ctx.threads = threads;
    ctx.out_dir = out_dir;
    CLI::App* active = app.get_subcommands().front();
    ctx.config["command"] = active->get_name();
    collect_options(app, ctx.config["global"]);
    collect_options(*active, ctx.config["options"]);

    try {
        fs::create_directories(ctx.out_dir);
        if (g->parsed()) return cmd_generate(ctx, gen);
        if (l->parsed()) return cmd_label(ctx, lab);
        if (t->parsed()) return cmd_train(ctx, tr);
        if (p->parsed()) return cmd_predict(ctx, pred_instance, pred_weights, pred_out);
        if (s->parsed()) return cmd_solve(ctx, sol);
        if (o->parsed()) return cmd_oracle(ctx, or_instances, or_manifest, or_compare, or_solve);
        if (ip->parsed()) return cmd_ipm(ctx, ia);
        if (e->parsed()) return cmd_check_equivalence(ctx, eq);
        if (b->parsed()) return cmd_bench(ctx, ba);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
    return 0;
}
