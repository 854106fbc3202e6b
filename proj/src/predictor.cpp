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

#include "hyperqcqp/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "hyperqcqp/error.hpp"
#include "hyperqcqp/rng.hpp"
#include "json.hpp"

namespace hyperqcqp {

using ordered_json = nlohmann::ordered_json;

void ModelDims::check() const {
    if (embed < 1 || hidden < 1 || head_hidden < 1)
        throw InvalidArgument("ModelDims: widths must be at least 1");
    if (layers < 0) throw InvalidArgument("ModelDims: layers must be nonnegative");
}

namespace {

Mlp make_mlp(std::initializer_list<int> widths, bool activate_output) {
    Mlp mlp;
    mlp.activate_output = activate_output;
    const std::vector<int> w(widths);
    for (std::size_t k = 0; k + 1 < w.size(); ++k)
        mlp.layers.push_back({Matrix::Zero(w[k + 1], w[k]), Vector::Zero(w[k + 1])});
    return mlp;
}

ModelWeights shaped(const ModelDims& d) {
    d.check();
    ModelWeights w;
    w.dims = d;
    w.embed_v = make_mlp({kVertexFeatureWidth, d.embed}, true);
    w.embed_e = make_mlp({kEdgeFeatureWidth, d.embed}, true);
    for (int t = 0; t < d.layers; ++t)
        w.conv.push_back({make_mlp({2 * d.embed, d.hidden, d.embed}, true),
                          make_mlp({2 * d.embed, d.hidden, d.embed}, true)});
    w.head = make_mlp({d.embed, d.head_hidden, d.head_hidden, 1}, false);
    return w;
}

template <class Fn>
void for_each_mlp(ModelWeights& w, Fn&& fn) {
    fn(std::string("embed_v"), w.embed_v);
    fn(std::string("embed_e"), w.embed_e);
    for (std::size_t t = 0; t < w.conv.size(); ++t) {
        fn("conv." + std::to_string(t) + ".phi_e", w.conv[t].phi_e);
        fn("conv." + std::to_string(t) + ".phi_v", w.conv[t].phi_v);
    }
    fn(std::string("head"), w.head);
}

double leaky(double v) { return v > 0.0 ? v : kLeakySlope * v; }
double leaky_grad(double v) { return v > 0.0 ? 1.0 : kLeakySlope; }

struct MlpCache {
    std::vector<Matrix> inputs;  // input of each layer
    std::vector<Matrix> pre;     // pre-activation of each layer
};

Matrix mlp_forward(const Mlp& mlp, const Matrix& x, MlpCache* cache) {
    Matrix a = x;
    const std::size_t last = mlp.layers.size() - 1;
    for (std::size_t k = 0; k < mlp.layers.size(); ++k) {
        const Dense& d = mlp.layers[k];
        if (a.cols() != d.W.cols()) throw InvalidArgument("forward: feature width mismatch");
        Matrix z = a * d.W.transpose();
        z.rowwise() += d.b.transpose();
        if (cache) {
            cache->inputs.push_back(std::move(a));
            cache->pre.push_back(z);
        }
        a = (k < last || mlp.activate_output) ? Matrix(z.unaryExpr(&leaky)) : std::move(z);
    }
    return a;
}

/// Accumulates parameter gradients into `grad` and returns d/d(input).
Matrix mlp_backward(const Mlp& mlp, const MlpCache& cache, Matrix d_out, Mlp& grad) {
    const std::size_t last = mlp.layers.size() - 1;
    for (std::size_t k = mlp.layers.size(); k-- > 0;) {
        if (k < last || mlp.activate_output)
            d_out = d_out.cwiseProduct(Matrix(cache.pre[k].unaryExpr(&leaky_grad)));
        grad.layers[k].W.noalias() += d_out.transpose() * cache.inputs[k];
        grad.layers[k].b += d_out.colwise().sum().transpose();
        d_out = d_out * mlp.layers[k].W;
    }
    return d_out;
}

struct FullCache {
    MlpCache embed_v, embed_e, head;
    std::vector<MlpCache> phi_e, phi_v;
};

Matrix concat(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows(), a.cols() + b.cols());
    out << a, b;
    return out;
}

Matrix edge_sum(const VariableRelationalHypergraph& h, const Matrix& hv) {
    Matrix s = Matrix::Zero(h.num_hyperedges(), hv.cols());
    for (int e = 0; e < h.num_hyperedges(); ++e)
        for (int m : h.hyperedges[e].members) s.row(e) += hv.row(m);
    return s;
}

Matrix vertex_mean(const VariableRelationalHypergraph& h, const Matrix& he) {
    Matrix m = Matrix::Zero(h.num_vertices(), he.cols());
    for (int v = 0; v < h.num_vertices(); ++v) {
        const auto& inc = h.vertex_edges[v];
        if (inc.empty()) continue;
        for (int e : inc) m.row(v) += he.row(e);
        m.row(v) /= static_cast<double>(inc.size());
    }
    return m;
}

void check_graph(const ModelWeights& w, const VariableRelationalHypergraph& h) {
    if (h.vertex_features.cols() != w.embed_v.in_dim())
        throw InvalidArgument("forward: vertex feature width " +
                              std::to_string(h.vertex_features.cols()) + " != " +
                              std::to_string(w.embed_v.in_dim()));
    if (h.num_hyperedges() > 0 && h.edge_features.cols() != w.embed_e.in_dim())
        throw InvalidArgument("forward: hyperedge feature width " +
                              std::to_string(h.edge_features.cols()) + " != " +
                              std::to_string(w.embed_e.in_dim()));
    if (static_cast<int>(h.vertex_edges.size()) != h.num_vertices())
        throw InvalidArgument("forward: incidence list size mismatch");
}

ForwardOutput run_forward(const ModelWeights& w, const VariableRelationalHypergraph& h,
                          FullCache* cache) {
    check_graph(w, h);
    const int d = w.dims.embed;
    ForwardOutput out;
    auto& tr = out.trace;
    tr.vertex.push_back(mlp_forward(w.embed_v, h.vertex_features, cache ? &cache->embed_v : nullptr));
    const Matrix ef = h.num_hyperedges() > 0 ? h.edge_features : Matrix(0, kEdgeFeatureWidth);
    tr.edge.push_back(h.num_hyperedges() > 0
                              ? mlp_forward(w.embed_e, ef, cache ? &cache->embed_e : nullptr)
                              : Matrix(0, d));
    if (cache) {
        cache->phi_e.resize(w.conv.size());
        cache->phi_v.resize(w.conv.size());
    }
    for (std::size_t t = 0; t < w.conv.size(); ++t) {
        const Matrix xe = concat(tr.edge.back(), edge_sum(h, tr.vertex.back()));
        Matrix he = mlp_forward(w.conv[t].phi_e, xe, cache ? &cache->phi_e[t] : nullptr);
        const Matrix xv = concat(tr.vertex.back(), vertex_mean(h, he));
        tr.edge.push_back(std::move(he));
        tr.vertex.push_back(mlp_forward(w.conv[t].phi_v, xv, cache ? &cache->phi_v[t] : nullptr));
    }
    const Matrix vars = tr.vertex.back().topRows(h.num_variables);
    const Matrix z = mlp_forward(w.head, vars, cache ? &cache->head : nullptr);
    std::vector<double> logits(z.data(), z.data() + z.size());
    out.prediction = PredictionResult::from_logits(std::move(logits));
    return out;
}

double log1pexp(double v) { return v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v)); }

double sigmoid(double v) {
    if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
    const double e = std::exp(v);
    return e / (1.0 + e);
}

/// Sign pattern of every activated pre-activation.
std::vector<bool> activation_pattern(const ModelWeights& w, const VariableRelationalHypergraph& h,
                                     std::vector<double>& logits) {
    FullCache c;
    logits = run_forward(w, h, &c).prediction.logits;
    std::vector<bool> out;
    auto add = [&](const Mlp& mlp, const MlpCache& mc) {
        for (std::size_t k = 0; k < mc.pre.size(); ++k) {
            if (k + 1 == mlp.layers.size() && !mlp.activate_output) continue;
            const Matrix& z = mc.pre[k];
            for (Eigen::Index i = 0; i < z.size(); ++i) out.push_back(z.data()[i] > 0.0);
        }
    };
    add(w.embed_v, c.embed_v);
    add(w.embed_e, c.embed_e);
    for (std::size_t t = 0; t < w.conv.size(); ++t) {
        add(w.conv[t].phi_e, c.phi_e[t]);
        add(w.conv[t].phi_v, c.phi_v[t]);
    }
    add(w.head, c.head);
    return out;
}

}  // namespace

ModelWeights ModelWeights::zeros_like() const {
    ModelWeights z = *this;
    for (auto& b : z.blocks()) std::fill(b.data, b.data + b.size(), 0.0);
    return z;
}

std::vector<ModelWeights::Block> ModelWeights::blocks() {
    std::vector<Block> out;
    for_each_mlp(*this, [&](const std::string& name, Mlp& mlp) {
        for (std::size_t k = 0; k < mlp.layers.size(); ++k) {
            Dense& d = mlp.layers[k];
            const std::string p = name + "." + std::to_string(k);
            out.push_back({p + ".weight", d.W.data(), static_cast<int>(d.W.rows()),
                           static_cast<int>(d.W.cols())});
            out.push_back({p + ".bias", d.b.data(), static_cast<int>(d.b.size()), 1});
        }
    });
    return out;
}

std::size_t ModelWeights::num_parameters() const {
    std::size_t n = 0;
    for (const auto& b : const_cast<ModelWeights*>(this)->blocks()) n += b.size();
    return n;
}

ModelWeights init_weights(std::uint64_t seed, const ModelDims& dims) {
    ModelWeights w = shaped(dims);
    SplitMix64 rng(seed);
    for (auto& b : w.blocks()) {
        if (b.name.ends_with(".bias")) continue;
        const double r = std::sqrt(6.0 / ((1.0 + kLeakySlope * kLeakySlope) * b.cols));
        for (std::size_t k = 0; k < b.size(); ++k) b.data[k] = rng.uniform(-r, r);
    }
    return w;
}

ForwardOutput forward(const ModelWeights& w, const VariableRelationalHypergraph& h) {
    return run_forward(w, h, nullptr);
}

double bce_loss(const std::vector<double>& logits, const std::vector<double>& labels) {
    if (logits.empty()) throw InvalidArgument("bce_loss: empty input");
    if (logits.size() != labels.size()) throw InvalidArgument("bce_loss: length mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        // -[y log s(z) + (1-y) log(1-s(z))] = log(1+e^z) - y z
        total += log1pexp(logits[i]) - labels[i] * logits[i];
    }
    return total / static_cast<double>(logits.size());
}

std::vector<double> bce_grad(const std::vector<double>& logits, const std::vector<double>& labels) {
    if (logits.empty()) throw InvalidArgument("bce_grad: empty input");
    if (logits.size() != labels.size()) throw InvalidArgument("bce_grad: length mismatch");
    std::vector<double> g(logits.size());
    const double inv = 1.0 / static_cast<double>(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) g[i] = (sigmoid(logits[i]) - labels[i]) * inv;
    return g;
}

double loss_and_gradient(const ModelWeights& w, const VariableRelationalHypergraph& h,
                         const std::vector<double>& labels, ModelWeights& grad) {
    if (static_cast<int>(labels.size()) != h.num_variables)
        throw InvalidArgument("loss_and_gradient: expected " + std::to_string(h.num_variables) +
                              " labels, got " + std::to_string(labels.size()));
    FullCache cache;
    const ForwardOutput out = run_forward(w, h, &cache);
    const double loss = bce_loss(out.prediction.logits, labels);
    const std::vector<double> g = bce_grad(out.prediction.logits, labels);

    const int d = w.dims.embed;
    const Matrix d_logits = Eigen::Map<const Matrix>(g.data(), static_cast<Eigen::Index>(g.size()), 1);
    Matrix d_hv = Matrix::Zero(h.num_vertices(), d);
    d_hv.topRows(h.num_variables) = mlp_backward(w.head, cache.head, d_logits, grad.head);
    Matrix d_he = Matrix::Zero(h.num_hyperedges(), d);

    for (std::size_t t = w.conv.size(); t-- > 0;) {
        const Matrix d_xv = mlp_backward(w.conv[t].phi_v, cache.phi_v[t], d_hv, grad.conv[t].phi_v);
        Matrix d_hv_prev = d_xv.leftCols(d);
        const Matrix d_mean = d_xv.rightCols(d);
        for (int v = 0; v < h.num_vertices(); ++v) {
            const auto& inc = h.vertex_edges[v];
            if (inc.empty()) continue;
            const double inv = 1.0 / static_cast<double>(inc.size());
            for (int e : inc) d_he.row(e) += inv * d_mean.row(v);
        }
        const Matrix d_xe = mlp_backward(w.conv[t].phi_e, cache.phi_e[t], d_he, grad.conv[t].phi_e);
        d_he = d_xe.leftCols(d);
        for (int e = 0; e < h.num_hyperedges(); ++e)
            for (int m : h.hyperedges[e].members) d_hv_prev.row(m) += d_xe.row(e).tail(d);
        d_hv = std::move(d_hv_prev);
    }
    mlp_backward(w.embed_v, cache.embed_v, d_hv, grad.embed_v);
    if (h.num_hyperedges() > 0) mlp_backward(w.embed_e, cache.embed_e, d_he, grad.embed_e);
    return loss;
}

AdamState AdamState::for_weights(const ModelWeights& w) { return {w.zeros_like(), w.zeros_like(), 0}; }

void TrainConfig::check() const {
    if (!(lr > 0.0)) throw InvalidArgument("TrainConfig: lr must be positive");
    if (weight_decay < 0.0) throw InvalidArgument("TrainConfig: weight_decay must be nonnegative");
    if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0))
        throw InvalidArgument("TrainConfig: betas must lie in [0, 1)");
    if (batch_size < 1) throw InvalidArgument("TrainConfig: batch_size must be at least 1");
}

double train_step(ModelWeights& w, AdamState& state, const std::vector<const Sample*>& batch,
                  const TrainConfig& cfg) {
    cfg.check();
    if (batch.empty()) throw InvalidArgument("train_step: empty batch");
    ModelWeights grad = w.zeros_like();
    double loss = 0.0;
    for (const Sample* s : batch) loss += loss_and_gradient(w, s->graph, s->labels, grad);
    loss /= static_cast<double>(batch.size());
    if (!std::isfinite(loss))
        throw NumericalError("train_step: non-finite loss at step " + std::to_string(state.step));

    ++state.step;
    const double scale = 1.0 / static_cast<double>(batch.size());
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    auto pw = w.blocks();
    auto pg = grad.blocks();
    auto pm = state.m.blocks();
    auto pv = state.v.blocks();
    for (std::size_t b = 0; b < pw.size(); ++b) {
        for (std::size_t k = 0; k < pw[b].size(); ++k) {
            const double g = pg[b].data[k] * scale;
            double& m = pm[b].data[k];
            double& v = pv[b].data[k];
            m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
            v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g;
            double& p = pw[b].data[k];
            p *= 1.0 - cfg.lr * cfg.weight_decay;
            p -= cfg.lr * (m / c1) / (std::sqrt(v / c2) + cfg.eps);
        }
    }
    return loss;
}

TrainResult train(const std::vector<Sample>& dataset, int epochs, const TrainConfig& cfg,
                  ModelWeights initial) {
    cfg.check();
    if (dataset.empty()) throw InvalidArgument("train: empty dataset");
    if (epochs < 0) throw InvalidArgument("train: epochs must be nonnegative");
    TrainResult out{std::move(initial), {}};
    AdamState state = AdamState::for_weights(out.weights);
    std::vector<int> order(dataset.size());
    for (int e = 0; e < epochs; ++e) {
        std::iota(order.begin(), order.end(), 0);
        if (cfg.shuffle) {
            SplitMix64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(e)));
            rng.shuffle(order);
        }
        double total = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            std::vector<const Sample*> batch;
            for (std::size_t k = start; k < std::min(order.size(), start + cfg.batch_size); ++k)
                batch.push_back(&dataset[order[k]]);
            total += train_step(out.weights, state, batch, cfg) * static_cast<double>(batch.size());
        }
        const double mean = total / static_cast<double>(dataset.size());
        out.loss_curve.push_back(mean);
        if (cfg.plateau_tol > 0.0 && out.loss_curve.size() >= 2) {
            const double prev = out.loss_curve[out.loss_curve.size() - 2];
            if (prev - mean < cfg.plateau_tol * prev) break;
        }
    }
    return out;
}

FiniteDiffReport finite_diff_check(const ModelWeights& w, const VariableRelationalHypergraph& h,
                                   const std::vector<double>& labels, double eps, int coordinates,
                                   std::uint64_t seed, const GradientHook& hook) {
    if (!(eps >= 1e-6 && eps <= 1e-3)) throw InvalidArgument("finite_diff_check: eps must lie in [1e-6, 1e-3]");
    if (coordinates < 1) throw InvalidArgument("finite_diff_check: at least one coordinate required");
    ModelWeights grad = w.zeros_like();
    loss_and_gradient(w, h, labels, grad);
    if (hook) hook(grad);

    ModelWeights probe = w;
    auto pb = probe.blocks();
    auto gb = grad.blocks();
    const int count = std::max<int>(coordinates, 50);
    SplitMix64 rng(seed);
    FiniteDiffReport rep;
    std::vector<bool> seen(pb.size(), false);
    for (int c = 0; c < count; ++c) {
        const std::size_t b = static_cast<std::size_t>(c) % pb.size();
        // A coordinate whose perturbation flips an activation sign straddles
        // a kink, where central differences are meaningless: draw again.
        std::size_t k = 0;
        double up = 0.0, down = 0.0;
        bool smooth = false;
        for (int attempt = 0; attempt < 16 && !smooth; ++attempt) {
            k = rng.below(pb[b].size());
            double& p = pb[b].data[k];
            const double orig = p;
            std::vector<double> lu, ld;
            p = orig + eps;
            const auto su = activation_pattern(probe, h, lu);
            p = orig - eps;
            const auto sd = activation_pattern(probe, h, ld);
            p = orig;
            up = bce_loss(lu, labels);
            down = bce_loss(ld, labels);
            smooth = su == sd;
            if (!smooth) ++rep.kink_skips;
        }
        const double numeric = (up - down) / (2.0 * eps);
        const double analytic = gb[b].data[k];
        const double rel = std::abs(analytic - numeric) /
                           std::max({std::abs(analytic), std::abs(numeric), 1e-6});
        if (rel > rep.max_rel_error) {
            rep.max_rel_error = rel;
            rep.worst_block = pb[b].name;
        }
        if (!seen[b]) {
            seen[b] = true;
            rep.blocks_checked.push_back(pb[b].name);
        }
        ++rep.coordinates;
    }
    return rep;
}

std::string save_weights(const ModelWeights& w) {
    ordered_json doc;
    doc["version"] = kWeightsVersion;
    doc["dims"] = {{"embed", w.dims.embed},
                   {"hidden", w.dims.hidden},
                   {"layers", w.dims.layers},
                   {"head_hidden", w.dims.head_hidden}};
    doc["activation"] = {{"kind", "leaky_relu"}, {"negative_slope", kLeakySlope}};
    ordered_json layers = ordered_json::array();
    for (const auto& b : const_cast<ModelWeights&>(w).blocks()) {
        ordered_json jl;
        jl["name"] = b.name;
        jl["shape"] = b.name.ends_with(".bias") ? ordered_json::array({b.rows})
                                                : ordered_json::array({b.rows, b.cols});
        jl["values"] = std::vector<double>(b.data, b.data + b.size());
        layers.push_back(std::move(jl));
    }
    doc["layers"] = std::move(layers);
    return doc.dump() + "\n";
}

void save_weights_file(const ModelWeights& w, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("save_weights_file: cannot open " + path.string());
    f << save_weights(w);
    if (!f) throw Error("save_weights_file: write failed for " + path.string());
}

namespace {

int dim_field(const ordered_json& dims, const char* key) {
    if (!dims.contains(key) || !dims[key].is_number_integer())
        throw SchemaError(std::string("dims.") + key, "expected an integer");
    return dims[key].get<int>();
}

ordered_json parse_json(std::string_view text, const char* what) {
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("", std::string("malformed ") + what + " JSON: " + e.what());
    }
}

}  // namespace

ModelWeights load_weights(std::string_view json_text) {
    const ordered_json doc = parse_json(json_text, "weights");
    if (!doc.is_object()) throw SchemaError("", "weights document must be an object");
    if (!doc.contains("version") || !doc["version"].is_number_integer())
        throw SchemaError("version", "missing or not an integer");
    if (doc["version"].get<int>() != kWeightsVersion)
        throw SchemaError("version", "unsupported weights version " + doc["version"].dump() +
                                             " (expected " + std::to_string(kWeightsVersion) + ")");
    if (!doc.contains("dims") || !doc["dims"].is_object()) throw SchemaError("dims", "missing");
    const auto& jd = doc["dims"];
    ModelDims dims{dim_field(jd, "embed"), dim_field(jd, "hidden"), dim_field(jd, "layers"),
                   dim_field(jd, "head_hidden")};
    try {
        dims.check();
    } catch (const InvalidArgument& e) {
        throw SchemaError("dims", e.what());
    }
    if (!doc.contains("layers") || !doc["layers"].is_array()) throw SchemaError("layers", "missing");
    const auto& jl = doc["layers"];

    ModelWeights w = shaped(dims);
    auto blocks = w.blocks();
    if (jl.size() != blocks.size())
        throw SchemaError("layers", "expected " + std::to_string(blocks.size()) + " blocks, found " +
                                            std::to_string(jl.size()));
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const std::string path = "layers[" + std::to_string(b) + "]";
        const auto& e = jl[b];
        if (!e.is_object() || !e.contains("name") || !e["name"].is_string())
            throw SchemaError(path + ".name", "missing");
        const std::string name = e["name"].get<std::string>();
        if (name != blocks[b].name)
            throw SchemaError(path + ".name", "expected block " + blocks[b].name + ", found " + name);
        const bool bias = name.ends_with(".bias");
        const ordered_json want = bias ? ordered_json::array({blocks[b].rows})
                                       : ordered_json::array({blocks[b].rows, blocks[b].cols});
        if (!e.contains("shape") || e["shape"] != want)
            throw SchemaError(path + ".shape", "shape mismatch in " + name + ": expected " +
                                                       want.dump() + ", found " +
                                                       (e.contains("shape") ? e["shape"].dump() : "none"));
        if (!e.contains("values") || !e["values"].is_array() || e["values"].size() != blocks[b].size())
            throw SchemaError(path + ".values", "value count mismatch in " + name);
        for (std::size_t k = 0; k < blocks[b].size(); ++k) {
            const auto& v = e["values"][k];
            if (!v.is_number()) throw SchemaError(path + ".values", "non-numeric entry in " + name);
            const double x = v.get<double>();
            if (!std::isfinite(x)) throw SchemaError(path + ".values", "non-finite entry in " + name);
            blocks[b].data[k] = x;
        }
    }
    return w;
}

ModelWeights load_weights_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("load_weights_file: cannot open " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return load_weights(ss.str());
}

std::string save_manifest(const DatasetManifest& m) {
    ordered_json doc;
    doc["label_source"] = m.label_source;
    ordered_json entries = ordered_json::array();
    for (const auto& e : m.entries) entries.push_back({{"instance", e.instance}, {"labels", e.labels}});
    doc["entries"] = std::move(entries);
    return doc.dump(2) + "\n";
}

DatasetManifest load_manifest(std::string_view json_text) {
    const ordered_json doc = parse_json(json_text, "manifest");
    DatasetManifest m;
    if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array())
        throw SchemaError("entries", "missing");
    m.label_source = doc.value("label_source", std::string());
    for (std::size_t k = 0; k < doc["entries"].size(); ++k) {
        const auto& e = doc["entries"][k];
        const std::string path = "entries[" + std::to_string(k) + "]";
        if (!e.is_object() || !e.contains("instance") || !e["instance"].is_string())
            throw SchemaError(path + ".instance", "missing");
        if (!e.contains("labels") || !e["labels"].is_string())
            throw SchemaError(path + ".labels", "missing");
        m.entries.push_back({e["instance"].get<std::string>(), e["labels"].get<std::string>()});
    }
    return m;
}

std::string save_labels(const std::vector<double>& labels) {
    ordered_json doc;
    doc["labels"] = labels;
    return doc.dump() + "\n";
}

std::vector<double> load_labels(std::string_view json_text) {
    const ordered_json doc = parse_json(json_text, "labels");
    if (!doc.is_object() || !doc.contains("labels") || !doc["labels"].is_array())
        throw SchemaError("labels", "missing");
    std::vector<double> out;
    for (std::size_t k = 0; k < doc["labels"].size(); ++k) {
        const auto& v = doc["labels"][k];
        if (!v.is_number() || (v.get<double>() != 0.0 && v.get<double>() != 1.0))
            throw SchemaError("labels[" + std::to_string(k) + "]", "expected 0 or 1");
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace hyperqcqp
