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
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "hyperqcqp/hypergraph.hpp"
#include "hyperqcqp/instance.hpp"
#include "hyperqcqp/linalg.hpp"
#include "hyperqcqp/prediction.hpp"

namespace hyperqcqp {

inline constexpr double kLeakySlope = 0.1;
inline constexpr int kWeightsVersion = 1;

struct ModelDims {
    int embed = 16;        // width of every vertex / hyperedge feature
    int hidden = 64;       // interior width of the conv MLPs
    int layers = 6;        // convolution layers
    int head_hidden = 64;  // interior width of the head

    void check() const;
    friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

/// y = W x + b, W is out x in.
struct Dense {
    Matrix W;
    Vector b;
};

/// Dense layers with leaky activation between them, and after the last one
/// when `activate_output` is set.
struct Mlp {
    std::vector<Dense> layers;
    bool activate_output = true;

    int in_dim() const { return static_cast<int>(layers.front().W.cols()); }
    int out_dim() const { return static_cast<int>(layers.back().W.rows()); }
};

struct ConvLayer {
    Mlp phi_e;  // [h_e, sum of member h_v] -> h_e'
    Mlp phi_v;  // [h_v, mean of incident h_e'] -> h_v'
};

struct ModelWeights {
    ModelDims dims;
    Mlp embed_v;  // vertex features -> embed
    Mlp embed_e;  // hyperedge features -> embed
    std::vector<ConvLayer> conv;
    Mlp head;  // embed -> head_hidden -> head_hidden -> 1

    /// Same shapes, all entries zero (gradient accumulator).
    ModelWeights zeros_like() const;

    /// Every parameter block with a stable name, e.g. `conv.2.phi_e.1.weight`.
    struct Block {
        std::string name;
        double* data;
        int rows;
        int cols;
        std::size_t size() const { return static_cast<std::size_t>(rows) * cols; }
    };
    std::vector<Block> blocks();
    std::size_t num_parameters() const;
};

/// Fan-in scaled uniform init for the leaky activation:
/// W ~ U(-r, r) with r = sqrt(6 / ((1 + slope^2) * in)), b = 0.
ModelWeights init_weights(std::uint64_t seed, const ModelDims& dims = {});

struct ForwardTrace {
    std::vector<Matrix> vertex;  // h_v at t = 0..L, |V| x embed
    std::vector<Matrix> edge;    // h_e at t = 0..L, |E| x embed
};

struct ForwardOutput {
    PredictionResult prediction;
    ForwardTrace trace;
};

ForwardOutput forward(const ModelWeights& w, const VariableRelationalHypergraph& h);

inline PredictionResult predict(const ModelWeights& w, const VariableRelationalHypergraph& h) {
    return forward(w, h).prediction;
}

/// Mean binary cross-entropy with logits in the log-sum-exp form.
double bce_loss(const std::vector<double>& logits, const std::vector<double>& labels);

/// d(bce_loss)/d(logit_i) = (sigmoid(z_i) - y_i) / n.
std::vector<double> bce_grad(const std::vector<double>& logits, const std::vector<double>& labels);

/// Loss and parameter gradient for one graph.
double loss_and_gradient(const ModelWeights& w, const VariableRelationalHypergraph& h,
                         const std::vector<double>& labels, ModelWeights& grad);

struct AdamState {
    ModelWeights m;
    ModelWeights v;
    std::int64_t step = 0;

    static AdamState for_weights(const ModelWeights& w);
};

struct TrainConfig {
    double lr = 1e-4;
    double weight_decay = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    int batch_size = 1;
    bool shuffle = true;
    std::uint64_t seed = 0;
    /// Stop when an epoch's mean loss improves by less than this fraction;
    /// zero disables the check.
    double plateau_tol = 0.0;

    void check() const;
};

struct Sample {
    VariableRelationalHypergraph graph;
    std::vector<double> labels;  // one per variable vertex
};

/// One AdamW update on the mean gradient of `batch`; returns the mean loss
/// before the update. Throws NumericalError on a non-finite loss.
double train_step(ModelWeights& w, AdamState& state, const std::vector<const Sample*>& batch,
                  const TrainConfig& cfg);

struct TrainResult {
    ModelWeights weights;
    std::vector<double> loss_curve;  // mean loss per epoch
};

TrainResult train(const std::vector<Sample>& dataset, int epochs, const TrainConfig& cfg,
                  ModelWeights initial);

/// Hook applied to the analytic gradient before comparison; lets tests
/// corrupt one block to confirm the check can fail.
using GradientHook = std::function<void(ModelWeights& grad)>;

struct FiniteDiffReport {
    double max_rel_error = 0.0;
    std::string worst_block;
    int coordinates = 0;
    int kink_skips = 0;  // draws rejected for crossing an activation kink
    std::vector<std::string> blocks_checked;
};

/// Central differences on `coordinates` parameters, drawn from every block
/// in turn, against the analytic gradient. Draws whose +-eps probes see
/// different activation sign patterns are redrawn. Relative error is
/// |a - n| / max(1e-6, |a| + |n|).
FiniteDiffReport finite_diff_check(const ModelWeights& w, const VariableRelationalHypergraph& h,
                                   const std::vector<double>& labels, double eps,
                                   int coordinates = 64, std::uint64_t seed = 0,
                                   const GradientHook& hook = {});

std::string save_weights(const ModelWeights& w);
void save_weights_file(const ModelWeights& w, const std::filesystem::path& path);
/// Throws SchemaError on malformed JSON, a version mismatch, or a block
/// whose shape disagrees with `dims` (the message names the block).
ModelWeights load_weights(std::string_view json_text);
ModelWeights load_weights_file(const std::filesystem::path& path);

/// Training data listing: instance and label file pairs plus label origin.
struct DatasetEntry {
    std::string instance;
    std::string labels;
};

struct DatasetManifest {
    std::string label_source;
    std::vector<DatasetEntry> entries;
};

std::string save_manifest(const DatasetManifest& m);
DatasetManifest load_manifest(std::string_view json_text);

/// Label file: {"labels": [...]} with one 0/1 value per variable.
std::string save_labels(const std::vector<double>& labels);
std::vector<double> load_labels(std::string_view json_text);

}  // namespace hyperqcqp
