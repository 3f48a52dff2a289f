// Copyright 2026 The sylq Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SYLQ_MODEL_H_
#define SYLQ_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sylq/adam.h"
#include "sylq/dataset.h"
#include "sylq/dsp.h"
#include "sylq/nn.h"

namespace sylq {

inline constexpr int kModelFormatVersion = 1;

struct TrainConfig {
  AdamConfig adam;
  int batch_size = 32;
  int epochs = 30;
  std::uint64_t seed = 0;
  // Global L2 norm cap on each batch gradient; 0 disables clipping.
  double clip_norm = 5.0;

  void validate() const;
};

struct EpochMetrics {
  double train_loss = 0;
  double train_accuracy = 0;
  double test_loss = 0;
  double test_accuracy = 0;

  bool operator==(const EpochMetrics&) const = default;
};

// One row per epoch. The last row is measured on the stored
// (single-precision) parameters, so it matches what a reloaded model scores.
struct TrainTrace {
  std::vector<EpochMetrics> epochs;
};

struct TrainMeta {
  std::uint64_t seed = 0;
  int epochs = 0;
  int batch_size = 0;
  double learning_rate = 0;
  double adam_beta1 = 0;
  double adam_beta2 = 0;
  double adam_epsilon = 0;
  double clip_norm = 0;
  std::string cohort = "all";
  double split_ratio = 0.8;
  std::string split_by = "fragment";
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  EpochMetrics final_metrics;
  // Hyperparameters left at their built-in defaults.
  std::vector<std::string> defaults_used;

  bool operator==(const TrainMeta&) const = default;
};

struct Model {
  Architecture arch;
  Eigen::VectorXd parameters;
  DspConfig dsp;
  std::optional<Standardizer> standardizer;
  TrainMeta meta;

  // A model whose parameters are all zero.
  static Model zeros(const Architecture& arch);

  // Probabilities for each fragment, in order. Fragments must be
  // input_steps x input_dim.
  Eigen::RowVectorXd predict(std::span<const Fragment* const> fragments) const;
  double predict(const Fragment& fragment) const;
};

// Packs fragments into the D x (T*B) layout the network consumes, applying
// the standardizer when given.
Eigen::MatrixXd pack_batch(std::span<const Fragment* const> fragments, const Architecture& arch,
                           const Standardizer* standardizer = nullptr);

// Glorot-uniform weights, zero biases, forget-gate biases of one.
Eigen::VectorXd initial_parameters(const Architecture& arch, std::uint64_t seed);

struct TrainResult {
  Model model;
  TrainTrace trace;
};

// Mini-batch Adam on mean binary cross-entropy. Batches are reshuffled every
// epoch from the seed. Throws DegenerateInput when the training split lacks
// a class and ShapeMismatch when fragments do not fit the architecture.
TrainResult train(const std::vector<Fragment>& fragments, const std::vector<int>& labels,
                  const SplitAssignment& split, const TrainConfig& tc, const Architecture& arch,
                  const DspConfig& dsp);

struct SplitMetrics {
  double loss = 0;
  double accuracy = 0;
};

SplitMetrics measure(const Model& model, const std::vector<Fragment>& fragments,
                     const std::vector<int>& labels, std::span<const std::size_t> indices);

// Self-describing JSON document; parameters stored as float32 bits in hex.
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

std::string serialize_model(const Model& model);
Model deserialize_model(const std::string& text);

}  // namespace sylq

#endif  // SYLQ_MODEL_H_
