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

#include "sylq/model.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sylq/error.h"
#include "sylq/random.h"

namespace sylq {
namespace {

using json = nlohmann::json;

constexpr Eigen::Index kPredictChunk = 256;

Eigen::VectorXd round_to_float(const Eigen::VectorXd& v) { return v.cast<float>().cast<double>(); }

std::string encode_floats(const Eigen::Ref<const Eigen::VectorXd>& v) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(static_cast<std::size_t>(v.size()) * 8, '0');
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v[i]));
    for (int k = 0; k < 8; ++k) {
      out[static_cast<std::size_t>(i) * 8 + k] = kHex[(bits >> (28 - 4 * k)) & 0xf];
    }
  }
  return out;
}

Eigen::VectorXd decode_floats(const std::string& hex, Eigen::Index expected) {
  if (hex.size() != static_cast<std::size_t>(expected) * 8) {
    throw CorruptFile("model file: expected " + std::to_string(expected) +
                      " packed floats, found " + std::to_string(hex.size() / 8));
  }
  Eigen::VectorXd v(expected);
  for (Eigen::Index i = 0; i < expected; ++i) {
    std::uint32_t bits = 0;
    for (int k = 0; k < 8; ++k) {
      const char c = hex[static_cast<std::size_t>(i) * 8 + k];
      std::uint32_t nibble;
      if (c >= '0' && c <= '9') {
        nibble = static_cast<std::uint32_t>(c - '0');
      } else if (c >= 'a' && c <= 'f') {
        nibble = static_cast<std::uint32_t>(c - 'a' + 10);
      } else {
        throw CorruptFile("model file: bad hex digit in packed floats");
      }
      bits = (bits << 4) | nibble;
    }
    const float f = std::bit_cast<float>(bits);
    if (!std::isfinite(f)) throw CorruptFile("model file: non-finite value");
    v[i] = f;
  }
  return v;
}

std::string checksum_of(const json& doc) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(doc.dump())));
  return buf;
}

json arch_to_json(const Architecture& a) {
  return {{"input_steps", a.input_steps},   {"input_dim", a.input_dim},
          {"lstm1_units", a.lstm1_units},   {"lstm2_units", a.lstm2_units},
          {"dense1_units", a.dense1_units}, {"dense2_units", a.dense2_units},
          {"output_units", a.output_units}};
}

Architecture arch_from_json(const json& j) {
  Architecture a;
  a.input_steps = j.at("input_steps").get<int>();
  a.input_dim = j.at("input_dim").get<int>();
  a.lstm1_units = j.at("lstm1_units").get<int>();
  a.lstm2_units = j.at("lstm2_units").get<int>();
  a.dense1_units = j.at("dense1_units").get<int>();
  a.dense2_units = j.at("dense2_units").get<int>();
  a.output_units = j.at("output_units").get<int>();
  return a;
}

json dsp_to_json(const DspConfig& c) {
  return {{"frame_len", c.frame_len},
          {"hop", c.hop},
          {"window", c.window == Window::kHann ? "hann" : "rect"},
          {"gate_ratio", c.gate_ratio},
          {"log_floor", c.log_floor},
          {"fragment_hop", c.fragment_hop},
          {"log_compress", c.log_compress},
          {"standardize", c.standardize}};
}

DspConfig dsp_from_json(const json& j) {
  DspConfig c;
  c.frame_len = j.at("frame_len").get<int>();
  c.hop = j.at("hop").get<int>();
  const auto w = j.at("window").get<std::string>();
  if (w != "hann" && w != "rect") throw CorruptFile("model file: unknown window " + w);
  c.window = w == "hann" ? Window::kHann : Window::kRect;
  c.gate_ratio = j.at("gate_ratio").get<double>();
  c.log_floor = j.at("log_floor").get<double>();
  c.fragment_hop = j.at("fragment_hop").get<int>();
  c.log_compress = j.at("log_compress").get<bool>();
  c.standardize = j.at("standardize").get<bool>();
  return c;
}

json metrics_to_json(const EpochMetrics& m) {
  return {{"train_loss", m.train_loss},
          {"train_accuracy", m.train_accuracy},
          {"test_loss", m.test_loss},
          {"test_accuracy", m.test_accuracy}};
}

EpochMetrics metrics_from_json(const json& j) {
  return {j.at("train_loss").get<double>(), j.at("train_accuracy").get<double>(),
          j.at("test_loss").get<double>(), j.at("test_accuracy").get<double>()};
}

json meta_to_json(const TrainMeta& m) {
  return {{"seed", m.seed},
          {"epochs", m.epochs},
          {"batch_size", m.batch_size},
          {"learning_rate", m.learning_rate},
          {"adam_beta1", m.adam_beta1},
          {"adam_beta2", m.adam_beta2},
          {"adam_epsilon", m.adam_epsilon},
          {"clip_norm", m.clip_norm},
          {"cohort", m.cohort},
          {"split_ratio", m.split_ratio},
          {"split_by", m.split_by},
          {"n_train", m.n_train},
          {"n_test", m.n_test},
          {"final_metrics", metrics_to_json(m.final_metrics)},
          {"defaults_used", m.defaults_used}};
}

TrainMeta meta_from_json(const json& j) {
  TrainMeta m;
  m.seed = j.at("seed").get<std::uint64_t>();
  m.epochs = j.at("epochs").get<int>();
  m.batch_size = j.at("batch_size").get<int>();
  m.learning_rate = j.at("learning_rate").get<double>();
  m.adam_beta1 = j.at("adam_beta1").get<double>();
  m.adam_beta2 = j.at("adam_beta2").get<double>();
  m.adam_epsilon = j.at("adam_epsilon").get<double>();
  m.clip_norm = j.at("clip_norm").get<double>();
  m.cohort = j.at("cohort").get<std::string>();
  m.split_ratio = j.at("split_ratio").get<double>();
  m.split_by = j.at("split_by").get<std::string>();
  m.n_train = j.at("n_train").get<std::size_t>();
  m.n_test = j.at("n_test").get<std::size_t>();
  m.final_metrics = metrics_from_json(j.at("final_metrics"));
  m.defaults_used = j.at("defaults_used").get<std::vector<std::string>>();
  return m;
}

std::vector<std::string> defaults_in(const TrainConfig& tc) {
  const TrainConfig d;
  std::vector<std::string> out;
  if (tc.adam.learning_rate == d.adam.learning_rate) out.push_back("learning_rate");
  if (tc.adam.beta1 == d.adam.beta1) out.push_back("adam_beta1");
  if (tc.adam.beta2 == d.adam.beta2) out.push_back("adam_beta2");
  if (tc.adam.epsilon == d.adam.epsilon) out.push_back("adam_epsilon");
  if (tc.batch_size == d.batch_size) out.push_back("batch_size");
  if (tc.epochs == d.epochs) out.push_back("epochs");
  if (tc.clip_norm == d.clip_norm) out.push_back("clip_norm");
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(adam.learning_rate > 0) || !(adam.epsilon > 0)) {
    throw ValidationError("learning rate and epsilon must be positive");
  }
  if (!(adam.beta1 > 0 && adam.beta1 < 1) || !(adam.beta2 > 0 && adam.beta2 < 1)) {
    throw ValidationError("Adam betas must be in (0, 1)");
  }
  if (batch_size < 1) throw ValidationError("batch size must be >= 1");
  if (epochs < 1) throw ValidationError("epochs must be >= 1");
  if (clip_norm < 0) throw ValidationError("clip norm must be >= 0");
}

Model Model::zeros(const Architecture& arch) {
  validate(arch);
  Model m;
  m.arch = arch;
  m.parameters = Eigen::VectorXd::Zero(parameter_count(arch));
  return m;
}

Eigen::MatrixXd pack_batch(std::span<const Fragment* const> fragments, const Architecture& arch,
                           const Standardizer* standardizer) {
  const auto batch = static_cast<Eigen::Index>(fragments.size());
  Eigen::MatrixXd packed(arch.input_dim, arch.input_steps * batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    const Fragment& f = *fragments[static_cast<std::size_t>(b)];
    if (f.values.rows() != arch.input_steps || f.values.cols() != arch.input_dim) {
      throw ShapeMismatch("fragment must be " + std::to_string(arch.input_steps) + " x " +
                          std::to_string(arch.input_dim) + ", got " +
                          std::to_string(f.values.rows()) + " x " +
                          std::to_string(f.values.cols()));
    }
    if (!f.values.allFinite()) throw ShapeMismatch("fragment has non-finite entries");
    const Eigen::MatrixXd v = standardizer != nullptr ? standardizer->apply(f.values) : f.values;
    for (Eigen::Index t = 0; t < arch.input_steps; ++t) {
      packed.col(t * batch + b) = v.row(t).transpose();
    }
  }
  return packed;
}

Eigen::RowVectorXd Model::predict(std::span<const Fragment* const> fragments) const {
  Eigen::RowVectorXd out(static_cast<Eigen::Index>(fragments.size()));
  const Standardizer* stats = standardizer ? &*standardizer : nullptr;
  for (std::size_t start = 0; start < fragments.size(); start += kPredictChunk) {
    const std::size_t n = std::min<std::size_t>(kPredictChunk, fragments.size() - start);
    const auto chunk = fragments.subspan(start, n);
    const Eigen::MatrixXd inputs = pack_batch(chunk, arch, stats);
    out.segment(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(n)) =
        forward<double>(arch, parameters, inputs, static_cast<Eigen::Index>(n));
  }
  return out;
}

double Model::predict(const Fragment& fragment) const {
  const Fragment* one[] = {&fragment};
  return predict(std::span<const Fragment* const>(one))(0);
}

Eigen::VectorXd initial_parameters(const Architecture& arch, std::uint64_t seed) {
  validate(arch);
  Rng rng(mix_seed(seed, 0));
  Eigen::VectorXd p = Eigen::VectorXd::Zero(parameter_count(arch));
  for (const auto& slot : parameter_layout(arch)) {
    if (slot.cols == 1) {
      if (slot.name == "lstm1.b" || slot.name == "lstm2.b") {
        const Eigen::Index h = slot.rows / 4;
        p.segment(slot.offset + h, h).setOnes();
      }
      continue;
    }
    // Weight matrices map cols inputs to rows outputs.
    const double limit = std::sqrt(6.0 / static_cast<double>(slot.rows + slot.cols));
    for (Eigen::Index i = 0; i < slot.size(); ++i) {
      p[slot.offset + i] = rng.uniform(-limit, limit);
    }
  }
  return p;
}

SplitMetrics measure(const Model& model, const std::vector<Fragment>& fragments,
                     const std::vector<int>& labels, std::span<const std::size_t> indices) {
  if (indices.empty()) throw EmptySplit("cannot measure an empty split");
  std::vector<const Fragment*> ptrs;
  ptrs.reserve(indices.size());
  for (std::size_t i : indices) ptrs.push_back(&fragments[i]);
  const Eigen::RowVectorXd p = model.predict(ptrs);
  SplitMetrics m;
  std::size_t correct = 0;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const int y = labels[indices[k]];
    const double pk = p(static_cast<Eigen::Index>(k));
    m.loss += bce_loss(pk, y);
    if ((pk >= 0.5 ? 1 : 0) == y) ++correct;
  }
  m.loss /= static_cast<double>(indices.size());
  m.accuracy = static_cast<double>(correct) / static_cast<double>(indices.size());
  return m;
}

TrainResult train(const std::vector<Fragment>& fragments, const std::vector<int>& labels,
                  const SplitAssignment& split, const TrainConfig& tc, const Architecture& arch,
                  const DspConfig& dsp) {
  validate(arch);
  tc.validate();
  if (labels.size() != fragments.size()) {
    throw ShapeMismatch("train: label count differs from fragment count");
  }
  bool seen[2] = {false, false};
  for (std::size_t i : split.train_indices) {
    if (labels.at(i) != 0 && labels[i] != 1) throw DegenerateInput("train: unlabeled fragment");
    seen[labels[i]] = true;
  }
  if (!seen[0] || !seen[1]) {
    throw DegenerateInput("train: the training split must contain both classes");
  }
  if (split.test_indices.empty()) throw EmptySplit("train: the test split is empty");

  TrainResult result;
  Model& model = result.model;
  model.arch = arch;
  model.dsp = dsp;
  if (dsp.standardize) {
    std::vector<const Fragment*> train_frags;
    for (std::size_t i : split.train_indices) train_frags.push_back(&fragments[i]);
    model.standardizer = Standardizer::fit(train_frags);
  }
  model.parameters = initial_parameters(arch, tc.seed);

  // Inputs are standardized once up front; pack_batch then runs without stats.
  std::vector<Fragment> prepared;
  if (model.standardizer) {
    prepared.reserve(fragments.size());
    for (const auto& f : fragments)
      prepared.push_back({model.standardizer->apply(f.values), f.source});
  }
  const std::vector<Fragment>& inputs = model.standardizer ? prepared : fragments;

  AdamState<double> adam(model.parameters.size());
  Rng rng(mix_seed(tc.seed, 1));
  std::vector<std::size_t> order = split.train_indices;
  Eigen::VectorXd grad;
  std::vector<const Fragment*> batch;
  std::vector<int> batch_labels;

  auto metrics = [&]() {
    EpochMetrics e;
    const auto tr = measure(model, fragments, labels, split.train_indices);
    const auto te = measure(model, fragments, labels, split.test_indices);
    e.train_loss = tr.loss;
    e.train_accuracy = tr.accuracy;
    e.test_loss = te.loss;
    e.test_accuracy = te.accuracy;
    return e;
  };

  for (int epoch = 0; epoch < tc.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(tc.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(tc.batch_size));
      batch.clear();
      batch_labels.clear();
      for (std::size_t k = start; k < end; ++k) {
        batch.push_back(&inputs[order[k]]);
        batch_labels.push_back(labels[order[k]]);
      }
      const Eigen::MatrixXd packed = pack_batch(batch, arch);
      backward<double>(arch, model.parameters, packed, batch_labels, grad);
      if (tc.clip_norm > 0) {
        const double norm = grad.norm();
        if (norm > tc.clip_norm) grad *= tc.clip_norm / norm;
      }
      adam_step(model.parameters, grad, adam, tc.adam);
    }
    if (!model.parameters.allFinite()) {
      throw DegenerateInput("train: parameters diverged at epoch " + std::to_string(epoch + 1));
    }
    if (epoch + 1 < tc.epochs) result.trace.epochs.push_back(metrics());
  }
  model.parameters = round_to_float(model.parameters);
  result.trace.epochs.push_back(metrics());

  TrainMeta& meta = model.meta;
  meta.seed = tc.seed;
  meta.epochs = tc.epochs;
  meta.batch_size = tc.batch_size;
  meta.learning_rate = tc.adam.learning_rate;
  meta.adam_beta1 = tc.adam.beta1;
  meta.adam_beta2 = tc.adam.beta2;
  meta.adam_epsilon = tc.adam.epsilon;
  meta.clip_norm = tc.clip_norm;
  meta.n_train = split.train_indices.size();
  meta.n_test = split.test_indices.size();
  meta.final_metrics = result.trace.epochs.back();
  meta.defaults_used = defaults_in(tc);
  return result;
}

std::string serialize_model(const Model& model) {
  json doc;
  doc["format"] = "sylq-model";
  doc["format_version"] = kModelFormatVersion;
  doc["architecture"] = arch_to_json(model.arch);
  json layout = json::array();
  for (const auto& s : parameter_layout(model.arch)) {
    layout.push_back({{"name", s.name}, {"rows", s.rows}, {"cols", s.cols}, {"offset", s.offset}});
  }
  doc["layout"] = layout;
  doc["parameter_encoding"] = "float32-bits-hex";
  doc["parameters"] = encode_floats(model.parameters);
  doc["dsp_config"] = dsp_to_json(model.dsp);
  if (model.standardizer) {
    doc["standardization"] = {{"mean", encode_floats(model.standardizer->mean.transpose())},
                              {"inv_std", encode_floats(model.standardizer->inv_std.transpose())}};
  } else {
    doc["standardization"] = nullptr;
  }
  doc["train_meta"] = meta_to_json(model.meta);
  doc["checksum"] = checksum_of(doc);
  return doc.dump(1) + "\n";
}

Model deserialize_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw CorruptFile(std::string("model file does not parse: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("format_version") ||
      !doc["format_version"].is_number_integer()) {
    throw CorruptFile("model file has no format_version");
  }
  const int version = doc["format_version"].get<int>();
  if (version != kModelFormatVersion) {
    throw VersionMismatch("model file format_version " + std::to_string(version) +
                          " is not supported (expected " + std::to_string(kModelFormatVersion) +
                          ")");
  }
  if (!doc.contains("checksum") || !doc["checksum"].is_string()) {
    throw CorruptFile("model file has no checksum");
  }
  const std::string stored = doc["checksum"].get<std::string>();
  doc.erase("checksum");
  if (checksum_of(doc) != stored) throw CorruptFile("model file checksum mismatch");

  try {
    Model m;
    m.arch = arch_from_json(doc.at("architecture"));
    validate(m.arch);
    const auto slots = parameter_layout(m.arch);
    const json& layout = doc.at("layout");
    if (layout.size() != slots.size()) throw CorruptFile("model file layout mismatch");
    for (std::size_t i = 0; i < slots.size(); ++i) {
      const json& e = layout[i];
      if (e.at("name").get<std::string>() != slots[i].name ||
          e.at("rows").get<Eigen::Index>() != slots[i].rows ||
          e.at("cols").get<Eigen::Index>() != slots[i].cols ||
          e.at("offset").get<Eigen::Index>() != slots[i].offset) {
        throw CorruptFile("model file layout entry " + slots[i].name + " mismatch");
      }
    }
    m.parameters = decode_floats(doc.at("parameters").get<std::string>(), parameter_count(m.arch));
    m.dsp = dsp_from_json(doc.at("dsp_config"));
    const json& st = doc.at("standardization");
    if (!st.is_null()) {
      Standardizer s;
      s.mean = decode_floats(st.at("mean").get<std::string>(), m.arch.input_dim).transpose();
      s.inv_std = decode_floats(st.at("inv_std").get<std::string>(), m.arch.input_dim).transpose();
      m.standardizer = std::move(s);
    }
    m.meta = meta_from_json(doc.at("train_meta"));
    return m;
  } catch (const json::exception& e) {
    throw CorruptFile(std::string("model file is malformed: ") + e.what());
  } catch (const ShapeMismatch& e) {
    throw CorruptFile(std::string("model file is malformed: ") + e.what());
  }
}

void save_model(const Model& model, const std::filesystem::path& path) {
  const std::string text = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write model file " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return deserialize_model(ss.str());
}

}  // namespace sylq
