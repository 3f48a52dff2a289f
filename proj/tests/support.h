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

#ifndef SYLQ_TESTS_SUPPORT_H_
#define SYLQ_TESTS_SUPPORT_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <unistd.h>

#include <Eigen/Core>

#include "sylq/nn.h"
#include "sylq/random.h"

namespace sylq::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("sylq_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  f << text;
}

// The reduced network used for gradient checks: D=2, H1=3, H2=3, 2, 2, 1.
inline Architecture tiny_arch(int steps = 4) {
  Architecture a;
  a.input_steps = steps;
  a.input_dim = 2;
  a.lstm1_units = 3;
  a.lstm2_units = 3;
  a.dense1_units = 2;
  a.dense2_units = 2;
  a.output_units = 1;
  return a;
}

inline Eigen::VectorXd random_vector(Eigen::Index n, Rng& rng, double scale) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * rng.uniform(-1, 1);
  return v;
}

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double scale) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = scale * rng.uniform(-1, 1);
  }
  return m;
}

struct GradCheck {
  double max_rel_error = 0;
  Eigen::Index worst_index = -1;
  bool output_in_ramp = true;  // every output stayed inside hard_sigmoid's linear ramp
};

// Central differences on the mean loss versus backward().
//   rel = |analytic - numeric| / max(|analytic|, |numeric|, floor)
// The floor keeps parameters with vanishing gradient from dividing noise by
// noise; it sits well above the O(h^2) truncation error.
inline GradCheck gradient_check(const Architecture& arch, std::uint64_t seed, int batch = 3,
                                double step = 1e-5, double floor = 1e-6) {
  Rng rng(seed);
  const Eigen::VectorXd params = random_vector(parameter_count(arch), rng, 0.5);
  const Eigen::MatrixXd inputs =
      random_matrix(arch.input_dim, static_cast<Eigen::Index>(arch.input_steps) * batch, rng, 1.0);
  std::vector<int> labels;
  for (int b = 0; b < batch; ++b) labels.push_back(static_cast<int>(rng.below(2)));

  Eigen::VectorXd grad;
  const auto result = backward<double>(arch, params, inputs, labels, grad);

  GradCheck out;
  for (Eigen::Index j = 0; j < result.probabilities.size(); ++j) {
    const double p = result.probabilities[j];
    if (!(p > 0 && p < 1)) out.output_in_ramp = false;
  }
  Eigen::VectorXd probe = params;
  Eigen::VectorXd scratch;
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    probe[i] = params[i] + step;
    const double up = backward<double>(arch, probe, inputs, labels, scratch).mean_loss;
    probe[i] = params[i] - step;
    const double down = backward<double>(arch, probe, inputs, labels, scratch).mean_loss;
    probe[i] = params[i];
    const double numeric = (up - down) / (2 * step);
    const double denom = std::max({std::abs(grad[i]), std::abs(numeric), floor});
    const double rel = std::abs(grad[i] - numeric) / denom;
    if (rel > out.max_rel_error) {
      out.max_rel_error = rel;
      out.worst_index = i;
    }
  }
  return out;
}

}  // namespace sylq::testing

#endif  // SYLQ_TESTS_SUPPORT_H_
