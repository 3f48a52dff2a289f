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

#include "sylq/nn.h"

namespace sylq {

std::vector<TensorSlot> parameter_layout(const Architecture& arch) {
  const Eigen::Index d = arch.input_dim, h1 = arch.lstm1_units, h2 = arch.lstm2_units,
                     d1 = arch.dense1_units, d2 = arch.dense2_units, out = arch.output_units;
  std::vector<TensorSlot> slots = {
      {"lstm1.W", 4 * h1, d, 0},  {"lstm1.U", 4 * h1, h1, 0}, {"lstm1.b", 4 * h1, 1, 0},
      {"lstm2.W", 4 * h2, h1, 0}, {"lstm2.U", 4 * h2, h2, 0}, {"lstm2.b", 4 * h2, 1, 0},
      {"dense1.W", d1, h2, 0},    {"dense1.b", d1, 1, 0},     {"dense2.W", d2, d1, 0},
      {"dense2.b", d2, 1, 0},     {"dense3.W", out, d2, 0},   {"dense3.b", out, 1, 0},
  };
  Eigen::Index offset = 0;
  for (auto& s : slots) {
    s.offset = offset;
    offset += s.size();
  }
  return slots;
}

Eigen::Index parameter_count(const Architecture& arch) {
  const auto slots = parameter_layout(arch);
  return slots.back().offset + slots.back().size();
}

void validate(const Architecture& arch) {
  for (int dim : {arch.input_steps, arch.input_dim, arch.lstm1_units, arch.lstm2_units,
                  arch.dense1_units, arch.dense2_units}) {
    if (dim < 1) throw ShapeMismatch("architecture dimensions must be positive");
  }
  if (arch.output_units != 1) throw ShapeMismatch("the output layer must have one unit");
}

}  // namespace sylq
