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

#ifndef SYLQ_ADAM_H_
#define SYLQ_ADAM_H_

#include <cmath>
#include <cstdint>

#include <Eigen/Core>

namespace sylq {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename Scalar>
struct AdamState {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> m;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v;
  std::int64_t t = 0;  // steps taken so far

  explicit AdamState(Eigen::Index n = 0)
      : m(Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n)),
        v(Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n)) {}
};

// One bias-corrected Adam update; advances state.t before using it, so the
// first call runs with t = 1.
template <typename Scalar, typename ParamDerived, typename GradDerived>
void adam_step(Eigen::MatrixBase<ParamDerived>& params, const Eigen::MatrixBase<GradDerived>& grads,
               AdamState<Scalar>& state, const AdamConfig& cfg) {
  const Scalar b1(cfg.beta1), b2(cfg.beta2);
  state.t += 1;
  state.m = b1 * state.m + (Scalar(1) - b1) * grads;
  state.v = b2 * state.v + (Scalar(1) - b2) * grads.cwiseProduct(grads);
  const Scalar c1 = Scalar(1) - std::pow(b1, static_cast<Scalar>(state.t));
  const Scalar c2 = Scalar(1) - std::pow(b2, static_cast<Scalar>(state.t));
  params -= (Scalar(cfg.learning_rate) * (state.m.array() / c1) /
             ((state.v.array() / c2).sqrt() + Scalar(cfg.epsilon)))
                .matrix();
}

}  // namespace sylq

#endif  // SYLQ_ADAM_H_
