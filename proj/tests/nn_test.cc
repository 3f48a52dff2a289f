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

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "support.h"
#include "sylq/error.h"
#include "sylq/random.h"

namespace sylq {
namespace {

using testing::random_matrix;
using testing::random_vector;
using testing::tiny_arch;

Architecture unit_arch(int steps) {
  Architecture a;
  a.input_steps = steps;
  a.input_dim = a.lstm1_units = a.lstm2_units = a.dense1_units = a.dense2_units = 1;
  return a;
}

// Ones for every weight matrix, zeros for every bias.
Eigen::VectorXd unit_weights(const Architecture& a) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(parameter_count(a));
  for (const auto& slot : parameter_layout(a)) {
    if (slot.name.back() != 'b') p.segment(slot.offset, slot.size()).setOnes();
  }
  return p;
}

TEST(ArchitectureTest, PaperParameterCount) {
  EXPECT_EQ(parameter_count(Architecture{}), 383329);
  // 4(H(D+H)+H) per LSTM, then the dense stack.
  const long d = 513, h1 = 128, h2 = 64;
  const long closed = 4 * (h1 * (d + h1) + h1) + 4 * (h2 * (h1 + h2) + h2) + (64 * h2 + 64) +
                      (16 * 64 + 16) + (16 + 1);
  EXPECT_EQ(parameter_count(Architecture{}), closed);
}

TEST(ArchitectureTest, LayoutIsContiguous) {
  const auto slots = parameter_layout(Architecture{});
  ASSERT_EQ(slots.size(), 12u);
  Eigen::Index offset = 0;
  for (const auto& s : slots) {
    EXPECT_EQ(s.offset, offset) << s.name;
    offset += s.size();
  }
  EXPECT_EQ(slots[0].name, "lstm1.W");
  EXPECT_EQ(slots[0].rows, 512);
  EXPECT_EQ(slots[0].cols, 513);
}

TEST(ArchitectureTest, Validation) {
  Architecture a;
  EXPECT_NO_THROW(validate(a));
  a.output_units = 2;
  EXPECT_THROW(validate(a), ShapeMismatch);
  a = {};
  a.lstm1_units = 0;
  EXPECT_THROW(validate(a), ShapeMismatch);
}

TEST(ActivationTest, HardSigmoid) {
  EXPECT_EQ(hard_sigmoid(0.0), 0.5);
  EXPECT_EQ(hard_sigmoid(2.5), 1.0);
  EXPECT_EQ(hard_sigmoid(-2.5), 0.0);
  EXPECT_EQ(hard_sigmoid(10.0), 1.0);
  EXPECT_DOUBLE_EQ(hard_sigmoid(1.0), 0.7);
  EXPECT_EQ(hard_sigmoid_grad(0.0), 0.2);
  EXPECT_EQ(hard_sigmoid_grad(2.5), 0.0);
  EXPECT_EQ(hard_sigmoid_grad(-3.0), 0.0);
}

TEST(LossTest, BceValues) {
  EXPECT_DOUBLE_EQ(bce_loss(1.0, 1), -std::log(1.0 - 1e-7));
  EXPECT_NEAR(bce_loss(0.5, 1), 0.693147, 1e-6);
  EXPECT_NEAR(bce_loss(0.0, 1), 16.118, 1e-3);
  EXPECT_DOUBLE_EQ(bce_loss(0.0, 1), -std::log(1e-7));
  EXPECT_DOUBLE_EQ(bce_loss(0.25, 0), -std::log(0.75));
  EXPECT_GE(bce_loss(0.3, 0), 0.0);
}

TEST(ForwardTest, ZeroParametersGiveOneHalf) {
  const Architecture a;
  const Eigen::VectorXd p = Eigen::VectorXd::Zero(parameter_count(a));
  Rng rng(1);
  const Eigen::MatrixXd x = random_matrix(a.input_dim, a.input_steps * 3, rng, 5.0);
  const Eigen::RowVectorXd out = forward<double>(a, p, x, 3);
  for (Eigen::Index j = 0; j < 3; ++j) EXPECT_EQ(out[j], 0.5);
}

TEST(ForwardTest, ScalarHandComputation) {
  // One step, input 1: h1 = s(1) tanh(s(1) tanh 1), h2 = s(h1) tanh(s(h1) tanh h1),
  // p = 0.2 s(tanh h2) + 0.5 with s the logistic function.
  const Architecture a = unit_arch(1);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Ones(1, 1);
  EXPECT_NEAR(forward<double>(a, unit_weights(a), x, 1)[0], 0.6060576799006083, 1e-15);

  // Two steps of input 1 exercise the recurrent weights and cell carry.
  const Architecture b = unit_arch(2);
  const Eigen::MatrixXd x2 = Eigen::MatrixXd::Ones(1, 2);
  EXPECT_NEAR(forward<double>(b, unit_weights(b), x2, 1)[0], 0.6171245084784929, 1e-15);
}

TEST(ForwardTest, BatchColumnsAreIndependent) {
  const Architecture a = tiny_arch(5);
  Rng rng(2);
  const Eigen::VectorXd p = random_vector(parameter_count(a), rng, 1.0);
  const Eigen::MatrixXd x = random_matrix(a.input_dim, a.input_steps * 4, rng, 1.0);
  const Eigen::RowVectorXd batch = forward<double>(a, p, x, 4);
  for (Eigen::Index b = 0; b < 4; ++b) {
    Eigen::MatrixXd single(a.input_dim, a.input_steps);
    for (int t = 0; t < a.input_steps; ++t) single.col(t) = x.col(t * 4 + b);
    EXPECT_DOUBLE_EQ(forward<double>(a, p, single, 1)[0], batch[b]) << b;
  }
}

TEST(ForwardTest, ShapeMismatchThrows) {
  const Architecture a = tiny_arch();
  const Eigen::VectorXd p = Eigen::VectorXd::Zero(parameter_count(a));
  EXPECT_THROW(forward<double>(a, p, Eigen::MatrixXd::Zero(3, a.input_steps), 1), ShapeMismatch);
  EXPECT_THROW(forward<double>(a, p, Eigen::MatrixXd::Zero(2, a.input_steps * 2), 1),
               ShapeMismatch);
  EXPECT_THROW(
      forward<double>(a, Eigen::VectorXd(Eigen::VectorXd::Zero(5)), Eigen::MatrixXd::Zero(2, 4), 1),
      ShapeMismatch);
}

TEST(ForwardTest, FloatAndDoubleAgree) {
  const Architecture a = tiny_arch();
  Rng rng(8);
  const Eigen::VectorXd p = random_vector(parameter_count(a), rng, 0.5);
  const Eigen::MatrixXd x = random_matrix(a.input_dim, a.input_steps * 2, rng, 1.0);
  const Eigen::RowVectorXd pd = forward<double>(a, p, x, 2);
  const Eigen::RowVectorXf pf =
      forward<float>(a, Eigen::VectorXf(p.cast<float>()), Eigen::MatrixXf(x.cast<float>()), 2);
  for (Eigen::Index j = 0; j < 2; ++j) EXPECT_NEAR(pf[j], pd[j], 1e-5);
}

TEST(BackwardTest, MatchesFiniteDifferences) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const testing::GradCheck r = testing::gradient_check(tiny_arch(), seed);
    EXPECT_TRUE(r.output_in_ramp) << "seed " << seed;
    EXPECT_LT(r.max_rel_error, 1e-4) << "seed " << seed << " worst index " << r.worst_index;
  }
}

TEST(BackwardTest, BalancedZeroModelHasZeroOutputBiasGradient) {
  const Architecture a = tiny_arch();
  const Eigen::VectorXd p = Eigen::VectorXd::Zero(parameter_count(a));
  Rng rng(4);
  const Eigen::MatrixXd x = random_matrix(a.input_dim, a.input_steps * 2, rng, 1.0);
  Eigen::VectorXd g0, g1, g;
  Eigen::MatrixXd first(a.input_dim, a.input_steps), second(a.input_dim, a.input_steps);
  for (int t = 0; t < a.input_steps; ++t) {
    first.col(t) = x.col(2 * t);
    second.col(t) = x.col(2 * t + 1);
  }
  const auto r = backward<double>(a, p, x, {0, 1}, g);
  backward<double>(a, p, first, {0}, g0);
  backward<double>(a, p, second, {1}, g1);
  const Eigen::Index bias = parameter_layout(a).back().offset;
  EXPECT_EQ(r.probabilities[0], 0.5);
  EXPECT_EQ(r.probabilities[1], 0.5);
  EXPECT_DOUBLE_EQ(g0[bias], -g1[bias]);
  EXPECT_NE(g0[bias], 0.0);
  EXPECT_EQ(g[bias], 0.0);
}

TEST(BackwardTest, SaturatedOutputHasZeroGradient) {
  const Architecture a = tiny_arch();
  Eigen::VectorXd p = Eigen::VectorXd::Zero(parameter_count(a));
  p[parameter_layout(a).back().offset] = 10.0;  // z3 = 10, p pinned at 1
  Rng rng(5);
  const Eigen::MatrixXd x = random_matrix(a.input_dim, a.input_steps * 2, rng, 1.0);
  Eigen::VectorXd g;
  const auto r = backward<double>(a, p, x, {1, 0}, g);
  EXPECT_EQ(r.probabilities[0], 1.0);
  EXPECT_EQ(g.size(), parameter_count(a));
  EXPECT_EQ(g.cwiseAbs().maxCoeff(), 0.0);
}

}  // namespace
}  // namespace sylq
