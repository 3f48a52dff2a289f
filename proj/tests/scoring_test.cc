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

#include "sylq/scoring.h"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "sylq/error.h"
#include "sylq/random.h"

namespace sylq {
namespace {

// Closed-form sample correlation, written out independently.
double closed_form(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

TEST(AggregateTest, SyllableMeanNotFragmentMean) {
  const std::vector<SyllableProbabilities> syl = {{"a", {1.0}, {}}, {"b", {0.0, 0.0}, {}}};
  const ScoreReport r = aggregate_session("P", 3, syl);
  ASSERT_EQ(r.syllables.size(), 2u);
  EXPECT_EQ(r.syllables[0].score, 1.0);
  EXPECT_EQ(r.syllables[1].score, 0.0);
  EXPECT_EQ(r.session_score, 0.5);
  EXPECT_EQ(r.n_fragments, 3u);
  const ScoreReport f = aggregate_session("P", 3, syl, Aggregation::kFragmentMean);
  EXPECT_DOUBLE_EQ(f.session_score, 1.0 / 3);
}

TEST(AggregateTest, EmptySyllablesAreListedAsMissing) {
  const std::vector<SyllableProbabilities> syl = {{"a", {0.6}, 1}, {"b", {}, {}}};
  const ScoreReport r = aggregate_session("P", 4, syl);
  EXPECT_EQ(r.missing_syllables, std::vector<std::string>{"b"});
  ASSERT_EQ(r.syllables.size(), 1u);
  EXPECT_EQ(r.syllables[0].expert_mark, 1);
  EXPECT_EQ(r.session_score, 0.6);
  EXPECT_THROW(aggregate_session("P", 4, {{"b", {}, {}}}), EmptySession);
  EXPECT_THROW(aggregate_session("P", 4, {}), EmptySession);
}

TEST(ScoreSessionTest, ZeroModelScoresOneHalf) {
  Architecture a;
  a.input_steps = 8;
  a.input_dim = 3;
  a.lstm1_units = a.lstm2_units = a.dense1_units = a.dense2_units = 2;
  const Model m = Model::zeros(a);
  std::vector<Fragment> frags(5);
  Rng rng(1);
  for (auto& f : frags) f.values = Eigen::MatrixXd::Random(8, 3);
  std::vector<SyllableFragments> syl = {{"a", {&frags[0], &frags[1]}, {}},
                                        {"b", {&frags[2], &frags[3], &frags[4]}, {}}};
  EXPECT_EQ(score_session(m, "P", 3, syl).session_score, 0.5);
}

TEST(ThresholdTest, TiesGoToSetOne) {
  EXPECT_EQ(predicted_class(0.5), 1);
  EXPECT_EQ(predicted_class(0.4999999), 0);
  EXPECT_EQ(predicted_class(1.0), 1);
}

SplitAssignment all_test(std::size_t n) {
  SplitAssignment s;
  for (std::size_t i = 0; i < n; ++i) s.test_indices.push_back(i);
  return s;
}

TEST(EvaluateTest, PerfectPredictor) {
  const std::vector<int> labels = {1, 0, 1, 0, 1, 0, 1, 0, 1, 0};
  std::vector<double> p;
  for (int y : labels) p.push_back(y == 1 ? 0.9 : 0.1);
  const EvalReport r = evaluate_probabilities(p, labels, all_test(10));
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_EQ(r.n_correct, 10u);
  EXPECT_EQ(r.class0_accuracy, 1.0);
}

TEST(EvaluateTest, ConstantHalfPredictsSetOne) {
  const std::vector<int> labels = {1, 0, 1, 0, 1, 0, 1, 0};
  const std::vector<double> p(8, 0.5);
  const EvalReport r = evaluate_probabilities(p, labels, all_test(8));
  EXPECT_EQ(r.accuracy, 0.5);
  EXPECT_EQ(r.class1_accuracy, 1.0);
  EXPECT_EQ(r.class0_accuracy, 0.0);
}

TEST(EvaluateTest, TrainPartAndEmptySplit) {
  const std::vector<int> labels = {1, 0, 1, 0, 1};
  const std::vector<double> p = {0.9, 0.9, 0.9, 0.1, 0.1};
  SplitAssignment s;
  s.train_indices = {0, 1, 2};
  s.test_indices = {3, 4};
  const EvalReport tr = evaluate_probabilities(p, labels, s, SplitPart::kTrain);
  EXPECT_EQ(tr.split, "train");
  EXPECT_DOUBLE_EQ(tr.accuracy, 2.0 / 3);
  EXPECT_EQ(tr.n_train, 3u);
  EXPECT_EQ(tr.n_test, 2u);
  s.test_indices.clear();
  EXPECT_THROW(evaluate_probabilities(p, labels, s), EmptySplit);
}

TEST(PearsonTest, Examples) {
  const std::vector<double> a = {1, 2, 3}, b = {3, 2, 1};
  EXPECT_DOUBLE_EQ(pearson(a, a), 1.0);
  EXPECT_DOUBLE_EQ(pearson(a, b), -1.0);
  const std::vector<double> x = {0.9, 0.8, 0.2, 0.1}, y = {1, 1, 0, 0};
  // 0.7 / sqrt(0.5 * 1)
  EXPECT_NEAR(pearson(x, y), 0.98994949366116658, 1e-14);
  EXPECT_NEAR(pearson(x, y), closed_form(x, y), 1e-12);
}

TEST(PearsonTest, DegenerateInputs) {
  const std::vector<double> two = {1, 2}, three = {1, 2, 3}, flat = {4, 4, 4};
  EXPECT_THROW(pearson(two, two), DegenerateInput);
  EXPECT_THROW(pearson(three, two), DegenerateInput);
  EXPECT_THROW(pearson(three, flat), DegenerateInput);
}

TEST(PearsonTest, RandomCasesMatchClosedForm) {
  Rng rng(2024);
  for (int c = 0; c < 100; ++c) {
    const auto n = 3 + static_cast<std::size_t>(rng.below(10));
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.normal();
      y[i] = 0.5 * x[i] + rng.normal();
    }
    const double r = pearson(x, y);
    EXPECT_NEAR(r, closed_form(x, y), 1e-12);
    EXPECT_LE(std::abs(r), 1.0);
  }
}

TEST(SpearmanTest, RanksWithTies) {
  const std::vector<double> x = {0.9, 0.7, 0.5, 0.3, 0.1};
  const std::vector<double> q = {0.1, 0.2, 0.4, 0.8, 0.95};
  EXPECT_DOUBLE_EQ(spearman(x, q), -1.0);
  const std::vector<double> a = {1, 2, 2, 3}, b = {1, 2, 3, 4};
  // Ranks of a: 1, 2.5, 2.5, 4.
  const std::vector<double> ra = {1, 2.5, 2.5, 4};
  EXPECT_NEAR(spearman(a, b), closed_form(ra, b), 1e-12);
}

}  // namespace
}  // namespace sylq
