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

#ifndef SYLQ_SCORING_H_
#define SYLQ_SCORING_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sylq/corpus.h"
#include "sylq/dataset.h"
#include "sylq/model.h"

namespace sylq {

// Probability at or above this threshold predicts Set 1 (class 1); ties
// go to Set 1.
inline constexpr double kDecisionThreshold = 0.5;

inline int predicted_class(double p) { return p >= kDecisionThreshold ? 1 : 0; }

enum class Aggregation {
  kSyllableMean,  // session score = unweighted mean of syllable scores
  kFragmentMean,  // session score = mean over all fragments
};

struct SyllableScore {
  std::string syllable_id;
  std::vector<double> fragment_scores;
  double score = 0;  // mean of fragment_scores
  std::optional<int> expert_mark;

  bool operator==(const SyllableScore&) const = default;
};

struct ScoreReport {
  std::string patient_id;
  int session_index = 0;
  Aggregation aggregation = Aggregation::kSyllableMean;
  std::vector<SyllableScore> syllables;
  // Syllables of the session that yielded no fragment.
  std::vector<std::string> missing_syllables;
  double session_score = 0;
  std::size_t n_fragments = 0;

  bool operator==(const ScoreReport&) const = default;
};

struct SyllableFragments {
  std::string syllable_id;
  std::vector<const Fragment*> fragments;
  std::optional<int> expert_mark;
};

struct SyllableProbabilities {
  std::string syllable_id;
  std::vector<double> probabilities;
  std::optional<int> expert_mark;
};

// Aggregates already-computed fragment probabilities. Throws EmptySession
// when no syllable has a fragment.
ScoreReport aggregate_session(const std::string& patient_id, int session_index,
                              const std::vector<SyllableProbabilities>& syllables,
                              Aggregation aggregation = Aggregation::kSyllableMean);

ScoreReport score_session(const Model& model, const std::string& patient_id, int session_index,
                          const std::vector<SyllableFragments>& syllables,
                          Aggregation aggregation = Aggregation::kSyllableMean);

// Groups a corpus by (patient, session) and scores every group. Sessions
// without any fragment are returned in `missing` rather than scored.
struct SessionScores {
  std::vector<ScoreReport> sessions;
  std::vector<std::pair<std::string, int>> missing;
};
SessionScores score_corpus(const Model& model, const Manifest& manifest, const Corpus& corpus,
                           Aggregation aggregation = Aggregation::kSyllableMean);

struct EvalReport {
  std::string cohort;
  std::string split = "test";
  double accuracy = 0;
  // Accuracy restricted to true class 0 / class 1; empty when the split
  // holds no item of that class.
  std::optional<double> class0_accuracy;
  std::optional<double> class1_accuracy;
  std::size_t n_correct = 0;
  std::size_t n_evaluated = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;

  bool operator==(const EvalReport&) const = default;
};

enum class SplitPart { kTrain, kTest };

// Accuracy of predicted_class() over one side of the split. Throws
// EmptySplit when that side is empty.
EvalReport evaluate(const Model& model, const std::vector<Fragment>& fragments,
                    const std::vector<int>& labels, const SplitAssignment& split,
                    SplitPart part = SplitPart::kTest);

// Same, from precomputed probabilities indexed like labels.
EvalReport evaluate_probabilities(std::span<const double> probabilities,
                                  const std::vector<int>& labels, const SplitAssignment& split,
                                  SplitPart part = SplitPart::kTest);

// Sample Pearson correlation. With a binary ys this is the point-biserial
// coefficient. Throws DegenerateInput for unequal lengths, fewer than three
// points, or a constant sequence.
double pearson(std::span<const double> xs, std::span<const double> ys);

// Pearson correlation of average ranks (ties share their mean rank).
double spearman(std::span<const double> xs, std::span<const double> ys);

}  // namespace sylq

#endif  // SYLQ_SCORING_H_
