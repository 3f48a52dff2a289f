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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "sylq/error.h"

namespace sylq {

ScoreReport aggregate_session(const std::string& patient_id, int session_index,
                              const std::vector<SyllableProbabilities>& syllables,
                              Aggregation aggregation) {
  ScoreReport r;
  r.patient_id = patient_id;
  r.session_index = session_index;
  r.aggregation = aggregation;
  double fragment_sum = 0;
  double syllable_sum = 0;
  for (const auto& s : syllables) {
    if (s.probabilities.empty()) {
      r.missing_syllables.push_back(s.syllable_id);
      continue;
    }
    SyllableScore ss;
    ss.syllable_id = s.syllable_id;
    ss.fragment_scores = s.probabilities;
    ss.expert_mark = s.expert_mark;
    const double sum = std::accumulate(s.probabilities.begin(), s.probabilities.end(), 0.0);
    ss.score = sum / static_cast<double>(s.probabilities.size());
    fragment_sum += sum;
    syllable_sum += ss.score;
    r.n_fragments += s.probabilities.size();
    r.syllables.push_back(std::move(ss));
  }
  if (r.syllables.empty()) {
    throw EmptySession("session " + std::to_string(session_index) + " of patient " + patient_id +
                       " has no scorable fragment");
  }
  r.session_score = aggregation == Aggregation::kSyllableMean
                        ? syllable_sum / static_cast<double>(r.syllables.size())
                        : fragment_sum / static_cast<double>(r.n_fragments);
  return r;
}

ScoreReport score_session(const Model& model, const std::string& patient_id, int session_index,
                          const std::vector<SyllableFragments>& syllables,
                          Aggregation aggregation) {
  std::vector<SyllableProbabilities> probs;
  probs.reserve(syllables.size());
  for (const auto& s : syllables) {
    SyllableProbabilities sp{s.syllable_id, {}, s.expert_mark};
    if (!s.fragments.empty()) {
      const Eigen::RowVectorXd p = model.predict(s.fragments);
      sp.probabilities.assign(p.data(), p.data() + p.size());
    }
    probs.push_back(std::move(sp));
  }
  return aggregate_session(patient_id, session_index, probs, aggregation);
}

SessionScores score_corpus(const Model& model, const Manifest& manifest, const Corpus& corpus,
                           Aggregation aggregation) {
  // (patient, session) -> syllable -> fragments
  std::map<std::pair<std::string, int>, std::map<std::string, SyllableFragments>> groups;
  for (const auto& tag : corpus.recordings) {
    groups[{tag.patient_id, tag.session_index}][tag.syllable_id].syllable_id = tag.syllable_id;
  }
  for (const auto& tag : corpus.empty_recordings) {
    groups[{tag.patient_id, tag.session_index}][tag.syllable_id].syllable_id = tag.syllable_id;
  }
  for (const auto& f : corpus.fragments) {
    groups[{f.source.patient_id, f.source.session_index}][f.source.syllable_id].fragments.push_back(
        &f);
  }
  for (const auto& r : manifest.records) {
    auto g = groups.find({r.patient_id, r.session_index});
    if (g == groups.end()) continue;
    auto s = g->second.find(r.syllable_id);
    if (s != g->second.end()) s->second.expert_mark = r.expert_mark;
  }

  SessionScores out;
  for (const auto& [key, syllables] : groups) {
    std::vector<SyllableFragments> list;
    for (const auto& [_, s] : syllables) list.push_back(s);
    try {
      out.sessions.push_back(score_session(model, key.first, key.second, list, aggregation));
    } catch (const EmptySession&) {
      out.missing.push_back(key);
    }
  }
  return out;
}

EvalReport evaluate_probabilities(std::span<const double> probabilities,
                                  const std::vector<int>& labels, const SplitAssignment& split,
                                  SplitPart part) {
  const auto& idx = part == SplitPart::kTest ? split.test_indices : split.train_indices;
  if (idx.empty()) {
    throw EmptySplit(std::string("the ") + (part == SplitPart::kTest ? "test" : "train") +
                     " split is empty");
  }
  EvalReport r;
  r.split = part == SplitPart::kTest ? "test" : "train";
  r.n_train = split.train_indices.size();
  r.n_test = split.test_indices.size();
  std::size_t per_class_total[2] = {0, 0};
  std::size_t per_class_correct[2] = {0, 0};
  for (std::size_t i : idx) {
    const int y = labels.at(i);
    if (y != 0 && y != 1) throw DegenerateInput("evaluate: unlabeled fragment");
    const bool ok = predicted_class(probabilities[i]) == y;
    ++per_class_total[y];
    if (ok) {
      ++per_class_correct[y];
      ++r.n_correct;
    }
  }
  r.n_evaluated = idx.size();
  r.accuracy = static_cast<double>(r.n_correct) / static_cast<double>(r.n_evaluated);
  if (per_class_total[0] > 0) {
    r.class0_accuracy =
        static_cast<double>(per_class_correct[0]) / static_cast<double>(per_class_total[0]);
  }
  if (per_class_total[1] > 0) {
    r.class1_accuracy =
        static_cast<double>(per_class_correct[1]) / static_cast<double>(per_class_total[1]);
  }
  return r;
}

EvalReport evaluate(const Model& model, const std::vector<Fragment>& fragments,
                    const std::vector<int>& labels, const SplitAssignment& split, SplitPart part) {
  const auto& idx = part == SplitPart::kTest ? split.test_indices : split.train_indices;
  std::vector<double> probs(fragments.size(), 0.0);
  std::vector<const Fragment*> ptrs;
  for (std::size_t i : idx) ptrs.push_back(&fragments.at(i));
  if (!ptrs.empty()) {
    const Eigen::RowVectorXd p = model.predict(ptrs);
    for (std::size_t k = 0; k < idx.size(); ++k) probs[idx[k]] = p(static_cast<Eigen::Index>(k));
  }
  EvalReport r = evaluate_probabilities(probs, labels, split, part);
  r.cohort = model.meta.cohort;
  return r;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw DegenerateInput("pearson: sequences differ in length");
  if (xs.size() < 3) throw DegenerateInput("pearson: need at least 3 points");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw DegenerateInput("pearson: first sequence is constant");
  if (syy == 0.0) throw DegenerateInput("pearson: second sequence is constant");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw DegenerateInput("spearman: sequences differ in length");
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  return pearson(rx, ry);
}

}  // namespace sylq
