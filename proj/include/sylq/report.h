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

#ifndef SYLQ_REPORT_H_
#define SYLQ_REPORT_H_

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sylq/model.h"
#include "sylq/scoring.h"

namespace sylq {

enum class Format { kText, kCsv, kJson };

Format parse_format(std::string_view text);

// Correlation between per-syllable scores and expert marks.
struct ExpertCorrelation {
  std::size_t n = 0;
  std::optional<double> coefficient;
  // Why the coefficient is absent (e.g. constant marks).
  std::string error;

  bool operator==(const ExpertCorrelation&) const = default;
};

struct ScoreDocument {
  std::vector<ScoreReport> sessions;
  std::vector<std::pair<std::string, int>> missing_sessions;
  std::optional<ExpertCorrelation> expert;

  bool operator==(const ScoreDocument&) const = default;
};

// Train and test accuracy per trained model.
struct EvalDocument {
  std::vector<EvalReport> reports;

  bool operator==(const EvalDocument&) const = default;
};

// Rows Individual, Men, Women, All; cells average the matching models.
struct GridRow {
  std::string label;
  std::optional<double> train;
  std::optional<double> test;
  int n_models = 0;
};
std::vector<GridRow> cohort_grid(const EvalDocument& doc);

nlohmann::json to_json(const TrainTrace& trace);
nlohmann::json to_json(const EvalDocument& doc);
nlohmann::json to_json(const ScoreDocument& doc);

TrainTrace trace_from_json(const nlohmann::json& j);
EvalDocument eval_from_json(const nlohmann::json& j);
ScoreDocument score_from_json(const nlohmann::json& j);

std::string render(const TrainTrace& trace, Format format);
std::string render(const EvalDocument& doc, Format format);
std::string render(const ScoreDocument& doc, Format format);

// Re-renders a json document produced by one of the renderers above.
std::string render_document(const nlohmann::json& doc, Format format);

}  // namespace sylq

#endif  // SYLQ_REPORT_H_
