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

#include "sylq/report.h"

#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "sylq/error.h"

namespace sylq {
namespace {

using json = nlohmann::json;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed(double v, int digits = 4) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
json opt(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

template <typename T>
std::optional<T> opt_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<T>();
}

std::string csv_opt(const std::optional<double>& v) { return v ? num(*v) : ""; }
std::string csv_opt(const std::optional<int>& v) { return v ? std::to_string(*v) : ""; }

std::string grid_label(const std::string& cohort) {
  if (cohort.starts_with("patient:")) return "Individual";
  if (cohort == "sex:m") return "Men";
  if (cohort == "sex:f") return "Women";
  return "All";
}

std::string aggregation_name(Aggregation a) {
  return a == Aggregation::kSyllableMean ? "syllable_mean" : "fragment_mean";
}

}  // namespace

Format parse_format(std::string_view text) {
  if (text == "text") return Format::kText;
  if (text == "csv") return Format::kCsv;
  if (text == "json") return Format::kJson;
  throw ParseError("unknown format '" + std::string(text) + "' (text, csv or json)");
}

std::vector<GridRow> cohort_grid(const EvalDocument& doc) {
  std::vector<GridRow> rows = {
      {"Individual", {}, {}, 0}, {"Men", {}, {}, 0}, {"Women", {}, {}, 0}, {"All", {}, {}, 0}};
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> acc;
  std::map<std::string, std::set<std::string>> models;
  for (const auto& r : doc.reports) {
    const std::string label = grid_label(r.cohort);
    (r.split == "train" ? acc[label].first : acc[label].second).push_back(r.accuracy);
    models[label].insert(r.cohort);
  }
  auto mean = [](const std::vector<double>& v) -> std::optional<double> {
    if (v.empty()) return std::nullopt;
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  for (auto& row : rows) {
    row.train = mean(acc[row.label].first);
    row.test = mean(acc[row.label].second);
    row.n_models = static_cast<int>(models[row.label].size());
  }
  return rows;
}

json to_json(const TrainTrace& trace) {
  json rows = json::array();
  for (std::size_t i = 0; i < trace.epochs.size(); ++i) {
    const auto& e = trace.epochs[i];
    rows.push_back({{"epoch", i + 1},
                    {"train_loss", e.train_loss},
                    {"train_accuracy", e.train_accuracy},
                    {"test_loss", e.test_loss},
                    {"test_accuracy", e.test_accuracy}});
  }
  return {{"kind", "train_trace"}, {"epochs", rows}};
}

TrainTrace trace_from_json(const json& j) {
  TrainTrace t;
  for (const auto& e : j.at("epochs")) {
    t.epochs.push_back({e.at("train_loss").get<double>(), e.at("train_accuracy").get<double>(),
                        e.at("test_loss").get<double>(), e.at("test_accuracy").get<double>()});
  }
  return t;
}

json to_json(const EvalDocument& doc) {
  json reports = json::array();
  for (const auto& r : doc.reports) {
    reports.push_back({{"cohort", r.cohort},
                       {"split", r.split},
                       {"accuracy", r.accuracy},
                       {"class0_accuracy", opt(r.class0_accuracy)},
                       {"class1_accuracy", opt(r.class1_accuracy)},
                       {"n_correct", r.n_correct},
                       {"n_evaluated", r.n_evaluated},
                       {"n_train", r.n_train},
                       {"n_test", r.n_test}});
  }
  return {{"kind", "eval"}, {"reports", reports}};
}

EvalDocument eval_from_json(const json& j) {
  EvalDocument doc;
  for (const auto& e : j.at("reports")) {
    EvalReport r;
    r.cohort = e.at("cohort").get<std::string>();
    r.split = e.at("split").get<std::string>();
    r.accuracy = e.at("accuracy").get<double>();
    r.class0_accuracy = opt_from<double>(e.at("class0_accuracy"));
    r.class1_accuracy = opt_from<double>(e.at("class1_accuracy"));
    r.n_correct = e.at("n_correct").get<std::size_t>();
    r.n_evaluated = e.at("n_evaluated").get<std::size_t>();
    r.n_train = e.at("n_train").get<std::size_t>();
    r.n_test = e.at("n_test").get<std::size_t>();
    doc.reports.push_back(std::move(r));
  }
  return doc;
}

json to_json(const ScoreDocument& doc) {
  json sessions = json::array();
  for (const auto& s : doc.sessions) {
    json syllables = json::array();
    for (const auto& y : s.syllables) {
      syllables.push_back({{"syllable_id", y.syllable_id},
                           {"fragment_scores", y.fragment_scores},
                           {"score", y.score},
                           {"expert_mark", opt(y.expert_mark)}});
    }
    sessions.push_back({{"patient_id", s.patient_id},
                        {"session_index", s.session_index},
                        {"aggregation", aggregation_name(s.aggregation)},
                        {"session_score", s.session_score},
                        {"n_fragments", s.n_fragments},
                        {"n_syllables", s.syllables.size()},
                        {"missing_syllables", s.missing_syllables},
                        {"syllables", syllables}});
  }
  json missing = json::array();
  for (const auto& [p, s] : doc.missing_sessions) {
    missing.push_back({{"patient_id", p}, {"session_index", s}});
  }
  json out = {{"kind", "score"}, {"sessions", sessions}, {"missing_sessions", missing}};
  if (doc.expert) {
    out["expert_correlation"] = {{"n", doc.expert->n},
                                 {"coefficient", opt(doc.expert->coefficient)},
                                 {"error", doc.expert->error}};
  } else {
    out["expert_correlation"] = nullptr;
  }
  return out;
}

ScoreDocument score_from_json(const json& j) {
  ScoreDocument doc;
  for (const auto& s : j.at("sessions")) {
    ScoreReport r;
    r.patient_id = s.at("patient_id").get<std::string>();
    r.session_index = s.at("session_index").get<int>();
    r.aggregation = s.at("aggregation").get<std::string>() == "fragment_mean"
                        ? Aggregation::kFragmentMean
                        : Aggregation::kSyllableMean;
    r.session_score = s.at("session_score").get<double>();
    r.n_fragments = s.at("n_fragments").get<std::size_t>();
    r.missing_syllables = s.at("missing_syllables").get<std::vector<std::string>>();
    for (const auto& y : s.at("syllables")) {
      SyllableScore ss;
      ss.syllable_id = y.at("syllable_id").get<std::string>();
      ss.fragment_scores = y.at("fragment_scores").get<std::vector<double>>();
      ss.score = y.at("score").get<double>();
      ss.expert_mark = opt_from<int>(y.at("expert_mark"));
      r.syllables.push_back(std::move(ss));
    }
    doc.sessions.push_back(std::move(r));
  }
  for (const auto& m : j.at("missing_sessions")) {
    doc.missing_sessions.emplace_back(m.at("patient_id").get<std::string>(),
                                      m.at("session_index").get<int>());
  }
  const json& e = j.at("expert_correlation");
  if (!e.is_null()) {
    doc.expert =
        ExpertCorrelation{e.at("n").get<std::size_t>(), opt_from<double>(e.at("coefficient")),
                          e.at("error").get<std::string>()};
  }
  return doc;
}

std::string render(const TrainTrace& trace, Format format) {
  if (format == Format::kJson) return to_json(trace).dump(2) + "\n";
  std::ostringstream out;
  if (format == Format::kCsv) {
    out << "epoch,train_loss,train_accuracy,test_loss,test_accuracy\n";
    for (std::size_t i = 0; i < trace.epochs.size(); ++i) {
      const auto& e = trace.epochs[i];
      out << i + 1 << ',' << num(e.train_loss) << ',' << num(e.train_accuracy) << ','
          << num(e.test_loss) << ',' << num(e.test_accuracy) << '\n';
    }
    return out.str();
  }
  out << "epoch  train_loss  train_acc  test_loss  test_acc\n";
  for (std::size_t i = 0; i < trace.epochs.size(); ++i) {
    const auto& e = trace.epochs[i];
    char line[128];
    std::snprintf(line, sizeof line, "%5zu  %10.6f  %9.4f  %9.6f  %8.4f\n", i + 1, e.train_loss,
                  e.train_accuracy, e.test_loss, e.test_accuracy);
    out << line;
  }
  return out.str();
}

std::string render(const EvalDocument& doc, Format format) {
  if (format == Format::kJson) return to_json(doc).dump(2) + "\n";
  std::ostringstream out;
  if (format == Format::kCsv) {
    out << "cohort,split,accuracy,class0_accuracy,class1_accuracy,n_correct,n_evaluated,"
           "n_train,n_test\n";
    for (const auto& r : doc.reports) {
      out << r.cohort << ',' << r.split << ',' << num(r.accuracy) << ','
          << csv_opt(r.class0_accuracy) << ',' << csv_opt(r.class1_accuracy) << ',' << r.n_correct
          << ',' << r.n_evaluated << ',' << r.n_train << ',' << r.n_test << '\n';
    }
    return out.str();
  }
  for (const auto& r : doc.reports) {
    out << r.cohort << " " << r.split << ": accuracy " << fixed(r.accuracy) << " (" << r.n_correct
        << "/" << r.n_evaluated << ")";
    if (r.class0_accuracy) out << ", class 0 " << fixed(*r.class0_accuracy);
    if (r.class1_accuracy) out << ", class 1 " << fixed(*r.class1_accuracy);
    out << "\n";
  }
  out << "\nCohort        Train     Test\n";
  for (const auto& row : cohort_grid(doc)) {
    char line[96];
    std::snprintf(line, sizeof line, "%-12s  %-8s  %-8s\n", row.label.c_str(),
                  row.train ? fixed(*row.train, 2).c_str() : "-",
                  row.test ? fixed(*row.test, 2).c_str() : "-");
    out << line;
  }
  return out.str();
}

std::string render(const ScoreDocument& doc, Format format) {
  if (format == Format::kJson) return to_json(doc).dump(2) + "\n";
  std::ostringstream out;
  if (format == Format::kCsv) {
    out << "level,patient_id,session_index,syllable_id,n_fragments,score,expert_mark\n";
    for (const auto& s : doc.sessions) {
      for (const auto& y : s.syllables) {
        out << "syllable," << s.patient_id << ',' << s.session_index << ',' << y.syllable_id << ','
            << y.fragment_scores.size() << ',' << num(y.score) << ',' << csv_opt(y.expert_mark)
            << '\n';
      }
      for (const auto& m : s.missing_syllables) {
        out << "missing_syllable," << s.patient_id << ',' << s.session_index << ',' << m
            << ",0,,\n";
      }
      out << "session," << s.patient_id << ',' << s.session_index << ",," << s.n_fragments << ','
          << num(s.session_score) << ",\n";
    }
    for (const auto& [p, idx] : doc.missing_sessions) {
      out << "missing_session," << p << ',' << idx << ",,0,,\n";
    }
    return out.str();
  }
  out << "patient     session  syllables  fragments  score\n";
  for (const auto& s : doc.sessions) {
    char line[160];
    std::snprintf(line, sizeof line, "%-10s  %7d  %9zu  %9zu  %.4f\n", s.patient_id.c_str(),
                  s.session_index, s.syllables.size(), s.n_fragments, s.session_score);
    out << line;
    if (!s.missing_syllables.empty()) {
      out << "            missing syllables:";
      for (const auto& m : s.missing_syllables) out << ' ' << m;
      out << '\n';
    }
  }
  for (const auto& [p, idx] : doc.missing_sessions) {
    out << p << " session " << idx << ": missing (no fragment survived gating)\n";
  }
  if (doc.expert) {
    if (doc.expert->coefficient) {
      out << "expert correlation (n=" << doc.expert->n << "): " << fixed(*doc.expert->coefficient)
          << '\n';
    } else {
      out << "expert correlation unavailable: " << doc.expert->error << '\n';
    }
  }
  return out.str();
}

std::string render_document(const json& doc, Format format) {
  const std::string kind = doc.value("kind", "");
  if (kind == "train_trace") return render(trace_from_json(doc), format);
  if (kind == "eval") return render(eval_from_json(doc), format);
  if (kind == "score") return render(score_from_json(doc), format);
  throw ParseError("unknown report kind '" + kind + "'");
}

}  // namespace sylq
