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

#include "sylq/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "sylq/error.h"
#include "sylq/random.h"

namespace sylq {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

bool parse_int(std::string_view s, int& out) {
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, out);
  return res.ec == std::errc() && res.ptr == end;
}

std::string line_ref(std::size_t line_no) {
  return "manifest line " + std::to_string(line_no) + ": ";
}

std::optional<int> parse_binary(std::string_view field, std::size_t line_no, const char* what) {
  field = trim(field);
  if (field.empty()) return std::nullopt;
  if (field == "0") return 0;
  if (field == "1") return 1;
  throw ParseError(line_ref(line_no) + what + " must be 0 or 1, got '" + std::string(field) + "'");
}

std::string triple(const SyllableRecord& r) {
  return "(" + r.patient_id + ", " + std::to_string(r.session_index) + ", \"" + r.syllable_id +
         "\")";
}

std::string triple(const std::string& p, int s, const std::string& syl) {
  return "(" + p + ", " + std::to_string(s) + ", \"" + syl + "\")";
}

std::vector<std::size_t> choose_train(Rng& rng, std::vector<std::size_t> items, double ratio) {
  const auto n_train =
      static_cast<std::size_t>(std::llround(ratio * static_cast<double>(items.size())));
  rng.shuffle(items);
  items.resize(n_train);
  return items;
}

SplitAssignment finish_split(std::vector<std::size_t> train, std::size_t n, std::uint64_t seed) {
  std::sort(train.begin(), train.end());
  SplitAssignment s;
  s.seed = seed;
  s.train_indices = train;
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (j < train.size() && train[j] == i) {
      ++j;
    } else {
      s.test_indices.push_back(i);
    }
  }
  return s;
}

}  // namespace

std::string_view to_string(SyllableSet set) {
  switch (set) {
    case SyllableSet::kGost100:
      return "Gost100";
    case SyllableSet::kProblem90:
      return "Problem90";
    case SyllableSet::kOther:
      return "Other";
  }
  return "Other";
}

SyllableSet parse_syllable_set(std::string_view text) {
  if (text == "Gost100") return SyllableSet::kGost100;
  if (text == "Problem90") return SyllableSet::kProblem90;
  if (text == "Other") return SyllableSet::kOther;
  throw ParseError("unknown syllable set '" + std::string(text) + "'");
}

std::optional<int> implied_class_label(int session_index) {
  if (session_index == 1) return 1;
  if (session_index == 2) return 0;
  return std::nullopt;
}

std::filesystem::path Manifest::resolve(const SyllableRecord& r) const {
  std::filesystem::path p(r.audio_path);
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

std::vector<std::string> Manifest::patients() const {
  std::vector<std::string> ids;
  std::set<std::string> seen;
  for (const auto& r : records) {
    if (seen.insert(r.patient_id).second) ids.push_back(r.patient_id);
  }
  return ids;
}

Manifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir,
                        const LoadOptions& opts, LoadReport* report) {
  Manifest m;
  m.base_dir = base_dir;
  bool have_rate = false;
  std::size_t line_no = 0;
  for (std::string_view raw : split(text, '\n')) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line.starts_with("#sample_rate_hz=")) {
        if (have_rate) throw ParseError(line_ref(line_no) + "duplicate sample rate header");
        int rate = 0;
        if (!parse_int(line.substr(16), rate) || rate <= 0) {
          throw ParseError(line_ref(line_no) + "sample rate must be a positive integer");
        }
        m.sample_rate_hz = rate;
        have_rate = true;
      } else if (line.starts_with("#patient ")) {
        const auto parts = split(trim(line.substr(9)), ' ');
        if (parts.size() != 2 || !parts[1].starts_with("sex=")) {
          throw ParseError(line_ref(line_no) + "expected '#patient <id> sex=<m|f>'");
        }
        const std::string_view sex = parts[1].substr(4);
        if (sex != "m" && sex != "f") {
          throw ParseError(line_ref(line_no) + "sex must be m or f");
        }
        m.patient_sex[std::string(parts[0])] = sex == "m" ? Sex::kMale : Sex::kFemale;
      }
      // Any other '#' line is a comment.
      continue;
    }
    if (!have_rate) {
      throw ParseError(line_ref(line_no) + "record before '#sample_rate_hz=' header");
    }
    const auto fields = split(line, ',');
    if (fields.size() < 5 || fields.size() > 7) {
      throw ParseError(line_ref(line_no) + "expected 5 to 7 comma-separated fields, got " +
                       std::to_string(fields.size()));
    }
    SyllableRecord r;
    r.patient_id = std::string(trim(fields[0]));
    if (!parse_int(trim(fields[1]), r.session_index) || r.session_index < 1) {
      throw ParseError(line_ref(line_no) + "session_index must be an integer >= 1");
    }
    r.syllable_id = std::string(trim(fields[2]));
    try {
      r.syllable_set = parse_syllable_set(trim(fields[3]));
    } catch (const ParseError& e) {
      throw ParseError(line_ref(line_no) + e.what());
    }
    r.audio_path = std::string(trim(fields[4]));
    if (r.patient_id.empty() || r.syllable_id.empty() || r.audio_path.empty()) {
      throw ParseError(line_ref(line_no) + "empty patient, syllable or path field");
    }
    if (fields.size() > 5) r.class_label = parse_binary(fields[5], line_no, "class_label");
    if (fields.size() > 6) r.expert_mark = parse_binary(fields[6], line_no, "expert_mark");
    m.records.push_back(std::move(r));
  }
  if (!have_rate) throw ParseError("manifest is missing the '#sample_rate_hz=' header");
  LoadReport local;
  validate_manifest(m, opts, &local);
  if (!local.dropped_patients.empty()) {
    const std::set<std::string> dropped(local.dropped_patients.begin(),
                                        local.dropped_patients.end());
    std::erase_if(m.records,
                  [&](const SyllableRecord& r) { return dropped.count(r.patient_id) > 0; });
  }
  if (report) {
    report->warnings.insert(report->warnings.end(), local.warnings.begin(), local.warnings.end());
    report->dropped_patients.insert(report->dropped_patients.end(), local.dropped_patients.begin(),
                                    local.dropped_patients.end());
  }
  return m;
}

void validate_manifest(const Manifest& m, const LoadOptions& opts, LoadReport* report) {
  if (m.sample_rate_hz <= 0) throw ValidationError("sample rate must be positive");
  std::set<std::tuple<std::string, int, std::string>> seen;
  for (const auto& r : m.records) {
    if (r.session_index < 1) {
      throw ValidationError("record " + triple(r) + ": session_index must be >= 1");
    }
    if (r.class_label != implied_class_label(r.session_index)) {
      throw ValidationError("record " + triple(r) + ": class_label must be " +
                            (r.session_index == 1   ? std::string("1")
                             : r.session_index == 2 ? std::string("0")
                                                    : std::string("absent")) +
                            " for session " + std::to_string(r.session_index));
    }
    if (!seen.insert({r.patient_id, r.session_index, r.syllable_id}).second) {
      throw ValidationError("duplicate record " + triple(r));
    }
  }

  if (opts.check_files) {
    for (const auto& r : m.records) {
      const auto path = m.resolve(r);
      std::ifstream f(path, std::ios::binary);
      if (!f) {
        throw ValidationError("record " + triple(r) + ": audio file " + path.string() +
                              " is missing or unreadable");
      }
    }
  }

  // Session-1/session-2 pairing per patient.
  std::map<std::string, std::set<std::string>> pre, post;
  for (const auto& r : m.records) {
    if (r.session_index == 1) pre[r.patient_id].insert(r.syllable_id);
    if (r.session_index == 2) post[r.patient_id].insert(r.syllable_id);
  }
  std::set<std::string> with_training;
  for (const auto& [p, _] : pre) with_training.insert(p);
  for (const auto& [p, _] : post) with_training.insert(p);
  for (const auto& p : with_training) {
    const auto& a = pre[p];
    const auto& b = post[p];
    std::set<std::string> all(a);
    all.insert(b.begin(), b.end());
    for (const auto& syl : all) {
      const int missing = !a.count(syl) ? 1 : !b.count(syl) ? 2 : 0;
      if (missing == 0) continue;
      const std::string msg = "missing record " + triple(p, missing, syl);
      if (!opts.drop_incomplete) throw ValidationError(msg);
      if (report) {
        report->warnings.push_back(msg + "; patient " + p + " dropped");
        report->dropped_patients.push_back(p);
      }
      break;
    }
  }
}

Manifest load_manifest(const std::filesystem::path& path, const LoadOptions& opts,
                       LoadReport* report) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str(), path.parent_path(), opts, report);
}

std::string format_manifest(const Manifest& m) {
  std::ostringstream out;
  out << "#sample_rate_hz=" << m.sample_rate_hz << '\n';
  for (const auto& [id, sex] : m.patient_sex) {
    out << "#patient " << id << " sex=" << (sex == Sex::kMale ? 'm' : 'f') << '\n';
  }
  for (const auto& r : m.records) {
    out << r.patient_id << ',' << r.session_index << ',' << r.syllable_id << ','
        << to_string(r.syllable_set) << ',' << r.audio_path;
    if (r.class_label || r.expert_mark) {
      out << ',';
      if (r.class_label) out << *r.class_label;
    }
    if (r.expert_mark) out << ',' << *r.expert_mark;
    out << '\n';
  }
  return out.str();
}

void save_manifest(const Manifest& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write manifest " + path.string());
  out << format_manifest(m);
  if (!out) throw IoError("write failed for " + path.string());
}

Cohort Cohort::parse(std::string_view text) {
  if (text == "all") return all();
  if (text == "sex:m") return of_sex(Sex::kMale);
  if (text == "sex:f") return of_sex(Sex::kFemale);
  if (text.starts_with("patient:") && text.size() > 8) {
    return individual(std::string(text.substr(8)));
  }
  throw ParseError("unknown cohort '" + std::string(text) +
                   "' (expected all, sex:m, sex:f or patient:<id>)");
}

std::string Cohort::to_string() const {
  switch (kind) {
    case Kind::kAll:
      return "all";
    case Kind::kSex:
      return sex == Sex::kMale ? "sex:m" : "sex:f";
    case Kind::kIndividual:
      return "patient:" + patient_id;
  }
  return "all";
}

Manifest filter_cohort(const Manifest& m, const Cohort& cohort) {
  if (cohort.kind == Cohort::Kind::kAll) {
    if (m.records.empty()) throw EmptyCohort("cohort 'all' matches no records");
    return m;
  }
  if (cohort.kind == Cohort::Kind::kSex) {
    for (const auto& p : m.patients()) {
      if (!m.patient_sex.count(p)) {
        throw ValidationError("sex cohort requested but patient " + p + " has no '#patient " + p +
                              " sex=' header");
      }
    }
  }
  Manifest out;
  out.sample_rate_hz = m.sample_rate_hz;
  out.base_dir = m.base_dir;
  for (const auto& r : m.records) {
    const bool keep = cohort.kind == Cohort::Kind::kIndividual
                          ? r.patient_id == cohort.patient_id
                          : m.patient_sex.at(r.patient_id) == cohort.sex;
    if (keep) out.records.push_back(r);
  }
  if (out.records.empty()) {
    throw EmptyCohort("cohort '" + cohort.to_string() + "' matches no patient");
  }
  for (const auto& p : out.patients()) {
    if (auto it = m.patient_sex.find(p); it != m.patient_sex.end()) {
      out.patient_sex.insert(*it);
    }
  }
  return out;
}

SplitAssignment split_fragments(std::size_t n_fragments, const std::vector<int>& labels,
                                double ratio, std::uint64_t seed) {
  if (labels.size() != n_fragments) {
    throw DegenerateInput("split: " + std::to_string(labels.size()) + " labels for " +
                          std::to_string(n_fragments) + " fragments");
  }
  if (n_fragments < 5) throw DegenerateInput("split: need at least 5 fragments");
  if (!(ratio > 0.0 && ratio < 1.0)) throw DegenerateInput("split: ratio must be in (0, 1)");
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < n_fragments; ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw DegenerateInput("split: labels must be binary");
    by_class[labels[i]].push_back(i);
  }
  if (by_class[0].empty() || by_class[1].empty()) {
    throw DegenerateInput("split: single-class corpus");
  }
  Rng rng(seed);
  std::vector<std::size_t> train = choose_train(rng, by_class[0], ratio);
  const auto t1 = choose_train(rng, by_class[1], ratio);
  train.insert(train.end(), t1.begin(), t1.end());
  return finish_split(std::move(train), n_fragments, seed);
}

SplitAssignment split_groups(const std::vector<std::size_t>& group, const std::vector<int>& labels,
                             double ratio, std::uint64_t seed) {
  if (group.size() != labels.size()) {
    throw DegenerateInput("split: group and label lengths differ");
  }
  if (group.size() < 5) throw DegenerateInput("split: need at least 5 fragments");
  if (!(ratio > 0.0 && ratio < 1.0)) throw DegenerateInput("split: ratio must be in (0, 1)");
  std::map<std::size_t, int> group_label;
  for (std::size_t i = 0; i < group.size(); ++i) {
    auto [it, fresh] = group_label.emplace(group[i], labels[i]);
    if (!fresh && it->second != labels[i]) {
      throw DegenerateInput("split: group " + std::to_string(group[i]) + " mixes labels");
    }
  }
  std::vector<std::size_t> by_class[2];
  for (const auto& [g, y] : group_label) {
    if (y != 0 && y != 1) throw DegenerateInput("split: labels must be binary");
    by_class[y].push_back(g);
  }
  if (by_class[0].empty() || by_class[1].empty()) {
    throw DegenerateInput("split: single-class corpus");
  }
  Rng rng(seed);
  std::set<std::size_t> train_groups;
  for (auto& cls : by_class) {
    for (auto g : choose_train(rng, cls, ratio)) train_groups.insert(g);
  }
  std::vector<std::size_t> train;
  for (std::size_t i = 0; i < group.size(); ++i) {
    if (train_groups.count(group[i])) train.push_back(i);
  }
  return finish_split(std::move(train), group.size(), seed);
}

}  // namespace sylq
