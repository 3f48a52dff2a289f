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

#ifndef SYLQ_DATASET_H_
#define SYLQ_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sylq {

enum class SyllableSet { kGost100, kProblem90, kOther };

std::string_view to_string(SyllableSet set);
SyllableSet parse_syllable_set(std::string_view text);

enum class Sex { kMale, kFemale };

// Session 1 is recorded before the operation (class 1), session 2 right
// after it (class 0); later sessions come from rehabilitation and carry no
// class label.
struct SyllableRecord {
  std::string patient_id;
  int session_index = 0;
  std::string syllable_id;
  SyllableSet syllable_set = SyllableSet::kOther;
  // As written in the manifest; relative paths resolve against base_dir.
  std::string audio_path;
  std::optional<int> class_label;
  std::optional<int> expert_mark;

  bool operator==(const SyllableRecord&) const = default;
};

// Class label implied by a session index, empty for rehabilitation sessions.
std::optional<int> implied_class_label(int session_index);

struct Manifest {
  int sample_rate_hz = 0;
  std::map<std::string, Sex> patient_sex;
  std::vector<SyllableRecord> records;
  // Directory relative audio paths are resolved against. Not serialized.
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const SyllableRecord& r) const;
  std::vector<std::string> patients() const;
};

struct LoadOptions {
  // Check that every audio file exists and is readable.
  bool check_files = true;
  // Drop patients whose sessions 1 and 2 do not pair up instead of failing.
  bool drop_incomplete = false;
};

// Warnings collected while loading (dropped patients and the like).
struct LoadReport {
  std::vector<std::string> warnings;
  std::vector<std::string> dropped_patients;
};

// Parses and validates. Throws ParseError for malformed lines and
// ValidationError for broken invariants; messages name the record.
Manifest load_manifest(const std::filesystem::path& path, const LoadOptions& opts = {},
                       LoadReport* report = nullptr);

Manifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir,
                        const LoadOptions& opts = {}, LoadReport* report = nullptr);

std::string format_manifest(const Manifest& m);
void save_manifest(const Manifest& m, const std::filesystem::path& path);

// Throws ValidationError on the first violation found.
void validate_manifest(const Manifest& m, const LoadOptions& opts = {},
                       LoadReport* report = nullptr);

struct Cohort {
  enum class Kind { kIndividual, kSex, kAll };
  Kind kind = Kind::kAll;
  std::string patient_id;  // kIndividual
  Sex sex = Sex::kMale;    // kSex

  static Cohort all() { return {}; }
  static Cohort individual(std::string id) {
    return {Kind::kIndividual, std::move(id), Sex::kMale};
  }
  static Cohort of_sex(Sex s) { return {Kind::kSex, {}, s}; }

  // "all", "patient:<id>", "sex:m", "sex:f".
  static Cohort parse(std::string_view text);
  std::string to_string() const;
  bool operator==(const Cohort&) const = default;
};

// Throws EmptyCohort when nothing matches; ValidationError when a sex
// cohort is requested but some patient has no declared sex.
Manifest filter_cohort(const Manifest& m, const Cohort& cohort);

struct SplitAssignment {
  std::vector<std::size_t> train_indices;  // ascending
  std::vector<std::size_t> test_indices;   // ascending
  std::uint64_t seed = 0;
};

// Stratified seeded split: each class contributes round(ratio * n_class)
// items to train. Throws DegenerateInput on a single-class input or fewer
// than five items.
SplitAssignment split_fragments(std::size_t n_fragments, const std::vector<int>& labels,
                                double ratio = 0.8, std::uint64_t seed = 0);

// Same stratification, but whole groups (e.g. recordings) move together so
// fragments of one recording never straddle the split. group[i] is the
// group of item i; each group must have a single label.
SplitAssignment split_groups(const std::vector<std::size_t>& group, const std::vector<int>& labels,
                             double ratio = 0.8, std::uint64_t seed = 0);

}  // namespace sylq

#endif  // SYLQ_DATASET_H_
