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
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "support.h"
#include "sylq/audio.h"
#include "sylq/error.h"

namespace sylq {
namespace {

using testing::TempDir;

// Writes silent stubs for every record of `text` and parses it.
Manifest load_with_audio(const TempDir& dir, const std::string& text, const LoadOptions& opts = {},
                         LoadReport* report = nullptr) {
  testing::write_file(dir / "manifest.csv", text);
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t end = text.find('\n', pos);
    const std::string line = text.substr(pos, end - pos);
    pos = end == std::string::npos ? text.size() : end + 1;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::size_t a = 0;
    for (;;) {
      const std::size_t b = line.find(',', a);
      f.push_back(line.substr(a, b - a));
      if (b == std::string::npos) break;
      a = b + 1;
    }
    std::filesystem::create_directories((dir / f[4]).parent_path());
    write_wav(dir / f[4], std::vector<double>(64, 0.0), 16000);
  }
  return load_manifest(dir / "manifest.csv", opts, report);
}

std::string record(const std::string& p, int s, const std::string& syl, const std::string& tail) {
  return p + "," + std::to_string(s) + "," + syl + ",Problem90,audio/" + p + "_" +
         std::to_string(s) + "_" + syl + ".wav" + tail + "\n";
}

std::string label(int s) { return s == 1 ? ",1" : s == 2 ? ",0" : ""; }

std::string patient_block(const std::string& p, std::initializer_list<std::string> syls) {
  std::string out;
  for (int s : {1, 2}) {
    for (const auto& syl : syls) out += record(p, s, syl, label(s));
  }
  return out;
}

TEST(ManifestTest, OnePatientThreeSyllables) {
  TempDir dir("ds");
  const Manifest m = load_with_audio(
      dir, "#sample_rate_hz=16000\n#patient P sex=f\n" + patient_block("P", {"sa", "so", "su"}));
  EXPECT_EQ(m.records.size(), 6u);
  EXPECT_EQ(m.sample_rate_hz, 16000);
  EXPECT_EQ(m.patient_sex.at("P"), Sex::kFemale);
  EXPECT_EQ(m.records[0].class_label, 1);
  EXPECT_EQ(m.records[3].class_label, 0);
}

TEST(ManifestTest, MissingSessionTwoSyllableIsNamed) {
  TempDir dir("ds");
  std::string text = "#sample_rate_hz=16000\n";
  for (const auto& syl : {"sa", "so"}) text += record("P", 1, syl, ",1");
  text += record("P", 2, "so", ",0");
  try {
    load_with_audio(dir, text);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("(P, 2, \"sa\")"), std::string::npos) << e.what();
  }
}

TEST(ManifestTest, DuplicateRecordIsRejected) {
  TempDir dir("ds");
  const std::string text =
      "#sample_rate_hz=16000\n" + patient_block("P", {"sa"}) + record("P", 1, "sa", ",1");
  try {
    load_with_audio(dir, text);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("duplicate record (P, 1, \"sa\")"), std::string::npos)
        << e.what();
  }
}

TEST(ManifestTest, ClassLabelMustMatchSession) {
  TempDir dir("ds");
  std::string text =
      "#sample_rate_hz=16000\n" + record("P", 1, "sa", ",0") + record("P", 2, "sa", ",0");
  EXPECT_THROW(load_with_audio(dir, text), ValidationError);
  text = "#sample_rate_hz=16000\n" + patient_block("P", {"sa"}) + record("P", 3, "sa", ",1");
  EXPECT_THROW(load_with_audio(dir, text), ValidationError);
}

TEST(ManifestTest, MissingAudioIsRejected) {
  TempDir dir("ds");
  const std::string text = "#sample_rate_hz=16000\n" + patient_block("P", {"sa"});
  testing::write_file(dir / "manifest.csv", text);
  EXPECT_THROW(load_manifest(dir / "manifest.csv"), ValidationError);
  EXPECT_NO_THROW(load_manifest(dir / "manifest.csv", {.check_files = false}));
}

TEST(ManifestTest, MalformedLinesAreParseErrors) {
  const std::filesystem::path base = ".";
  const LoadOptions no_files{.check_files = false};
  EXPECT_THROW(parse_manifest("P,1,sa,Problem90,a.wav,1\n", base, no_files), ParseError);
  EXPECT_THROW(parse_manifest("#sample_rate_hz=16000\nP,1,sa\n", base, no_files), ParseError);
  EXPECT_THROW(parse_manifest("#sample_rate_hz=16000\nP,x,sa,Problem90,a.wav\n", base, no_files),
               ParseError);
  EXPECT_THROW(parse_manifest("#sample_rate_hz=16000\nP,1,sa,Nope,a.wav,1\n", base, no_files),
               ParseError);
  EXPECT_THROW(parse_manifest("#sample_rate_hz=16000\nP,1,sa,Problem90,a.wav,7\n", base, no_files),
               ParseError);
  EXPECT_THROW(parse_manifest("#sample_rate_hz=16000\n#patient P sex=x\n", base, no_files),
               ParseError);
}

TEST(ManifestTest, DropIncompleteRemovesPatientWithWarning) {
  TempDir dir("ds");
  const std::string text = "#sample_rate_hz=16000\n" + patient_block("A", {"sa", "so"}) +
                           record("B", 1, "sa", ",1") + record("B", 1, "so", ",1") +
                           record("B", 2, "sa", ",0");
  EXPECT_THROW(load_with_audio(dir, text), ValidationError);
  LoadReport report;
  const Manifest m = load_with_audio(dir, text, {.drop_incomplete = true}, &report);
  EXPECT_EQ(m.patients(), std::vector<std::string>{"A"});
  ASSERT_EQ(report.dropped_patients, std::vector<std::string>{"B"});
  ASSERT_EQ(report.warnings.size(), 1u);
  EXPECT_NE(report.warnings[0].find("(B, 2, \"so\")"), std::string::npos);
}

TEST(ManifestTest, SaveLoadIdentity) {
  TempDir dir("ds");
  const std::string text = "#sample_rate_hz=22050\n#patient A sex=m\n#patient B sex=f\n" +
                           patient_block("A", {"sa", "so"}) + patient_block("B", {"sa"}) +
                           record("A", 3, "sa", ",,1") + record("A", 3, "so", ",,0") +
                           record("A", 4, "sa", "");
  const Manifest m = load_with_audio(dir, text);
  EXPECT_EQ(format_manifest(m), text);
  save_manifest(m, dir / "copy.csv");
  const Manifest back = load_manifest(dir / "copy.csv");
  EXPECT_EQ(back.records, m.records);
  EXPECT_EQ(back.patient_sex, m.patient_sex);
  EXPECT_EQ(back.sample_rate_hz, m.sample_rate_hz);
  EXPECT_EQ(back.records[6].expert_mark, 1);
  EXPECT_FALSE(back.records[6].class_label.has_value());
  EXPECT_FALSE(back.records[8].expert_mark.has_value());
}

class CohortTest : public ::testing::Test {
 protected:
  void SetUp() override {
    m_ = load_with_audio(dir_, "#sample_rate_hz=16000\n#patient P1 sex=m\n#patient P2 sex=m\n" +
                                   patient_block("P1", {"sa"}) + patient_block("P2", {"sa", "so"}));
  }
  TempDir dir_{"cohort"};
  Manifest m_;
};

TEST_F(CohortTest, AllIsIdentity) {
  const Manifest out = filter_cohort(m_, Cohort::all());
  EXPECT_EQ(out.records, m_.records);
  EXPECT_EQ(out.patient_sex, m_.patient_sex);
}

TEST_F(CohortTest, IndividualKeepsOnlyThatPatient) {
  const Manifest out = filter_cohort(m_, Cohort::individual("P1"));
  ASSERT_EQ(out.records.size(), 2u);
  for (const auto& r : out.records) EXPECT_EQ(r.patient_id, "P1");
}

TEST_F(CohortTest, AbsentSexIsEmptyCohort) {
  EXPECT_THROW(filter_cohort(m_, Cohort::of_sex(Sex::kFemale)), EmptyCohort);
  EXPECT_EQ(filter_cohort(m_, Cohort::of_sex(Sex::kMale)).records.size(), 6u);
  EXPECT_THROW(filter_cohort(m_, Cohort::individual("P9")), EmptyCohort);
}

TEST_F(CohortTest, SexCohortNeedsDeclaredSex) {
  m_.patient_sex.erase("P2");
  EXPECT_THROW(filter_cohort(m_, Cohort::of_sex(Sex::kMale)), ValidationError);
}

TEST(CohortParseTest, RoundTrips) {
  for (const char* text : {"all", "sex:m", "sex:f", "patient:P07"}) {
    EXPECT_EQ(Cohort::parse(text).to_string(), text);
  }
  EXPECT_THROW(Cohort::parse("men"), ParseError);
  EXPECT_THROW(Cohort::parse("patient:"), ParseError);
}

std::vector<int> balanced(std::size_t n) {
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = i % 2 == 0 ? 1 : 0;
  return labels;
}

TEST(SplitTest, TenItemsStratified) {
  const std::vector<int> labels = {1, 1, 1, 1, 1, 0, 0, 0, 0, 0};
  const SplitAssignment s = split_fragments(10, labels, 0.8, 42);
  ASSERT_EQ(s.train_indices.size(), 8u);
  ASSERT_EQ(s.test_indices.size(), 2u);
  int test_ones = 0;
  for (auto i : s.test_indices) test_ones += labels[i];
  EXPECT_EQ(test_ones, 1);
  EXPECT_EQ(s.seed, 42u);
}

TEST(SplitTest, SameSeedSameAssignment) {
  const auto labels = balanced(37);
  const SplitAssignment a = split_fragments(37, labels, 0.8, 9);
  const SplitAssignment b = split_fragments(37, labels, 0.8, 9);
  EXPECT_EQ(a.train_indices, b.train_indices);
  EXPECT_EQ(a.test_indices, b.test_indices);
  const SplitAssignment c = split_fragments(37, labels, 0.8, 10);
  EXPECT_NE(a.train_indices, c.train_indices);
}

TEST(SplitTest, PaperScaleCorpus) {
  const std::size_t n = 102322;
  const SplitAssignment s = split_fragments(n, balanced(n), 0.8, 1);
  EXPECT_NEAR(static_cast<double>(s.train_indices.size()), 81858.0, 1.0);
  EXPECT_EQ(s.train_indices.size() + s.test_indices.size(), n);
}

TEST(SplitTest, DegenerateInputs) {
  EXPECT_THROW(split_fragments(4, {1, 0, 1, 0}), DegenerateInput);
  EXPECT_THROW(split_fragments(6, {1, 1, 1, 1, 1, 1}), DegenerateInput);
  EXPECT_THROW(split_fragments(6, {1, 0, 1}), DegenerateInput);
  EXPECT_THROW(split_fragments(6, balanced(6), 1.0), DegenerateInput);
  EXPECT_THROW(split_fragments(6, {1, 0, 2, 0, 1, 0}), DegenerateInput);
}

TEST(SplitTest, GroupsNeverStraddle) {
  std::vector<std::size_t> group;
  std::vector<int> labels;
  for (std::size_t g = 0; g < 20; ++g) {
    for (int k = 0; k < 3 + static_cast<int>(g % 3); ++k) {
      group.push_back(g);
      labels.push_back(g < 10 ? 1 : 0);
    }
  }
  const SplitAssignment s = split_groups(group, labels, 0.8, 5);
  std::set<std::size_t> train_groups, test_groups;
  for (auto i : s.train_indices) train_groups.insert(group[i]);
  for (auto i : s.test_indices) test_groups.insert(group[i]);
  for (auto g : train_groups) EXPECT_FALSE(test_groups.count(g)) << g;
  EXPECT_EQ(train_groups.size(), 16u);
  EXPECT_EQ(s.train_indices.size() + s.test_indices.size(), group.size());

  labels[1] = 0;
  EXPECT_THROW(split_groups(group, labels, 0.8, 5), DegenerateInput);
}

TEST(ImpliedLabelTest, Sessions) {
  EXPECT_EQ(implied_class_label(1), 1);
  EXPECT_EQ(implied_class_label(2), 0);
  EXPECT_FALSE(implied_class_label(3).has_value());
}

}  // namespace
}  // namespace sylq
