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

#ifndef SYLQ_CORPUS_H_
#define SYLQ_CORPUS_H_

#include <functional>
#include <string>
#include <vector>

#include "sylq/dataset.h"
#include "sylq/dsp.h"

namespace sylq {

// Fragments cut from a set of manifest records, sorted canonically by
// (patient, session, syllable, fragment index) so that downstream seeded
// steps never depend on manifest line order.
struct Corpus {
  std::vector<Fragment> fragments;
  // class_label of the source record, or -1 for unlabeled sessions.
  std::vector<int> labels;
  // Recording (patient, session, syllable) each fragment came from, as an
  // index into recordings.
  std::vector<std::size_t> recording;
  std::vector<FragmentSource> recordings;
  // Recordings that produced no fragment.
  std::vector<FragmentSource> empty_recordings;
};

using RecordFilter = std::function<bool(const SyllableRecord&)>;

bool is_training_session(const SyllableRecord& r);
bool is_rehabilitation_session(const SyllableRecord& r);

// Reads every selected record's audio and runs the DSP pipeline on it.
Corpus build_corpus(const Manifest& m, const DspConfig& cfg,
                    const RecordFilter& keep = is_training_session);

}  // namespace sylq

#endif  // SYLQ_CORPUS_H_
