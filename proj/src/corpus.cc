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

#include "sylq/corpus.h"

#include <algorithm>
#include <numeric>
#include <tuple>

#include "sylq/audio.h"

namespace sylq {

bool is_training_session(const SyllableRecord& r) {
  return r.session_index == 1 || r.session_index == 2;
}

bool is_rehabilitation_session(const SyllableRecord& r) { return r.session_index >= 3; }

Corpus build_corpus(const Manifest& m, const DspConfig& cfg, const RecordFilter& keep) {
  std::vector<const SyllableRecord*> selected;
  for (const auto& r : m.records) {
    if (keep(r)) selected.push_back(&r);
  }
  std::sort(selected.begin(), selected.end(), [](const SyllableRecord* a, const SyllableRecord* b) {
    return std::tie(a->patient_id, a->session_index, a->syllable_id) <
           std::tie(b->patient_id, b->session_index, b->syllable_id);
  });

  Corpus c;
  for (const SyllableRecord* r : selected) {
    const FragmentSource tag{r->patient_id, r->session_index, r->syllable_id, 0};
    const SampleBuffer buf = read_wav(m.resolve(*r), m.sample_rate_hz);
    std::vector<Fragment> frags = pipeline(buf, cfg, tag);
    if (frags.empty()) {
      c.empty_recordings.push_back(tag);
      continue;
    }
    const std::size_t rec = c.recordings.size();
    c.recordings.push_back(tag);
    for (auto& f : frags) {
      c.fragments.push_back(std::move(f));
      c.labels.push_back(r->class_label.value_or(-1));
      c.recording.push_back(rec);
    }
  }
  return c;
}

}  // namespace sylq
