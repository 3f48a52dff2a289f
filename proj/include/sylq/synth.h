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

#ifndef SYLQ_SYNTH_H_
#define SYLQ_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sylq/dataset.h"

namespace sylq {

// Source-filter syllable generator: a glottal impulse train through three
// formant resonators, preceded by a short fricative burst and surrounded by
// silence. A session severity s in [0, 1] is realized per syllable as
// r = s^k, where the susceptibility k of each (patient, syllable) is drawn
// log-uniformly from [1/e^L, e^L] with L = susceptibility_spread, so
// sessions 1 (s = 0) and 2 (s = 1) are unaffected while intermediate
// sessions degrade some syllables more than others. r then acts through
//   second-formant shift     F2 += r * formant_shift_hz
//   spectral tilt            -r * tilt_db_per_octave above tilt_ref_hz
//   additive white noise     SNR = snr_clean_db + r * (snr_degraded_db - snr_clean_db)
// Every recording is peak-normalized to `peak`.
struct SynthSpec {
  int n_patients = 1;
  int syllables_per_set = 20;
  int sample_rate_hz = 16000;
  double duration_s = 0.8;
  SyllableSet syllable_set = SyllableSet::kProblem90;

  double f0_min_hz = 90;
  double f0_max_hz = 220;
  double formant_shift_hz = -350;
  double tilt_db_per_octave = 6;
  double tilt_ref_hz = 100;
  double snr_clean_db = 40;
  double snr_degraded_db = 30;
  bool add_noise = true;
  // Per-recording random variation of f0 and formants (relative).
  double f0_jitter = 0.03;
  double formant_jitter = 0.03;
  double susceptibility_spread = 2.772588722239781;  // ln 16
  double peak = 0.9;

  std::uint64_t seed = 0;

  // Throws ValidationError.
  void validate() const;
};

struct PatientVoice {
  std::string patient_id;
  Sex sex = Sex::kMale;
  double f0_hz = 120;
  double tract_scale = 1.0;  // multiplies every formant
};

struct SyllableShape {
  std::string syllable_id;
  double formants_hz[3] = {500, 1500, 2500};
  double bandwidths_hz[3] = {80, 110, 150};
  double burst_center_hz = 4000;
};

// Patients are "P01", "P02", ...; odd positions are male, even female.
PatientVoice patient_voice(const SynthSpec& spec, int patient_index);
// Syllables are "syl01", "syl02", ...
SyllableShape syllable_shape(const SynthSpec& spec, int syllable_index);

// Severity exponent k of one patient's syllable.
double susceptibility(const SynthSpec& spec, const std::string& patient_id,
                      const std::string& syllable_id);

// s^k, with 0 and 1 fixed points.
double realized_severity(double session_severity, double susceptibility);

// Per-recording seed derived from the corpus seed and the record triple.
std::uint64_t recording_seed(const SynthSpec& spec, const std::string& patient_id,
                             int session_index, const std::string& syllable_id);

// `severity` is the realized severity r of this recording.
std::vector<double> synthesize(const SynthSpec& spec, const PatientVoice& voice,
                               const SyllableShape& shape, double severity,
                               std::uint64_t recording_seed);

// Writes <out_dir>/audio/<patient>_s<session>_<syllable>.wav and
// <out_dir>/manifest.csv for sessions 1 (s = 0) and 2 (s = 1). Returns the
// manifest. Throws IoError.
Manifest generate_corpus(const SynthSpec& spec, const std::filesystem::path& out_dir);

// Appends rehabilitation sessions 3, 4, ... at the given severities for one
// patient, writing audio and rewriting <out_dir>/manifest.csv. When
// expert_threshold is set, each new record carries expert_mark = 1 iff the
// syllable's realized severity is below the threshold.
void generate_trajectory(const SynthSpec& spec, Manifest& manifest,
                         const std::filesystem::path& out_dir, int patient_index,
                         const std::vector<double>& severities,
                         std::optional<double> expert_threshold = std::nullopt);

}  // namespace sylq

#endif  // SYLQ_SYNTH_H_
