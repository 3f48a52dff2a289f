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

#include "sylq/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include "sylq/audio.h"
#include "sylq/error.h"
#include "sylq/random.h"

namespace sylq {
namespace {

std::string indexed(const char* prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%02d", prefix, i);
  return buf;
}

// Second-order resonator with unity gain at DC.
void resonate(std::vector<double>& x, double freq_hz, double bw_hz, int fs) {
  const double r = std::exp(-std::numbers::pi * bw_hz / fs);
  const double c = -r * r;
  const double b = 2.0 * r * std::cos(2.0 * std::numbers::pi * freq_hz / fs);
  const double a = 1.0 - b - c;
  double y1 = 0, y2 = 0;
  for (double& v : x) {
    const double y = a * v + b * y1 + c * y2;
    y2 = y1;
    y1 = y;
    v = y;
  }
}

void normalize_peak(std::vector<double>& x, double peak) {
  double m = 0;
  for (double v : x) m = std::max(m, std::abs(v));
  if (m > 0) {
    for (double& v : x) v *= peak / m;
  }
}

// Raised-cosine onset and offset ramps.
void apply_envelope(std::vector<double>& x, std::size_t attack, std::size_t release) {
  const std::size_t n = x.size();
  attack = std::min(attack, n / 2);
  release = std::min(release, n / 2);
  for (std::size_t i = 0; i < attack; ++i) {
    x[i] *= 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(i) / attack);
  }
  for (std::size_t i = 0; i < release; ++i) {
    x[n - 1 - i] *= 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(i) / release);
  }
}

void apply_tilt(std::vector<double>& x, double db_per_octave, double ref_hz, int fs) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  const Eigen::Map<const Eigen::VectorXd> in(x.data(), n);
  Eigen::VectorXcd spec;
  fft.fwd(spec, Eigen::VectorXd(in));
  for (Eigen::Index k = 0; k < spec.size(); ++k) {
    const double f = static_cast<double>(k) * fs / static_cast<double>(n);
    if (f > ref_hz) {
      spec[k] *= std::pow(10.0, -db_per_octave * std::log2(f / ref_hz) / 20.0);
    }
  }
  Eigen::VectorXd out;
  fft.inv(out, spec, n);
  for (Eigen::Index i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = out[i];
}

std::string wav_name(const std::string& patient, int session, const std::string& syllable) {
  return "audio/" + patient + "_s" + std::to_string(session) + "_" + syllable + ".wav";
}

SyllableRecord write_recording(const SynthSpec& spec, const std::filesystem::path& out_dir,
                               const PatientVoice& voice, int syllable_index, int session,
                               double realized) {
  const SyllableShape shape = syllable_shape(spec, syllable_index);
  const auto audio = synthesize(spec, voice, shape, realized,
                                recording_seed(spec, voice.patient_id, session, shape.syllable_id));
  SyllableRecord r;
  r.patient_id = voice.patient_id;
  r.session_index = session;
  r.syllable_id = shape.syllable_id;
  r.syllable_set = spec.syllable_set;
  r.audio_path = wav_name(voice.patient_id, session, shape.syllable_id);
  r.class_label = implied_class_label(session);
  write_wav(out_dir / r.audio_path, audio, spec.sample_rate_hz);
  return r;
}

void ensure_dirs(const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "audio", ec);
  if (ec) throw IoError("cannot create " + (out_dir / "audio").string() + ": " + ec.message());
}

}  // namespace

void SynthSpec::validate() const {
  if (n_patients < 1) throw ValidationError("synth: n_patients must be >= 1");
  if (syllables_per_set < 1) throw ValidationError("synth: syllables_per_set must be >= 1");
  if (sample_rate_hz < 8000) throw ValidationError("synth: sample rate must be >= 8000 Hz");
  if (!(duration_s > 0.3)) throw ValidationError("synth: duration must exceed 0.3 s");
  if (!(f0_min_hz > 0 && f0_min_hz < f0_max_hz)) {
    throw ValidationError("synth: need 0 < f0_min < f0_max");
  }
  if (tilt_db_per_octave < 0) throw ValidationError("synth: tilt must be >= 0");
  if (!(peak > 0 && peak <= 1)) throw ValidationError("synth: peak must be in (0, 1]");
  if (f0_jitter < 0 || formant_jitter < 0) throw ValidationError("synth: jitter must be >= 0");
  if (susceptibility_spread < 0) throw ValidationError("synth: susceptibility spread must be >= 0");
}

PatientVoice patient_voice(const SynthSpec& spec, int patient_index) {
  PatientVoice v;
  v.patient_id = indexed("P", patient_index);
  v.sex = patient_index % 2 == 1 ? Sex::kMale : Sex::kFemale;
  Rng rng(mix_seed(spec.seed, fnv1a64("patient:" + v.patient_id)));
  const double mid = 0.5 * (spec.f0_min_hz + spec.f0_max_hz);
  if (v.sex == Sex::kMale) {
    v.f0_hz = rng.uniform(spec.f0_min_hz, mid);
    v.tract_scale = rng.uniform(0.95, 1.02);
  } else {
    v.f0_hz = rng.uniform(mid, spec.f0_max_hz);
    v.tract_scale = rng.uniform(1.08, 1.16);
  }
  return v;
}

SyllableShape syllable_shape(const SynthSpec& spec, int syllable_index) {
  SyllableShape s;
  s.syllable_id = indexed("syl", syllable_index);
  Rng rng(mix_seed(spec.seed, fnv1a64("syllable:" + s.syllable_id)));
  s.formants_hz[0] = rng.uniform(300, 800);
  s.formants_hz[1] = rng.uniform(std::max(900.0, s.formants_hz[0] + 300), 2300);
  s.formants_hz[2] = rng.uniform(2400, 3200);
  s.burst_center_hz = rng.uniform(2500, 6000);
  return s;
}

double susceptibility(const SynthSpec& spec, const std::string& patient_id,
                      const std::string& syllable_id) {
  Rng rng(mix_seed(spec.seed, fnv1a64("susceptibility:" + patient_id + "|" + syllable_id)));
  return std::exp(spec.susceptibility_spread * rng.uniform(-1, 1));
}

double realized_severity(double session_severity, double k) {
  if (session_severity <= 0) return 0;
  if (session_severity >= 1) return 1;
  return std::pow(session_severity, k);
}

std::uint64_t recording_seed(const SynthSpec& spec, const std::string& patient_id,
                             int session_index, const std::string& syllable_id) {
  return mix_seed(spec.seed,
                  fnv1a64(patient_id + "|" + std::to_string(session_index) + "|" + syllable_id));
}

std::vector<double> synthesize(const SynthSpec& spec, const PatientVoice& voice,
                               const SyllableShape& shape, double severity, std::uint64_t seed) {
  if (!(severity >= 0 && severity <= 1)) throw ValidationError("synth: severity must be in [0, 1]");
  const int fs = spec.sample_rate_hz;
  const auto n = static_cast<std::size_t>(std::lround(spec.duration_s * fs));
  const auto lead = static_cast<std::size_t>(0.1 * fs);
  const auto trail = static_cast<std::size_t>(0.1 * fs);
  const auto burst_len = static_cast<std::size_t>(0.04 * fs);
  const std::size_t voiced_len = n - lead - trail - burst_len;
  Rng rng(seed);

  const double f0 = voice.f0_hz * (1.0 + spec.f0_jitter * rng.uniform(-1, 1));
  double formants[3];
  for (int k = 0; k < 3; ++k) {
    formants[k] =
        shape.formants_hz[k] * voice.tract_scale * (1.0 + spec.formant_jitter * rng.uniform(-1, 1));
  }
  formants[1] += severity * spec.formant_shift_hz;
  const double nyquist_margin = 0.5 * fs - 200;
  formants[1] = std::clamp(formants[1], formants[0] + 100, nyquist_margin);
  formants[2] = std::clamp(formants[2], formants[1] + 100, nyquist_margin);

  // Glottal pulses with a one-pole low-pass for the source roll-off.
  std::vector<double> voiced(voiced_len, 0.0);
  double phase = 1.0;
  for (double& v : voiced) {
    if (phase >= 1.0) {
      v = 1.0;
      phase -= 1.0;
    }
    phase += f0 / fs;
  }
  double y1 = 0;
  for (double& v : voiced) {
    y1 = v + 0.95 * y1;
    v = y1;
  }
  for (int k = 0; k < 3; ++k) resonate(voiced, formants[k], shape.bandwidths_hz[k], fs);
  // Remove the DC the low-pass accumulates before shaping the envelope.
  double mean = 0;
  for (double v : voiced) mean += v;
  mean /= static_cast<double>(voiced.size());
  for (double& v : voiced) v -= mean;
  apply_envelope(voiced, static_cast<std::size_t>(0.03 * fs), static_cast<std::size_t>(0.06 * fs));
  normalize_peak(voiced, 1.0);

  std::vector<double> burst(burst_len);
  for (double& v : burst) v = rng.normal();
  resonate(burst, shape.burst_center_hz, 1500, fs);
  for (std::size_t i = 0; i < burst_len; ++i) {
    burst[i] *= std::exp(-4.0 * static_cast<double>(i) / burst_len);
  }
  apply_envelope(burst, static_cast<std::size_t>(0.005 * fs), 0);
  normalize_peak(burst, 0.4);

  std::vector<double> x(n, 0.0);
  std::copy(burst.begin(), burst.end(), x.begin() + static_cast<std::ptrdiff_t>(lead));
  std::copy(voiced.begin(), voiced.end(),
            x.begin() + static_cast<std::ptrdiff_t>(lead + burst_len));

  if (severity * spec.tilt_db_per_octave > 0) {
    apply_tilt(x, severity * spec.tilt_db_per_octave, spec.tilt_ref_hz, fs);
  }

  if (spec.add_noise) {
    double power = 0;
    for (std::size_t i = lead; i < n - trail; ++i) power += x[i] * x[i];
    power /= static_cast<double>(n - trail - lead);
    const double snr_db = spec.snr_clean_db + severity * (spec.snr_degraded_db - spec.snr_clean_db);
    const double sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0));
    for (double& v : x) v += sigma * rng.normal();
  }
  normalize_peak(x, spec.peak);
  return x;
}

Manifest generate_corpus(const SynthSpec& spec, const std::filesystem::path& out_dir) {
  spec.validate();
  ensure_dirs(out_dir);
  Manifest m;
  m.sample_rate_hz = spec.sample_rate_hz;
  m.base_dir = out_dir;
  for (int p = 1; p <= spec.n_patients; ++p) {
    const PatientVoice voice = patient_voice(spec, p);
    m.patient_sex[voice.patient_id] = voice.sex;
    for (int session = 1; session <= 2; ++session) {
      const double severity = session == 1 ? 0.0 : 1.0;
      for (int s = 1; s <= spec.syllables_per_set; ++s) {
        m.records.push_back(write_recording(spec, out_dir, voice, s, session, severity));
      }
    }
  }
  save_manifest(m, out_dir / "manifest.csv");
  return m;
}

void generate_trajectory(const SynthSpec& spec, Manifest& manifest,
                         const std::filesystem::path& out_dir, int patient_index,
                         const std::vector<double>& severities,
                         std::optional<double> expert_threshold) {
  spec.validate();
  for (double s : severities) {
    if (!(s >= 0 && s <= 1)) throw ValidationError("synth: severities must be in [0, 1]");
  }
  ensure_dirs(out_dir);
  const PatientVoice voice = patient_voice(spec, patient_index);
  manifest.patient_sex[voice.patient_id] = voice.sex;
  int next_session = 3;
  for (const auto& r : manifest.records) {
    if (r.patient_id == voice.patient_id)
      next_session = std::max(next_session, r.session_index + 1);
  }
  for (double severity : severities) {
    for (int s = 1; s <= spec.syllables_per_set; ++s) {
      const double k = susceptibility(spec, voice.patient_id, syllable_shape(spec, s).syllable_id);
      const double realized = realized_severity(severity, k);
      SyllableRecord r = write_recording(spec, out_dir, voice, s, next_session, realized);
      if (expert_threshold) r.expert_mark = realized < *expert_threshold ? 1 : 0;
      manifest.records.push_back(std::move(r));
    }
    ++next_session;
  }
  save_manifest(manifest, out_dir / "manifest.csv");
}

}  // namespace sylq
