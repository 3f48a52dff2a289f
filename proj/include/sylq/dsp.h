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

#ifndef SYLQ_DSP_H_
#define SYLQ_DSP_H_

#include <string>
#include <vector>

#include <Eigen/Core>

#include "sylq/audio.h"

namespace sylq {

inline constexpr int kFrameLen = 1024;
inline constexpr int kNumBins = kFrameLen / 2 + 1;  // 513
inline constexpr int kFragmentSteps = 8;

enum class Window { kHann, kRect };

struct DspConfig {
  int frame_len = kFrameLen;  // fixed; anything else is rejected
  int hop = 256;
  Window window = Window::kHann;
  double gate_ratio = 1e-4;
  double log_floor = 1e-10;
  int fragment_hop = kFragmentSteps;
  bool log_compress = true;
  // Per-bin standardization with statistics frozen from the training split.
  bool standardize = false;

  // Throws ValidationError on out-of-range fields.
  void validate() const;
  bool operator==(const DspConfig&) const = default;
};

// Rows are time frames, columns the 513 one-sided frequency bins.
struct Spectrogram {
  Eigen::MatrixXd frames;
  int hop = 256;

  Eigen::Index num_frames() const { return frames.rows(); }
};

struct FragmentSource {
  std::string patient_id;
  int session_index = 0;
  std::string syllable_id;
  int fragment_index = 0;

  auto operator<=>(const FragmentSource&) const = default;
};

// One network input: 8 consecutive spectrogram frames (rows) by 513 bins.
struct Fragment {
  Eigen::MatrixXd values;
  FragmentSource source;
};

// Magnitudes |X_k|, k = 0..512, of the windowed 1024-point DFT of each
// frame; frame t starts at sample t * hop. Throws TooShort when the buffer
// holds less than one frame.
Spectrogram stft_magnitude(const SampleBuffer& buf, const DspConfig& cfg);

// Keeps frames whose energy (sum of squared magnitudes) is at least
// gate_ratio times the loudest frame's energy. An all-zero input yields an
// empty spectrogram.
Spectrogram gate_silence(const Spectrogram& spec, const DspConfig& cfg);

// x -> log10(x + log_floor), element-wise.
Spectrogram log_compress(const Spectrogram& spec, const DspConfig& cfg);

// Windows of kFragmentSteps frames every fragment_hop frames; a trailing
// remainder shorter than a window is dropped.
std::vector<Fragment> slice_fragments(const Spectrogram& spec, const DspConfig& cfg,
                                      const FragmentSource& source_tag);

// Number of fragments slice_fragments yields for a T-frame spectrogram.
int fragment_count(Eigen::Index num_frames, int fragment_hop);

// stft -> gate -> log (when enabled) -> slice.
std::vector<Fragment> pipeline(const SampleBuffer& buf, const DspConfig& cfg,
                               const FragmentSource& source_tag);

// Per-bin mean and inverse standard deviation over every frame of a set of
// fragments. Values are rounded to single precision on construction so the
// statistics survive a model-file round trip unchanged.
struct Standardizer {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd inv_std;

  static Standardizer fit(const std::vector<const Fragment*>& fragments);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& values) const;
  bool empty() const { return mean.size() == 0; }
};

}  // namespace sylq

#endif  // SYLQ_DSP_H_
