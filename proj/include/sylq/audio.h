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

#ifndef SYLQ_AUDIO_H_
#define SYLQ_AUDIO_H_

#include <filesystem>
#include <span>
#include <vector>

namespace sylq {

// Mono recording of one syllable, samples normalized to [-1, 1].
struct SampleBuffer {
  std::vector<double> samples;
  int sample_rate_hz = 0;
};

// Reads a RIFF/WAVE file holding 16-bit signed little-endian PCM, mono.
// Anything else (other bit depths, float, stereo, a rate different from
// expected_rate_hz when that is positive) raises ParseError; an unreadable
// file raises IoError.
SampleBuffer read_wav(const std::filesystem::path& path, int expected_rate_hz = 0);

// Writes 16-bit PCM mono. Samples are clamped to [-1, 1] and rounded to the
// nearest of round(x * 32767).
void write_wav(const std::filesystem::path& path, std::span<const double> samples,
               int sample_rate_hz);

}  // namespace sylq

#endif  // SYLQ_AUDIO_H_
