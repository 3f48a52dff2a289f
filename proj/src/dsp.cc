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

#include "sylq/dsp.h"

#include <cmath>
#include <complex>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "sylq/error.h"

namespace sylq {

void DspConfig::validate() const {
  if (frame_len != kFrameLen) {
    throw ValidationError("frame_len is fixed at 1024 (513 frequency bins)");
  }
  if (hop < 1 || hop > frame_len) throw ValidationError("hop must be in [1, frame_len]");
  if (!(gate_ratio > 0.0 && gate_ratio < 1.0)) {
    throw ValidationError("gate_ratio must be in (0, 1)");
  }
  if (!(log_floor > 0.0)) throw ValidationError("log_floor must be positive");
  if (fragment_hop < 1) throw ValidationError("fragment_hop must be >= 1");
}

Spectrogram stft_magnitude(const SampleBuffer& buf, const DspConfig& cfg) {
  cfg.validate();
  const auto len = static_cast<Eigen::Index>(buf.samples.size());
  if (len < cfg.frame_len) {
    throw TooShort("signal of " + std::to_string(len) +
                   " samples is shorter than one 1024-sample frame");
  }
  const Eigen::Index n_frames = (len - cfg.frame_len) / cfg.hop + 1;

  Eigen::VectorXd window(cfg.frame_len);
  for (int n = 0; n < cfg.frame_len; ++n) {
    window[n] = cfg.window == Window::kRect
                    ? 1.0
                    : 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / cfg.frame_len);
  }

  const Eigen::Map<const Eigen::VectorXd> samples(buf.samples.data(), len);
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  Eigen::VectorXd slice(cfg.frame_len);
  Eigen::VectorXcd bins;

  Spectrogram spec;
  spec.hop = cfg.hop;
  spec.frames.resize(n_frames, kNumBins);
  for (Eigen::Index t = 0; t < n_frames; ++t) {
    slice = samples.segment(t * cfg.hop, cfg.frame_len).cwiseProduct(window);
    fft.fwd(bins, slice);
    spec.frames.row(t) = bins.head(kNumBins).cwiseAbs().transpose();
  }
  return spec;
}

Spectrogram gate_silence(const Spectrogram& spec, const DspConfig& cfg) {
  Spectrogram out;
  out.hop = spec.hop;
  if (spec.frames.rows() == 0) {
    out.frames.resize(0, spec.frames.cols());
    return out;
  }
  const Eigen::VectorXd energy = spec.frames.rowwise().squaredNorm();
  const double peak = energy.maxCoeff();
  std::vector<Eigen::Index> keep;
  if (peak > 0.0) {
    const double threshold = cfg.gate_ratio * peak;
    for (Eigen::Index t = 0; t < energy.size(); ++t) {
      if (energy[t] >= threshold) keep.push_back(t);
    }
  }
  out.frames.resize(static_cast<Eigen::Index>(keep.size()), spec.frames.cols());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out.frames.row(static_cast<Eigen::Index>(i)) = spec.frames.row(keep[i]);
  }
  return out;
}

Spectrogram log_compress(const Spectrogram& spec, const DspConfig& cfg) {
  Spectrogram out;
  out.hop = spec.hop;
  out.frames = (spec.frames.array() + cfg.log_floor).log10().matrix();
  return out;
}

int fragment_count(Eigen::Index num_frames, int fragment_hop) {
  if (num_frames < kFragmentSteps) return 0;
  return static_cast<int>((num_frames - kFragmentSteps) / fragment_hop + 1);
}

std::vector<Fragment> slice_fragments(const Spectrogram& spec, const DspConfig& cfg,
                                      const FragmentSource& source_tag) {
  const int n = fragment_count(spec.num_frames(), cfg.fragment_hop);
  std::vector<Fragment> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Fragment f;
    f.values =
        spec.frames.middleRows(static_cast<Eigen::Index>(i) * cfg.fragment_hop, kFragmentSteps);
    f.source = source_tag;
    f.source.fragment_index = i;
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<Fragment> pipeline(const SampleBuffer& buf, const DspConfig& cfg,
                               const FragmentSource& source_tag) {
  Spectrogram spec = gate_silence(stft_magnitude(buf, cfg), cfg);
  if (cfg.log_compress) spec = log_compress(spec, cfg);
  return slice_fragments(spec, cfg, source_tag);
}

Standardizer Standardizer::fit(const std::vector<const Fragment*>& fragments) {
  if (fragments.empty()) throw DegenerateInput("standardize: no fragments");
  const Eigen::Index cols = fragments.front()->values.cols();
  Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(cols);
  Eigen::RowVectorXd sum_sq = Eigen::RowVectorXd::Zero(cols);
  double rows = 0.0;
  for (const Fragment* f : fragments) {
    sum += f->values.colwise().sum();
    sum_sq += f->values.array().square().matrix().colwise().sum();
    rows += static_cast<double>(f->values.rows());
  }
  Standardizer s;
  s.mean = sum / rows;
  const Eigen::RowVectorXd var = (sum_sq / rows - s.mean.cwiseProduct(s.mean)).cwiseMax(0.0);
  s.inv_std = (var.array().sqrt().max(1e-6)).inverse().matrix();
  s.mean = s.mean.cast<float>().cast<double>();
  s.inv_std = s.inv_std.cast<float>().cast<double>();
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& values) const {
  return ((values.rowwise() - mean).array().rowwise() * inv_std.array()).matrix();
}

}  // namespace sylq
