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

#ifndef SYLQ_NN_H_
#define SYLQ_NN_H_

// Recurrent binary classifier: LSTM(128, all steps) -> LSTM(64, last step)
// -> Dense(64, tanh) -> Dense(16, sigmoid) -> Dense(1, hard sigmoid).
//
// All routines are templated on the scalar type and operate on a single flat
// parameter vector. A batch of B sequences of T steps with D features is
// stored as one D x (T*B) matrix whose column block t (columns [tB, tB+B))
// holds step t of every sequence.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sylq/error.h"

namespace sylq {

struct Architecture {
  int input_steps = 8;
  int input_dim = 513;
  int lstm1_units = 128;
  int lstm2_units = 64;
  int dense1_units = 64;
  int dense2_units = 16;
  int output_units = 1;

  bool operator==(const Architecture&) const = default;
};

// One tensor inside the flat parameter vector, stored column-major.
struct TensorSlot {
  std::string name;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  Eigen::Index offset = 0;

  Eigen::Index size() const { return rows * cols; }
};

// Parameter layout, in order:
//   lstm1.W (4*H1 x D)   lstm1.U (4*H1 x H1)  lstm1.b (4*H1)
//   lstm2.W (4*H2 x H1)  lstm2.U (4*H2 x H2)  lstm2.b (4*H2)
//   dense1.W, dense1.b, dense2.W, dense2.b, dense3.W, dense3.b
// LSTM row blocks are the input, forget, cell and output gates in that order.
std::vector<TensorSlot> parameter_layout(const Architecture& arch);
Eigen::Index parameter_count(const Architecture& arch);

// Throws ShapeMismatch when a dimension is not positive or the output layer
// is not a single unit.
void validate(const Architecture& arch);

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  return Scalar(1) / (Scalar(1) + std::exp(-x));
}

template <typename Scalar>
Scalar hard_sigmoid(Scalar x) {
  return std::min(Scalar(1), std::max(Scalar(0), Scalar(0.2) * x + Scalar(0.5)));
}

// Zero outside the open interval where the ramp is strictly inside (0, 1).
template <typename Scalar>
Scalar hard_sigmoid_grad(Scalar x) {
  const Scalar y = Scalar(0.2) * x + Scalar(0.5);
  return (y > Scalar(0) && y < Scalar(1)) ? Scalar(0.2) : Scalar(0);
}

inline constexpr double kBceEpsilon = 1e-7;

template <typename Scalar>
Scalar bce_loss(Scalar p, int y) {
  const Scalar eps(kBceEpsilon);
  const Scalar q = std::clamp(p, eps, Scalar(1) - eps);
  return y == 1 ? -std::log(q) : -std::log(Scalar(1) - q);
}

// d bce / dp evaluated at the clamped probability.
template <typename Scalar>
Scalar bce_grad(Scalar p, int y) {
  const Scalar eps(kBceEpsilon);
  const Scalar q = std::clamp(p, eps, Scalar(1) - eps);
  return y == 1 ? -Scalar(1) / q : Scalar(1) / (Scalar(1) - q);
}

namespace detail {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using ConstMatMap = Eigen::Map<const Mat<Scalar>>;
template <typename Scalar>
using MatMap = Eigen::Map<Mat<Scalar>>;

template <typename Scalar>
struct LstmTape {
  Mat<Scalar> gates;   // 4H x TB, post-activation i, f, g, o
  Mat<Scalar> cell;    // H x TB
  Mat<Scalar> hidden;  // H x TB
};

template <typename Scalar>
struct DenseTape {
  Mat<Scalar> h2_last;  // H2 x B
  Mat<Scalar> a1;       // tanh output
  Mat<Scalar> a2;       // sigmoid output
  Mat<Scalar> z3;       // pre-activation of the output unit
  Mat<Scalar> p;        // 1 x B
};

template <typename Scalar>
struct Tape {
  LstmTape<Scalar> lstm1;
  LstmTape<Scalar> lstm2;
  DenseTape<Scalar> dense;
};

template <typename Scalar>
struct Views {
  ConstMatMap<Scalar> w1, u1, b1, w2, u2, b2, d1w, d1b, d2w, d2b, d3w, d3b;
};

template <typename Scalar, typename Params>
Views<Scalar> make_views(const Architecture& arch, const Params& params) {
  const auto slots = parameter_layout(arch);
  auto view = [&](std::size_t i) {
    return ConstMatMap<Scalar>(params.data() + slots[i].offset, slots[i].rows, slots[i].cols);
  };
  return {view(0), view(1), view(2), view(3), view(4),  view(5),
          view(6), view(7), view(8), view(9), view(10), view(11)};
}

template <typename Scalar>
struct GradViews {
  MatMap<Scalar> w1, u1, b1, w2, u2, b2, d1w, d1b, d2w, d2b, d3w, d3b;
};

template <typename Scalar>
GradViews<Scalar> make_grad_views(const Architecture& arch, Vec<Scalar>& grad) {
  const auto slots = parameter_layout(arch);
  auto view = [&](std::size_t i) {
    return MatMap<Scalar>(grad.data() + slots[i].offset, slots[i].rows, slots[i].cols);
  };
  return {view(0), view(1), view(2), view(3), view(4),  view(5),
          view(6), view(7), view(8), view(9), view(10), view(11)};
}

// Runs one LSTM layer over all steps, h_0 = c_0 = 0.
template <typename Scalar>
void lstm_forward(const ConstMatMap<Scalar>& w, const ConstMatMap<Scalar>& u,
                  const ConstMatMap<Scalar>& b, const Mat<Scalar>& inputs, Eigen::Index steps,
                  Eigen::Index batch, LstmTape<Scalar>& tape) {
  const Eigen::Index h = u.cols();
  tape.gates.noalias() = w * inputs;
  tape.gates.colwise() += b.col(0);
  tape.cell.resize(h, steps * batch);
  tape.hidden.resize(h, steps * batch);
  for (Eigen::Index t = 0; t < steps; ++t) {
    auto z = tape.gates.middleCols(t * batch, batch);
    if (t > 0) z.noalias() += u * tape.hidden.middleCols((t - 1) * batch, batch);
    z.topRows(2 * h) = z.topRows(2 * h).unaryExpr([](Scalar x) { return sigmoid(x); });
    z.middleRows(2 * h, h) = z.middleRows(2 * h, h).array().tanh().matrix();
    z.bottomRows(h) = z.bottomRows(h).unaryExpr([](Scalar x) { return sigmoid(x); });
    auto c = tape.cell.middleCols(t * batch, batch);
    c = z.topRows(h).cwiseProduct(z.middleRows(2 * h, h));
    if (t > 0) {
      c += z.middleRows(h, h).cwiseProduct(tape.cell.middleCols((t - 1) * batch, batch));
    }
    tape.hidden.middleCols(t * batch, batch) =
        z.bottomRows(h).cwiseProduct(c.array().tanh().matrix());
  }
}

// Backpropagates d_hidden (H x TB) through one LSTM layer. Accumulates into
// the weight gradients and, when d_inputs is non-null, writes the gradient
// with respect to the layer inputs.
template <typename Scalar>
void lstm_backward(const ConstMatMap<Scalar>& w, const ConstMatMap<Scalar>& u,
                   const Mat<Scalar>& inputs, const LstmTape<Scalar>& tape,
                   const Mat<Scalar>& d_hidden, Eigen::Index steps, Eigen::Index batch,
                   MatMap<Scalar>& dw, MatMap<Scalar>& du, MatMap<Scalar>& db,
                   Mat<Scalar>* d_inputs) {
  const Eigen::Index h = u.cols();
  Mat<Scalar> dz(4 * h, steps * batch);
  Mat<Scalar> dh(h, batch);
  Mat<Scalar> dc_carry = Mat<Scalar>::Zero(h, batch);
  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    const auto gates = tape.gates.middleCols(t * batch, batch);
    const auto gi = gates.topRows(h).array();
    const auto gf = gates.middleRows(h, h).array();
    const auto gg = gates.middleRows(2 * h, h).array();
    const auto go = gates.bottomRows(h).array();
    const auto tanh_c = tape.cell.middleCols(t * batch, batch).array().tanh();

    dh = d_hidden.middleCols(t * batch, batch);
    if (t + 1 < steps) dh.noalias() += u.transpose() * dz.middleCols((t + 1) * batch, batch);

    const Mat<Scalar> dc =
        (dh.array() * go * (Scalar(1) - tanh_c.square()) + dc_carry.array()).matrix();
    auto dzt = dz.middleCols(t * batch, batch);
    dzt.topRows(h) = (dc.array() * gg * gi * (Scalar(1) - gi)).matrix();
    if (t > 0) {
      const auto c_prev = tape.cell.middleCols((t - 1) * batch, batch).array();
      dzt.middleRows(h, h) = (dc.array() * c_prev * gf * (Scalar(1) - gf)).matrix();
    } else {
      dzt.middleRows(h, h).setZero();
    }
    dzt.middleRows(2 * h, h) = (dc.array() * gi * (Scalar(1) - gg.square())).matrix();
    dzt.bottomRows(h) = (dh.array() * tanh_c * go * (Scalar(1) - go)).matrix();
    dc_carry = (dc.array() * gf).matrix();
  }
  dw.noalias() += dz * inputs.transpose();
  db.col(0) += dz.rowwise().sum();
  if (steps > 1) {
    du.noalias() +=
        dz.rightCols((steps - 1) * batch) * tape.hidden.leftCols((steps - 1) * batch).transpose();
  }
  if (d_inputs != nullptr) d_inputs->noalias() = w.transpose() * dz;
}

template <typename Scalar, typename Params>
void forward_tape(const Architecture& arch, const Params& params, const Mat<Scalar>& inputs,
                  Eigen::Index batch, Tape<Scalar>& tape) {
  const Eigen::Index steps = arch.input_steps;
  if (inputs.rows() != arch.input_dim || inputs.cols() != steps * batch) {
    throw ShapeMismatch("classifier input must be " + std::to_string(arch.input_dim) + " x " +
                        std::to_string(steps * batch) + ", got " + std::to_string(inputs.rows()) +
                        " x " + std::to_string(inputs.cols()));
  }
  if (params.size() != parameter_count(arch)) {
    throw ShapeMismatch("parameter vector has " + std::to_string(params.size()) +
                        " entries, architecture needs " + std::to_string(parameter_count(arch)));
  }
  const Views<Scalar> v = make_views<Scalar>(arch, params);
  lstm_forward<Scalar>(v.w1, v.u1, v.b1, inputs, steps, batch, tape.lstm1);
  lstm_forward<Scalar>(v.w2, v.u2, v.b2, tape.lstm1.hidden, steps, batch, tape.lstm2);

  auto& d = tape.dense;
  d.h2_last = tape.lstm2.hidden.rightCols(batch);
  d.a1.noalias() = v.d1w * d.h2_last;
  d.a1.colwise() += v.d1b.col(0);
  d.a1 = d.a1.array().tanh().matrix();
  d.a2.noalias() = v.d2w * d.a1;
  d.a2.colwise() += v.d2b.col(0);
  d.a2 = d.a2.unaryExpr([](Scalar x) { return sigmoid(x); });
  d.z3.noalias() = v.d3w * d.a2;
  d.z3.colwise() += v.d3b.col(0);
  d.p = d.z3.unaryExpr([](Scalar x) { return hard_sigmoid(x); });
}

}  // namespace detail

// Set-1 membership probabilities for a batch (1 x B).
template <typename Scalar, typename Params>
Eigen::Matrix<Scalar, 1, Eigen::Dynamic> forward(
    const Architecture& arch, const Params& params,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& inputs, Eigen::Index batch) {
  detail::Tape<Scalar> tape;
  detail::forward_tape<Scalar>(arch, params, inputs, batch, tape);
  return tape.dense.p;
}

template <typename Scalar>
struct BatchResult {
  Scalar mean_loss = 0;
  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> probabilities;
};

// Mean binary cross-entropy over the batch and its gradient with respect to
// every parameter. grad is resized to the parameter count and overwritten.
template <typename Scalar, typename Params>
BatchResult<Scalar> backward(const Architecture& arch, const Params& params,
                             const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& inputs,
                             const std::vector<int>& labels,
                             Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& grad) {
  using detail::Mat;
  const auto batch = static_cast<Eigen::Index>(labels.size());
  if (batch == 0) throw ShapeMismatch("backward: empty batch");
  detail::Tape<Scalar> tape;
  detail::forward_tape<Scalar>(arch, params, inputs, batch, tape);
  const detail::Views<Scalar> v = detail::make_views<Scalar>(arch, params);

  grad.setZero(parameter_count(arch));
  detail::GradViews<Scalar> g = detail::make_grad_views<Scalar>(arch, grad);

  BatchResult<Scalar> out;
  out.probabilities = tape.dense.p;
  const Scalar inv_b = Scalar(1) / static_cast<Scalar>(batch);
  Mat<Scalar> dz3(1, batch);
  for (Eigen::Index j = 0; j < batch; ++j) {
    const Scalar p = tape.dense.p(0, j);
    const int y = labels[static_cast<std::size_t>(j)];
    out.mean_loss += bce_loss(p, y);
    dz3(0, j) = inv_b * bce_grad(p, y) * hard_sigmoid_grad(tape.dense.z3(0, j));
  }
  out.mean_loss *= inv_b;

  const auto& d = tape.dense;
  g.d3w.noalias() += dz3 * d.a2.transpose();
  g.d3b.col(0) += dz3.rowwise().sum();
  const Mat<Scalar> dz2 =
      ((v.d3w.transpose() * dz3).array() * d.a2.array() * (Scalar(1) - d.a2.array())).matrix();
  g.d2w.noalias() += dz2 * d.a1.transpose();
  g.d2b.col(0) += dz2.rowwise().sum();
  const Mat<Scalar> dz1 =
      ((v.d2w.transpose() * dz2).array() * (Scalar(1) - d.a1.array().square())).matrix();
  g.d1w.noalias() += dz1 * d.h2_last.transpose();
  g.d1b.col(0) += dz1.rowwise().sum();

  const Eigen::Index steps = arch.input_steps;
  Mat<Scalar> d_h2 = Mat<Scalar>::Zero(arch.lstm2_units, steps * batch);
  d_h2.rightCols(batch).noalias() = v.d1w.transpose() * dz1;
  Mat<Scalar> d_h1;
  detail::lstm_backward<Scalar>(v.w2, v.u2, tape.lstm1.hidden, tape.lstm2, d_h2, steps, batch, g.w2,
                                g.u2, g.b2, &d_h1);
  detail::lstm_backward<Scalar>(v.w1, v.u1, inputs, tape.lstm1, d_h1, steps, batch, g.w1, g.u1,
                                g.b1, nullptr);
  return out;
}

}  // namespace sylq

#endif  // SYLQ_NN_H_
