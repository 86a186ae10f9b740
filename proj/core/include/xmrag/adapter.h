// Copyright 2026 The xmrag Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "xmrag/feature_io.h"

namespace xmrag {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct AdapterShape {
  int vision_dim = 0;    //!< d_v, columns of the vision feature matrix
  int text_dim = 0;      //!< d_t, subquery embedding length
  int model_dim = 256;   //!< d
  int heads = 4;         //!< h; must divide d
  int query_tokens = 4;  //!< m
  int hidden_dim = 512;  //!< MLP width
  int out_dim = 0;       //!< d_out; 0 means "same as text_dim"

  int resolved_out_dim() const { return out_dim > 0 ? out_dim : text_dim; }

  //! Throws DataError when any dimension is < 1 or heads does not divide d.
  void Validate() const;

  friend bool operator==(const AdapterShape &, const AdapterShape &) = default;
};

/*! Learnable tensors of the vision adapter. Row-vector convention
 *  throughout: activations are (rows x features) and layers compute X*W.
 *  Biases, layer-norm scale and shift are 1 x k matrices.
 */
template <typename T>
struct AdapterParamsT {
  AdapterShape shape;
  Mat<T> query_tokens;  // m x d
  Mat<T> pv;            // d_v x d
  Mat<T> pt;            // d_t x d
  Mat<T> wq1, wk1, wv1, wo1;  // d x d, stage 1
  Mat<T> wq2, wk2, wv2, wo2;  // d x d, stage 2
  Mat<T> w1, b1;  // d x d_h, 1 x d_h
  Mat<T> w2, b2;  // d_h x d_out, 1 x d_out
  Mat<T> ln_gamma, ln_beta;  // 1 x d_out

  //! All tensors zero-filled at the shapes implied by `shape`.
  static AdapterParamsT Zeros(const AdapterShape &shape);

  //! Visits (name, tensor) in a fixed order.
  template <typename F>
  void ForEach(F &&f) { Visit(*this, f); }

  template <typename F>
  void ForEach(F &&f) const { Visit(*this, f); }

  std::size_t ParameterCount() const {
    std::size_t n = 0;
    ForEach([&](const char *, const Mat<T> &m) { n += static_cast<std::size_t>(m.size()); });
    return n;
  }

  //! Throws DataError if tensor shapes disagree with `shape` or any value is
  //! non-finite.
  void Validate() const;

  template <typename U>
  AdapterParamsT<U> Cast() const {
    AdapterParamsT<U> out = AdapterParamsT<U>::Zeros(shape);
    auto src = this->Tensors();
    std::size_t i = 0;
    out.ForEach([&](const char *, Mat<U> &m) { m = src[i++]->template cast<U>(); });
    return out;
  }

  std::vector<const Mat<T> *> Tensors() const {
    std::vector<const Mat<T> *> out;
    ForEach([&](const char *, const Mat<T> &m) { out.push_back(&m); });
    return out;
  }

  std::vector<Mat<T> *> MutableTensors() {
    std::vector<Mat<T> *> out;
    ForEach([&](const char *, Mat<T> &m) { out.push_back(&m); });
    return out;
  }

 private:
  template <typename Self, typename F>
  static void Visit(Self &s, F &f) {
    f("query_tokens", s.query_tokens);
    f("pv", s.pv);
    f("pt", s.pt);
    f("wq1", s.wq1);
    f("wk1", s.wk1);
    f("wv1", s.wv1);
    f("wo1", s.wo1);
    f("wq2", s.wq2);
    f("wk2", s.wk2);
    f("wv2", s.wv2);
    f("wo2", s.wo2);
    f("w1", s.w1);
    f("b1", s.b1);
    f("w2", s.w2);
    f("b2", s.b2);
    f("ln_gamma", s.ln_gamma);
    f("ln_beta", s.ln_beta);
  }
};

using AdapterParams = AdapterParamsT<float>;

/*! Xavier-uniform projections, N(0, 1) query tokens, zero biases, unit
 *  layer-norm scale, zero shift.
 */
template <typename T>
AdapterParamsT<T> InitAdapterParams(const AdapterShape &shape, std::uint64_t seed);

//! Cached intermediates of one multi-head attention call.
template <typename T>
struct AttentionTape {
  Mat<T> q, k, v;              // projected queries / keys / values
  std::vector<Mat<T>> probs;   // per head: rows = queries, cols = keys
  Mat<T> concat;               // heads concatenated, before W_O
};

//! Image-dependent part of the forward pass (shared by all subqueries).
template <typename T>
struct ImageTape {
  Mat<T> x;    // L x d_v
  Mat<T> vp;   // L x d
  AttentionTape<T> stage1;
  Mat<T> h1;   // m x d
};

//! Subquery-dependent part of the forward pass.
template <typename T>
struct TextTape {
  Mat<T> t;      // 1 x d_t
  Mat<T> tp;     // 1 x d
  AttentionTape<T> stage2;
  Mat<T> h2;     // m x d, stage-1 output plus stage-2 attention
  Mat<T> pooled; // 1 x d
  Mat<T> z1, g;  // 1 x d_h, pre- and post-GELU
  Mat<T> z2;     // 1 x d_out
  Mat<T> zhat;   // 1 x d_out, standardized
  T sigma = 0;
  Mat<T> y;      // 1 x d_out, after layer-norm affine
  T y_norm = 0;
  Mat<T> out;    // 1 x d_out, unit norm
};

inline constexpr double kLayerNormEps = 1e-5;

/*! Stage 1: P_v projection, then cross-attention from the learnable query
 *  tokens to the projected vision tokens, heads concatenated and projected
 *  by W_O1. Throws DataError on shape mismatch and NumericError (naming the
 *  stage) on non-finite intermediates.
 */
template <typename T>
void ForwardImage(const AdapterParamsT<T> &p, const Mat<T> &x, ImageTape<T> &tape);

/*! Stage 2 and head: cross-attention from the stage-1 tokens to the single
 *  projected subquery embedding, added back onto the stage-1 tokens; mean
 *  pool; Linear-GELU-Linear; layer norm; L2 normalization. `t` is 1 x d_t.
 *  Returns tape.out.
 */
template <typename T>
const Mat<T> &ForwardText(const AdapterParamsT<T> &p, const ImageTape<T> &image,
                          const Mat<T> &t, TextTape<T> &tape);

/*! Accumulates into `grads` the gradient contribution of d(out) through the
 *  text part, and adds the gradient w.r.t. the stage-1 output to `d_h1`
 *  (which must be m x d).
 */
template <typename T>
void BackwardText(const AdapterParamsT<T> &p, const ImageTape<T> &image,
                  const TextTape<T> &tape, const Mat<T> &d_out,
                  AdapterParamsT<T> &grads, Mat<T> &d_h1);

//! Accumulates stage-1 and P_v gradients given d(h1).
template <typename T>
void BackwardImage(const AdapterParamsT<T> &p, const ImageTape<T> &image,
                   const Mat<T> &d_h1, AdapterParamsT<T> &grads);

//! Full forward for one (image, subquery) pair; returns a 1 x d_out row.
template <typename T>
Mat<T> AdapterForward(const AdapterParamsT<T> &p, const Mat<T> &x, const Mat<T> &t);

//! Production entry: unit-norm v for one image and one subquery embedding.
std::vector<float> AdapterForward(const AdapterParams &p, const FeatureMatrix &x,
                                  std::span<const float> t);

//! One image against several subquery embeddings, sharing stage 1.
std::vector<std::vector<float>> AdapterForwardMany(
    const AdapterParams &p, const FeatureMatrix &x,
    const std::vector<std::span<const float>> &ts);

template <typename T>
Mat<T> ToMat(const FeatureMatrix &m) {
  Mat<T> out(m.rows, m.cols);
  for (std::uint32_t r = 0; r < m.rows; ++r) {
    for (std::uint32_t c = 0; c < m.cols; ++c) out(r, c) = static_cast<T>(m.at(r, c));
  }
  return out;
}

template <typename T>
Mat<T> RowVector(std::span<const float> v) {
  Mat<T> out(1, static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(0, static_cast<Eigen::Index>(i)) = static_cast<T>(v[i]);
  return out;
}

extern template struct AdapterParamsT<float>;
extern template struct AdapterParamsT<double>;

}  // namespace xmrag
