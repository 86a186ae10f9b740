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

#include "xmrag/adapter.h"

#include <cmath>
#include <numbers>

#include "xmrag/error.h"
#include "xmrag/random.h"

namespace xmrag {

namespace {

template <typename T>
void CheckFinite(const Mat<T> &m, const char *stage) {
  if (!m.allFinite()) {
    throw NumericError(stage, std::string("non-finite value after adapter stage ") + stage);
  }
}

template <typename T>
T Gelu(T x) {
  return T(0.5) * x * (T(1) + std::erf(x / std::numbers::sqrt2_v<T>));
}

template <typename T>
T GeluGrad(T x) {
  const T cdf = T(0.5) * (T(1) + std::erf(x / std::numbers::sqrt2_v<T>));
  const T pdf = std::exp(T(-0.5) * x * x) * std::numbers::inv_sqrtpi_v<T> /
                std::numbers::sqrt2_v<T>;
  return cdf + x * pdf;
}

template <typename T>
Mat<T> MhaForward(const Mat<T> &xq, const Mat<T> &xkv, const Mat<T> &wq,
                  const Mat<T> &wk, const Mat<T> &wv, const Mat<T> &wo, int heads,
                  AttentionTape<T> &tape) {
  tape.q.noalias() = xq * wq;
  tape.k.noalias() = xkv * wk;
  tape.v.noalias() = xkv * wv;
  const Eigen::Index d = wq.cols();
  const Eigen::Index dh = d / heads;
  const T scale = T(1) / std::sqrt(static_cast<T>(dh));
  tape.concat.resize(xq.rows(), d);
  tape.probs.resize(static_cast<std::size_t>(heads));
  for (int h = 0; h < heads; ++h) {
    const auto qh = tape.q.middleCols(h * dh, dh);
    const auto kh = tape.k.middleCols(h * dh, dh);
    const auto vh = tape.v.middleCols(h * dh, dh);
    Mat<T> &a = tape.probs[static_cast<std::size_t>(h)];
    a.noalias() = qh * kh.transpose();
    a *= scale;
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      auto row = a.row(r);
      const T mx = row.maxCoeff();
      row = (row.array() - mx).exp().matrix();
      row /= row.sum();
    }
    tape.concat.middleCols(h * dh, dh).noalias() = a * vh;
  }
  return tape.concat * wo;
}

// Accumulates weight gradients and input gradients (d_xq, d_xkv).
template <typename T>
void MhaBackward(const Mat<T> &d_out, const Mat<T> &xq, const Mat<T> &xkv,
                 const Mat<T> &wq, const Mat<T> &wk, const Mat<T> &wv,
                 const Mat<T> &wo, int heads, const AttentionTape<T> &tape,
                 Mat<T> &dwq, Mat<T> &dwk, Mat<T> &dwv, Mat<T> &dwo,
                 Mat<T> &d_xq, Mat<T> &d_xkv) {
  dwo.noalias() += tape.concat.transpose() * d_out;
  const Mat<T> d_concat = d_out * wo.transpose();
  const Eigen::Index d = wq.cols();
  const Eigen::Index dh = d / heads;
  const T scale = T(1) / std::sqrt(static_cast<T>(dh));
  Mat<T> dq(xq.rows(), d), dk(xkv.rows(), d), dv(xkv.rows(), d);
  for (int h = 0; h < heads; ++h) {
    const Mat<T> &a = tape.probs[static_cast<std::size_t>(h)];
    const auto d_oh = d_concat.middleCols(h * dh, dh);
    const Mat<T> d_a = d_oh * tape.v.middleCols(h * dh, dh).transpose();
    dv.middleCols(h * dh, dh).noalias() = a.transpose() * d_oh;
    // Softmax Jacobian, row by row.
    const Eigen::Matrix<T, Eigen::Dynamic, 1> dot = (d_a.cwiseProduct(a)).rowwise().sum();
    Mat<T> d_s = a.cwiseProduct(d_a - dot.replicate(1, a.cols()));
    d_s *= scale;
    dq.middleCols(h * dh, dh).noalias() = d_s * tape.k.middleCols(h * dh, dh);
    dk.middleCols(h * dh, dh).noalias() = d_s.transpose() * tape.q.middleCols(h * dh, dh);
  }
  dwq.noalias() += xq.transpose() * dq;
  dwk.noalias() += xkv.transpose() * dk;
  dwv.noalias() += xkv.transpose() * dv;
  d_xq.noalias() += dq * wq.transpose();
  d_xkv.noalias() += dk * wk.transpose();
  d_xkv.noalias() += dv * wv.transpose();
}

}  // namespace

void AdapterShape::Validate() const {
  auto need = [](int v, const char *name) {
    if (v < 1) throw DataError(std::string("adapter dimension ") + name + " must be >= 1");
  };
  need(vision_dim, "vision_dim");
  need(text_dim, "text_dim");
  need(model_dim, "model_dim");
  need(heads, "heads");
  need(query_tokens, "query_tokens");
  need(hidden_dim, "hidden_dim");
  need(resolved_out_dim(), "out_dim");
  if (model_dim % heads != 0) {
    throw DataError("model_dim " + std::to_string(model_dim) +
                    " is not divisible by heads " + std::to_string(heads));
  }
}

template <typename T>
AdapterParamsT<T> AdapterParamsT<T>::Zeros(const AdapterShape &shape) {
  shape.Validate();
  const int d = shape.model_dim;
  const int dout = shape.resolved_out_dim();
  AdapterParamsT p;
  p.shape = shape;
  p.query_tokens = Mat<T>::Zero(shape.query_tokens, d);
  p.pv = Mat<T>::Zero(shape.vision_dim, d);
  p.pt = Mat<T>::Zero(shape.text_dim, d);
  for (Mat<T> *w : {&p.wq1, &p.wk1, &p.wv1, &p.wo1, &p.wq2, &p.wk2, &p.wv2, &p.wo2}) {
    *w = Mat<T>::Zero(d, d);
  }
  p.w1 = Mat<T>::Zero(d, shape.hidden_dim);
  p.b1 = Mat<T>::Zero(1, shape.hidden_dim);
  p.w2 = Mat<T>::Zero(shape.hidden_dim, dout);
  p.b2 = Mat<T>::Zero(1, dout);
  p.ln_gamma = Mat<T>::Zero(1, dout);
  p.ln_beta = Mat<T>::Zero(1, dout);
  return p;
}

template <typename T>
void AdapterParamsT<T>::Validate() const {
  const AdapterParamsT ref = Zeros(shape);
  const auto expected = ref.Tensors();
  std::size_t i = 0;
  ForEach([&](const char *name, const Mat<T> &m) {
    const Mat<T> &e = *expected[i++];
    if (m.rows() != e.rows() || m.cols() != e.cols()) {
      throw DataError(std::string("adapter tensor ") + name + " is " +
                      std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                      ", expected " + std::to_string(e.rows()) + "x" +
                      std::to_string(e.cols()));
    }
    if (!m.allFinite()) {
      throw DataError(std::string("adapter tensor ") + name + " has non-finite values");
    }
  });
}

template <typename T>
AdapterParamsT<T> InitAdapterParams(const AdapterShape &shape, std::uint64_t seed) {
  AdapterParamsT<T> p = AdapterParamsT<T>::Zeros(shape);
  Rng rng(seed);
  p.ForEach([&](const char *name, Mat<T> &m) {
    const std::string n = name;
    if (n == "query_tokens") {
      for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<T>(rng.Normal());
    } else if (n == "ln_gamma") {
      m.setOnes();
    } else if (n == "b1" || n == "b2" || n == "ln_beta") {
      m.setZero();
    } else {
      const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
      for (Eigen::Index i = 0; i < m.size(); ++i) {
        m.data()[i] = static_cast<T>(rng.Uniform(-limit, limit));
      }
    }
  });
  return p;
}

template <typename T>
void ForwardImage(const AdapterParamsT<T> &p, const Mat<T> &x, ImageTape<T> &tape) {
  if (x.rows() < 1 || x.cols() != p.shape.vision_dim) {
    throw DataError("vision features are " + std::to_string(x.rows()) + "x" +
                    std::to_string(x.cols()) + ", adapter expects L x " +
                    std::to_string(p.shape.vision_dim));
  }
  tape.x = x;
  tape.vp.noalias() = x * p.pv;
  CheckFinite(tape.vp, "vision_projection");
  tape.h1 = MhaForward(p.query_tokens, tape.vp, p.wq1, p.wk1, p.wv1, p.wo1,
                       p.shape.heads, tape.stage1);
  CheckFinite(tape.h1, "stage1_attention");
}

template <typename T>
const Mat<T> &ForwardText(const AdapterParamsT<T> &p, const ImageTape<T> &image,
                          const Mat<T> &t, TextTape<T> &tape) {
  if (t.rows() != 1 || t.cols() != p.shape.text_dim) {
    throw DataError("subquery embedding has length " + std::to_string(t.size()) +
                    ", adapter expects " + std::to_string(p.shape.text_dim));
  }
  tape.t = t;
  tape.tp.noalias() = t * p.pt;
  CheckFinite(tape.tp, "text_projection");
  tape.h2 = image.h1 + MhaForward(image.h1, tape.tp, p.wq2, p.wk2, p.wv2, p.wo2,
                                  p.shape.heads, tape.stage2);
  CheckFinite(tape.h2, "stage2_attention");

  tape.pooled = tape.h2.colwise().mean();
  tape.z1.noalias() = tape.pooled * p.w1;
  tape.z1 += p.b1;
  tape.g = tape.z1.unaryExpr([](T v) { return Gelu(v); });
  tape.z2.noalias() = tape.g * p.w2;
  tape.z2 += p.b2;
  CheckFinite(tape.z2, "mlp");

  const T n = static_cast<T>(tape.z2.cols());
  const T mu = tape.z2.sum() / n;
  const Mat<T> centered = tape.z2.array() - mu;
  tape.sigma = std::sqrt(centered.squaredNorm() / n + static_cast<T>(kLayerNormEps));
  tape.zhat = centered / tape.sigma;
  tape.y = tape.zhat.cwiseProduct(p.ln_gamma) + p.ln_beta;
  CheckFinite(tape.y, "layer_norm");

  tape.y_norm = tape.y.norm();
  if (!(tape.y_norm > T(0)) || !std::isfinite(tape.y_norm)) {
    throw NumericError("l2_normalize", "adapter output has zero or non-finite norm");
  }
  tape.out = tape.y / tape.y_norm;
  return tape.out;
}

template <typename T>
void BackwardText(const AdapterParamsT<T> &p, const ImageTape<T> &image,
                  const TextTape<T> &tape, const Mat<T> &d_out,
                  AdapterParamsT<T> &grads, Mat<T> &d_h1) {
  // L2 normalization.
  const T proj = tape.out.cwiseProduct(d_out).sum();
  const Mat<T> d_y = (d_out - proj * tape.out) / tape.y_norm;

  // Layer norm.
  grads.ln_gamma += d_y.cwiseProduct(tape.zhat);
  grads.ln_beta += d_y;
  const Mat<T> d_zhat = d_y.cwiseProduct(p.ln_gamma);
  const T n = static_cast<T>(d_zhat.cols());
  const T mean_d = d_zhat.sum() / n;
  const T mean_dz = d_zhat.cwiseProduct(tape.zhat).sum() / n;
  const Mat<T> d_z2 =
      ((d_zhat.array() - mean_d) - tape.zhat.array() * mean_dz).matrix() / tape.sigma;

  // MLP head.
  grads.w2.noalias() += tape.g.transpose() * d_z2;
  grads.b2 += d_z2;
  const Mat<T> d_g = d_z2 * p.w2.transpose();
  const Mat<T> d_z1 =
      d_g.cwiseProduct(tape.z1.unaryExpr([](T v) { return GeluGrad(v); }));
  grads.w1.noalias() += tape.pooled.transpose() * d_z1;
  grads.b1 += d_z1;
  const Mat<T> d_pooled = d_z1 * p.w1.transpose();

  // Mean pool, then the residual around stage 2.
  const Eigen::Index m = tape.h2.rows();
  const Mat<T> d_h2 = d_pooled.replicate(m, 1) / static_cast<T>(m);
  d_h1 += d_h2;
  Mat<T> d_tp = Mat<T>::Zero(1, tape.tp.cols());
  MhaBackward(d_h2, image.h1, tape.tp, p.wq2, p.wk2, p.wv2, p.wo2, p.shape.heads,
              tape.stage2, grads.wq2, grads.wk2, grads.wv2, grads.wo2, d_h1, d_tp);
  grads.pt.noalias() += tape.t.transpose() * d_tp;
}

template <typename T>
void BackwardImage(const AdapterParamsT<T> &p, const ImageTape<T> &image,
                   const Mat<T> &d_h1, AdapterParamsT<T> &grads) {
  Mat<T> d_vp = Mat<T>::Zero(image.vp.rows(), image.vp.cols());
  MhaBackward(d_h1, p.query_tokens, image.vp, p.wq1, p.wk1, p.wv1, p.wo1,
              p.shape.heads, image.stage1, grads.wq1, grads.wk1, grads.wv1,
              grads.wo1, grads.query_tokens, d_vp);
  grads.pv.noalias() += image.x.transpose() * d_vp;
}

template <typename T>
Mat<T> AdapterForward(const AdapterParamsT<T> &p, const Mat<T> &x, const Mat<T> &t) {
  ImageTape<T> image;
  ForwardImage(p, x, image);
  TextTape<T> text;
  return ForwardText(p, image, t, text);
}

std::vector<float> AdapterForward(const AdapterParams &p, const FeatureMatrix &x,
                                  std::span<const float> t) {
  return AdapterForwardMany(p, x, {t}).front();
}

std::vector<std::vector<float>> AdapterForwardMany(
    const AdapterParams &p, const FeatureMatrix &x,
    const std::vector<std::span<const float>> &ts) {
  ImageTape<float> image;
  ForwardImage(p, ToMat<float>(x), image);
  TextTape<float> text;
  std::vector<std::vector<float>> out;
  out.reserve(ts.size());
  for (const auto &t : ts) {
    const Mat<float> &v = ForwardText(p, image, RowVector<float>(t), text);
    out.emplace_back(v.data(), v.data() + v.size());
  }
  return out;
}

#define XMRAG_INSTANTIATE(T)                                                      \
  template struct AdapterParamsT<T>;                                              \
  template AdapterParamsT<T> InitAdapterParams<T>(const AdapterShape &,           \
                                                  std::uint64_t);                 \
  template void ForwardImage<T>(const AdapterParamsT<T> &, const Mat<T> &,        \
                                ImageTape<T> &);                                  \
  template const Mat<T> &ForwardText<T>(const AdapterParamsT<T> &,                \
                                        const ImageTape<T> &, const Mat<T> &,     \
                                        TextTape<T> &);                           \
  template void BackwardText<T>(const AdapterParamsT<T> &, const ImageTape<T> &,  \
                                const TextTape<T> &, const Mat<T> &,              \
                                AdapterParamsT<T> &, Mat<T> &);                   \
  template void BackwardImage<T>(const AdapterParamsT<T> &, const ImageTape<T> &, \
                                 const Mat<T> &, AdapterParamsT<T> &);            \
  template Mat<T> AdapterForward<T>(const AdapterParamsT<T> &, const Mat<T> &,    \
                                    const Mat<T> &);

XMRAG_INSTANTIATE(float)
XMRAG_INSTANTIATE(double)

#undef XMRAG_INSTANTIATE

}  // namespace xmrag
