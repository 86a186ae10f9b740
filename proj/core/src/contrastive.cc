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

#include "xmrag/contrastive.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "xmrag/error.h"

namespace xmrag {

namespace {

void CheckArgs(std::span<const double> pos, double tau) {
  if (pos.empty()) throw UsageError("InfoNCE needs at least one positive similarity");
  if (!(tau > 0.0)) throw UsageError("InfoNCE temperature must be > 0");
}

// log(sum_i exp(s_i / tau)) and the softmax weights, max-subtracted.
double LogSumExp(std::span<const double> s, double tau, std::vector<double> &weights) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : s) mx = std::max(mx, v / tau);
  weights.resize(s.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) sum += weights[i] = std::exp(s[i] / tau - mx);
  for (auto &w : weights) w /= sum;
  return mx + std::log(sum);
}

// log(1 + e^x) without overflow.
double Softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

double InfoNceLoss(std::span<const double> pos, std::span<const double> neg,
                   double tau) {
  std::vector<double> dp, dn;
  return InfoNceLossWithGrad(pos, neg, tau, dp, dn);
}

double InfoNceLossWithGrad(std::span<const double> pos, std::span<const double> neg,
                           double tau, std::vector<double> &d_pos,
                           std::vector<double> &d_neg, ContrastiveVariant variant) {
  CheckArgs(pos, tau);
  d_pos.assign(pos.size(), 0.0);
  d_neg.assign(neg.size(), 0.0);
  if (neg.empty()) return 0.0;

  std::vector<double> w_pos, w_neg;
  const double lse_pos = LogSumExp(pos, tau, w_pos);
  const double lse_neg = LogSumExp(neg, tau, w_neg);

  if (variant == ContrastiveVariant::kSummedPositives) {
    // -log(P / (P + N)) with P, N the summed exponentials.
    const double gap = lse_neg - lse_pos;
    const double sig = Sigmoid(gap);
    for (std::size_t i = 0; i < pos.size(); ++i) d_pos[i] = -sig * w_pos[i] / tau;
    for (std::size_t i = 0; i < neg.size(); ++i) d_neg[i] = sig * w_neg[i] / tau;
    return Softplus(gap);
  }

  const double count = static_cast<double>(pos.size());
  double loss = 0.0;
  for (std::size_t p = 0; p < pos.size(); ++p) {
    const double gap = lse_neg - pos[p] / tau;
    const double sig = Sigmoid(gap);
    loss += Softplus(gap);
    d_pos[p] = -sig / tau / count;
    for (std::size_t i = 0; i < neg.size(); ++i) d_neg[i] += sig * w_neg[i] / tau / count;
  }
  return loss / count;
}

template <typename T>
BatchLoss ContrastiveLoss(const AdapterParamsT<T> &p, const ContrastiveBatch<T> &batch,
                          double tau, ContrastiveVariant variant, AdapterParamsT<T> *grad) {
  const std::size_t n = batch.size();
  if (n == 0) throw UsageError("contrastive batch is empty");
  if (batch.t.size() != n || batch.labels.size() != n) {
    throw DataError("contrastive batch fields differ in length");
  }
  if (grad) *grad = AdapterParamsT<T>::Zeros(p.shape);

  BatchLoss out;
  ImageTape<T> image;
  std::vector<TextTape<T>> texts(n);
  std::vector<double> pos, neg, d_pos, d_neg;
  std::vector<std::size_t> pos_idx, neg_idx;
  const T inv_n = T(1) / static_cast<T>(n);

  for (std::size_t a = 0; a < n; ++a) {
    ForwardImage(p, batch.x[a], image);
    pos.clear();
    neg.clear();
    pos_idx.clear();
    neg_idx.clear();
    for (std::size_t b = 0; b < n; ++b) {
      const Mat<T> &v = ForwardText(p, image, batch.t[b], texts[b]);
      const double s = static_cast<double>(v.cwiseProduct(batch.t[b]).sum());
      if (batch.labels[b] == batch.labels[a]) {
        pos.push_back(s);
        pos_idx.push_back(b);
      } else {
        neg.push_back(s);
        neg_idx.push_back(b);
      }
    }
    out.summed += InfoNceLossWithGrad(pos, neg, tau, d_pos, d_neg, variant);
    if (!grad) continue;

    Mat<T> d_h1 = Mat<T>::Zero(image.h1.rows(), image.h1.cols());
    auto backprop = [&](std::size_t b, double ds) {
      // s = <v, t> with t fixed, so d(s)/d(v) = t.
      const Mat<T> d_out = batch.t[b] * (static_cast<T>(ds) * inv_n);
      BackwardText(p, image, texts[b], d_out, *grad, d_h1);
    };
    for (std::size_t i = 0; i < pos_idx.size(); ++i) backprop(pos_idx[i], d_pos[i]);
    for (std::size_t i = 0; i < neg_idx.size(); ++i) backprop(neg_idx[i], d_neg[i]);
    BackwardImage(p, image, d_h1, *grad);
  }
  out.mean = out.summed / static_cast<double>(n);
  return out;
}

template BatchLoss ContrastiveLoss<float>(const AdapterParamsT<float> &,
                                          const ContrastiveBatch<float> &, double,
                                          ContrastiveVariant, AdapterParamsT<float> *);
template BatchLoss ContrastiveLoss<double>(const AdapterParamsT<double> &,
                                           const ContrastiveBatch<double> &, double,
                                           ContrastiveVariant, AdapterParamsT<double> *);

}  // namespace xmrag
