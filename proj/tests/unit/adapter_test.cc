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
#include <limits>

#include <gtest/gtest.h>

#include "../common/gradcheck.h"
#include "xmrag/error.h"
#include "xmrag/random.h"
#include "xmrag/synthetic.h"

namespace xmrag {
namespace {

using Matrix = std::vector<std::vector<double>>;

Matrix ToRows(const Mat<double> &m) {
  Matrix out(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out[r][c] = m(r, c);
  }
  return out;
}

Matrix MatMul(const Matrix &a, const Matrix &b) {
  Matrix out(a.size(), std::vector<double>(b[0].size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < b.size(); ++k) {
      for (std::size_t j = 0; j < b[0].size(); ++j) out[i][j] += a[i][k] * b[k][j];
    }
  }
  return out;
}

// Plain-loop multi-head cross-attention used as an independent reference.
Matrix Attention(const Matrix &queries, const Matrix &keys, const Mat<double> &wq,
                 const Mat<double> &wk, const Mat<double> &wv, const Mat<double> &wo, int heads) {
  const Matrix q = MatMul(queries, ToRows(wq)), k = MatMul(keys, ToRows(wk)),
               v = MatMul(keys, ToRows(wv));
  const std::size_t d = q[0].size(), dh = d / static_cast<std::size_t>(heads);
  Matrix concat(q.size(), std::vector<double>(d, 0.0));
  for (int h = 0; h < heads; ++h) {
    const std::size_t off = static_cast<std::size_t>(h) * dh;
    for (std::size_t i = 0; i < q.size(); ++i) {
      std::vector<double> w(k.size());
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < k.size(); ++j) {
        double s = 0.0;
        for (std::size_t c = 0; c < dh; ++c) s += q[i][off + c] * k[j][off + c];
        w[j] = s / std::sqrt(static_cast<double>(dh));
        mx = std::max(mx, w[j]);
      }
      double z = 0.0;
      for (auto &x : w) z += x = std::exp(x - mx);
      for (std::size_t j = 0; j < k.size(); ++j) {
        for (std::size_t c = 0; c < dh; ++c) concat[i][off + c] += w[j] / z * v[j][off + c];
      }
    }
  }
  return MatMul(concat, ToRows(wo));
}

std::vector<double> ReferenceForward(const AdapterParamsT<double> &p, const Mat<double> &x,
                                     const Mat<double> &t) {
  const Matrix vp = MatMul(ToRows(x), ToRows(p.pv));
  const Matrix h1 = Attention(ToRows(p.query_tokens), vp, p.wq1, p.wk1, p.wv1, p.wo1, p.shape.heads);
  const Matrix tp = MatMul(ToRows(t), ToRows(p.pt));
  Matrix h2 = Attention(h1, tp, p.wq2, p.wk2, p.wv2, p.wo2, p.shape.heads);
  for (std::size_t i = 0; i < h2.size(); ++i) {
    for (std::size_t c = 0; c < h2[i].size(); ++c) h2[i][c] += h1[i][c];
  }
  Matrix pooled(1, std::vector<double>(h2[0].size(), 0.0));
  for (const auto &row : h2) {
    for (std::size_t c = 0; c < row.size(); ++c) pooled[0][c] += row[c] / static_cast<double>(h2.size());
  }
  Matrix z1 = MatMul(pooled, ToRows(p.w1));
  for (std::size_t c = 0; c < z1[0].size(); ++c) {
    const double z = z1[0][c] + p.b1(0, static_cast<Eigen::Index>(c));
    z1[0][c] = 0.5 * z * (1.0 + std::erf(z / std::sqrt(2.0)));
  }
  Matrix z2 = MatMul(z1, ToRows(p.w2));
  std::vector<double> y = z2[0];
  double mean = 0.0, var = 0.0;
  for (std::size_t c = 0; c < y.size(); ++c) mean += (y[c] += p.b2(0, static_cast<Eigen::Index>(c)));
  mean /= static_cast<double>(y.size());
  for (double v : y) var += (v - mean) * (v - mean);
  var /= static_cast<double>(y.size());
  double norm = 0.0;
  for (std::size_t c = 0; c < y.size(); ++c) {
    const auto ci = static_cast<Eigen::Index>(c);
    y[c] = (y[c] - mean) / std::sqrt(var + 1e-5) * p.ln_gamma(0, ci) + p.ln_beta(0, ci);
    norm += y[c] * y[c];
  }
  for (auto &v : y) v /= std::sqrt(norm);
  return y;
}

Mat<double> RandomMat(Rng &rng, int rows, int cols) {
  Mat<double> m(rows, cols);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = rng.Normal();
  return m;
}

TEST(Adapter, MatchesPlainLoopReference) {
  for (const auto &c : testing::GradCheckCases()) {
    Rng rng(5);
    const auto p = testing::RandomParams(c.shape, rng);
    const Mat<double> x = RandomMat(rng, c.tokens, c.shape.vision_dim);
    const Mat<double> t = RowVector<double>(rng.UnitVector(static_cast<std::size_t>(c.shape.text_dim)));
    const Mat<double> got = AdapterForward(p, x, t);
    const std::vector<double> want = ReferenceForward(p, x, t);
    ASSERT_EQ(got.cols(), static_cast<Eigen::Index>(want.size()));
    for (std::size_t k = 0; k < want.size(); ++k) EXPECT_NEAR(got(0, static_cast<Eigen::Index>(k)), want[k], 1e-12);
  }
}

TEST(Adapter, OutputHasUnitNormAndExpectedLength) {
  const AdapterShape shape{32, 24, 32, 2, 4, 64, 32};
  const AdapterParams p = InitAdapterParams<float>(shape, 3);
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    FeatureMatrix x(16, 32);
    for (auto &v : x.values) v = static_cast<float>(rng.Normal());
    const auto t = rng.UnitVector(24);
    const auto v = AdapterForward(p, x, t);
    ASSERT_EQ(v.size(), 32u);
    double n2 = 0.0;
    for (float f : v) n2 += static_cast<double>(f) * f;
    EXPECT_NEAR(std::sqrt(n2), 1.0, 1e-5);
  }
}

TEST(Adapter, DefaultOutputDimFollowsText) {
  AdapterShape shape;
  shape.vision_dim = 8;
  shape.text_dim = 6;
  EXPECT_EQ(shape.resolved_out_dim(), 6);
  EXPECT_EQ(AdapterParams::Zeros(shape).w2.cols(), 6);
}

TEST(Adapter, InvariantToVisionTokenOrder) {
  const AdapterShape shape{12, 10, 16, 4, 4, 32, 10};
  const auto p = InitAdapterParams<double>(shape, 9);
  Rng rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    const Mat<double> x = RandomMat(rng, 7, 12);
    std::vector<int> perm = {0, 1, 2, 3, 4, 5, 6};
    rng.Shuffle(perm);
    Mat<double> xp(7, 12);
    for (int r = 0; r < 7; ++r) xp.row(r) = x.row(perm[static_cast<std::size_t>(r)]);
    const Mat<double> t = RowVector<double>(rng.UnitVector(10));
    EXPECT_LE((AdapterForward(p, x, t) - AdapterForward(p, xp, t)).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(Adapter, AttentionRowsSumToOne) {
  const AdapterShape shape{6, 5, 8, 2, 3, 8, 5};
  const auto p = InitAdapterParams<double>(shape, 1);
  Rng rng(2);
  ImageTape<double> image;
  TextTape<double> text;
  ForwardImage(p, RandomMat(rng, 5, 6), image);
  ForwardText(p, image, RowVector<double>(rng.UnitVector(5)), text);
  for (const auto *tape : {&image.stage1, &text.stage2}) {
    for (const auto &probs : tape->probs) {
      for (Eigen::Index r = 0; r < probs.rows(); ++r) EXPECT_NEAR(probs.row(r).sum(), 1.0, 1e-6);
    }
  }
}

TEST(Adapter, IdentityAdapterReturnsPlantedEmbedding) {
  Rng rng(12);
  const int dim = 8;
  const AdapterParams p = IdentityAdapter(dim, 3);
  const auto t = ZeroMeanUnitVector(rng, dim);
  FeatureMatrix x(2, dim);
  for (int c = 0; c < dim; ++c) {
    x.at(0, static_cast<std::size_t>(c)) = t[static_cast<std::size_t>(c)];
    x.at(1, static_cast<std::size_t>(c)) = -t[static_cast<std::size_t>(c)];
  }
  const auto v = AdapterForward(p, x, t);
  for (int c = 0; c < dim; ++c) EXPECT_NEAR(v[static_cast<std::size_t>(c)], t[static_cast<std::size_t>(c)], 1e-5);
}

TEST(Adapter, ForwardManySharesStageOne) {
  const AdapterShape shape{6, 5, 8, 2, 3, 8, 5};
  const AdapterParams p = InitAdapterParams<float>(shape, 7);
  Rng rng(8);
  FeatureMatrix x(4, 6);
  for (auto &v : x.values) v = static_cast<float>(rng.Normal());
  const auto t1 = rng.UnitVector(5), t2 = rng.UnitVector(5);
  const auto many = AdapterForwardMany(p, x, {t1, t2});
  ASSERT_EQ(many.size(), 2u);
  EXPECT_EQ(many[0], AdapterForward(p, x, t1));
  EXPECT_EQ(many[1], AdapterForward(p, x, t2));
}

TEST(Adapter, ShapeMismatchIsDataError) {
  const AdapterParams p = InitAdapterParams<float>({6, 5, 8, 2, 3, 8, 5}, 1);
  EXPECT_THROW(AdapterForward(p, FeatureMatrix(2, 7), std::vector<float>(5, 0.2f)), DataError);
  FeatureMatrix x(2, 6);
  EXPECT_THROW(AdapterForward(p, x, std::vector<float>(4, 0.5f)), DataError);
  EXPECT_THROW((AdapterShape{6, 5, 8, 3, 3, 8, 5}.Validate()), DataError);
}

TEST(Adapter, NonFiniteIntermediateNamesStage) {
  AdapterParams p = InitAdapterParams<float>({6, 5, 8, 2, 3, 8, 5}, 1);
  p.pv(0, 0) = std::numeric_limits<float>::infinity();
  FeatureMatrix x(2, 6);
  x.values.assign(x.values.size(), 1.0f);
  try {
    AdapterForward(p, x, std::vector<float>{1.0f, 0.0f, 0.0f, 0.0f, 0.0f});
    FAIL();
  } catch (const NumericError &e) {
    EXPECT_EQ(e.stage(), "vision_projection");
  }
}

TEST(Adapter, CastRoundTripsAndCountsParameters) {
  const AdapterShape shape{6, 5, 8, 2, 3, 8, 5};
  const AdapterParams p = InitAdapterParams<float>(shape, 1);
  const AdapterParams back = p.Cast<double>().Cast<float>();
  auto a = p.Tensors(), b = back.Tensors();
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(*a[i], *b[i]);
  // m*d + dv*d + dt*d + 8*d*d + d*dh + dh + dh*out + 3*out
  EXPECT_EQ(p.ParameterCount(), 24u + 48 + 40 + 512 + 64 + 8 + 40 + 15);
}

TEST(AdapterGradient, MatchesFiniteDifferences) {
  for (const auto &c : testing::GradCheckCases()) {
    for (std::uint64_t seed : {1u, 2u}) {
      const auto r = testing::RunGradCheck(c, seed, ContrastiveVariant::kSummedPositives);
      EXPECT_GT(r.checked, 0u);
      EXPECT_LE(r.max_rel_error, 1e-4) << r.worst;
    }
  }
}

TEST(AdapterGradient, PerPairVariantMatchesFiniteDifferences) {
  const auto r = testing::RunGradCheck(testing::GradCheckCases()[0], 3, ContrastiveVariant::kPerPair);
  EXPECT_LE(r.max_rel_error, 1e-4) << r.worst;
}

TEST(AdapterGradient, SingleKeyStageTwoQueryAndKeyAreDead) {
  // One key per stage-2 attention makes its softmax constant.
  const auto c = testing::GradCheckCases()[0];
  Rng rng(4);
  const auto p = testing::RandomParams(c.shape, rng);
  const auto batch = testing::RandomBatch(c, rng);
  AdapterParamsT<double> grad;
  ContrastiveLoss(p, batch, 0.07, ContrastiveVariant::kSummedPositives, &grad);
  EXPECT_EQ(grad.wq2.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(grad.wk2.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(grad.wv2.cwiseAbs().maxCoeff(), 0.0);
}

}  // namespace
}  // namespace xmrag
