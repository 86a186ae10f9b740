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

#include "xmrag/synthetic.h"

#include <cmath>
#include <cstdio>
#include <memory>

#include "xmrag/error.h"

namespace xmrag {

namespace {

std::string Id(const char *prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%06zu", prefix, i);
  return buf;
}

std::string Join(const std::vector<std::string> &parts, const std::string &sep) {
  std::string out;
  for (const auto &p : parts) {
    if (!out.empty()) out += sep;
    out += p;
  }
  return out;
}

FeatureMatrix GaussianFeatures(Rng &rng, int rows, int cols) {
  FeatureMatrix m(static_cast<std::uint32_t>(rows), static_cast<std::uint32_t>(cols));
  for (auto &v : m.values) v = static_cast<float>(rng.Normal());
  return m;
}

std::string Filler(Rng &rng, int words, int vocab) {
  std::vector<std::string> out;
  for (int i = 0; i < words; ++i) out.push_back("f" + std::to_string(rng.Below(static_cast<std::uint64_t>(vocab))));
  return Join(out, " ");
}

Query EmbeddedQuery(std::string raw, const std::vector<std::string> &phrases,
                    std::vector<std::vector<float>> embeddings) {
  std::vector<Subquery> subs;
  for (std::size_t i = 0; i < phrases.size(); ++i) {
    subs.push_back(Subquery{phrases[i], std::move(embeddings[i])});
  }
  return Query(std::move(raw), std::move(subs));
}

}  // namespace

AdapterParams IdentityAdapter(int dim, int query_tokens) {
  AdapterShape shape;
  shape.vision_dim = dim;
  shape.text_dim = dim;
  shape.model_dim = dim;
  shape.heads = 1;
  shape.query_tokens = query_tokens;
  shape.hidden_dim = 2 * dim;
  shape.out_dim = dim;
  AdapterParams p = AdapterParams::Zeros(shape);
  p.query_tokens.setOnes();
  const Mat<float> eye = Mat<float>::Identity(dim, dim);
  p.pv = eye;
  p.pt = eye;
  p.wv1 = eye;
  p.wo1 = eye;
  p.wv2 = eye;
  p.wo2 = eye;
  p.w1.leftCols(dim) = eye;
  p.w1.rightCols(dim) = -eye;
  p.w2.topRows(dim) = eye;
  p.w2.bottomRows(dim) = -eye;
  p.ln_gamma.setOnes();
  return p;
}

std::vector<float> ZeroMeanUnitVector(Rng &rng, int dim) {
  if (dim < 2) throw UsageError("zero-mean unit vectors need dim >= 2");
  std::vector<double> g(static_cast<std::size_t>(dim));
  double norm2 = 0.0;
  while (norm2 < 1e-12) {
    double mean = 0.0;
    for (auto &x : g) mean += x = rng.Normal();
    mean /= dim;
    norm2 = 0.0;
    for (auto &x : g) {
      x -= mean;
      norm2 += x * x;
    }
  }
  const double inv = 1.0 / std::sqrt(norm2);
  std::vector<float> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = static_cast<float>(g[i] * inv);
  return out;
}

std::vector<PlantedInstance> PlantCorpus(const PlantSpec &spec) {
  if (spec.num_queries < 1 || spec.n < 1 || spec.records < 1 || spec.dim < 2) {
    throw UsageError("invalid plant spec");
  }
  Rng rng(spec.seed);
  std::vector<PlantedInstance> out;
  out.reserve(static_cast<std::size_t>(spec.num_queries));
  for (int q = 0; q < spec.num_queries; ++q) {
    std::vector<std::string> phrases;
    std::vector<std::vector<float>> embeddings;
    for (int i = 0; i < spec.n; ++i) {
      phrases.push_back("pa" + std::to_string(q) + "x" + std::to_string(i) + " pb" +
                        std::to_string(q) + "x" + std::to_string(i));
      embeddings.push_back(ZeroMeanUnitVector(rng, spec.dim));
    }
    const auto truth = static_cast<std::size_t>(rng.Below(static_cast<std::uint64_t>(spec.records)));

    std::vector<ImageRecord> records;
    std::vector<FeatureMatrix> features;
    for (std::size_t r = 0; r < static_cast<std::size_t>(spec.records); ++r) {
      ImageRecord rec;
      rec.id = Id("img", r);
      std::vector<std::string> parts{Filler(rng, 3, 500)};
      if (r == truth) {
        for (const auto &p : phrases) parts.push_back(p);
        FeatureMatrix f(static_cast<std::uint32_t>(2 * spec.n), static_cast<std::uint32_t>(spec.dim));
        for (int i = 0; i < spec.n; ++i) {
          for (int c = 0; c < spec.dim; ++c) {
            const float v = embeddings[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
            f.at(static_cast<std::size_t>(2 * i), static_cast<std::size_t>(c)) = v;
            f.at(static_cast<std::size_t>(2 * i + 1), static_cast<std::size_t>(c)) = -v;
          }
        }
        features.push_back(std::move(f));
      } else {
        std::vector<bool> keep(static_cast<std::size_t>(spec.n));
        int kept = 0;
        for (auto &&k : keep) kept += (k = rng.Bernoulli(0.5));
        if (kept == spec.n) keep[static_cast<std::size_t>(rng.Below(static_cast<std::uint64_t>(spec.n)))] = false;
        for (int i = 0; i < spec.n; ++i) {
          if (keep[static_cast<std::size_t>(i)]) parts.push_back(phrases[static_cast<std::size_t>(i)]);
        }
        features.push_back(GaussianFeatures(rng, 2 * spec.n, spec.dim));
      }
      parts.push_back(Filler(rng, 2, 500));
      rec.caption = Join(parts, " ");
      rec.feature_ref = rec.id + ".xmrg";
      records.push_back(std::move(rec));
    }
    Corpus corpus(std::move(records),
                  std::make_shared<InMemoryFeatureSource>(std::move(features)));
    out.push_back(PlantedInstance{std::move(corpus),
                                  EmbeddedQuery(Join(phrases, ", "), phrases, std::move(embeddings)),
                                  Id("img", truth)});
  }
  return out;
}

RandomInstance MakeRandomInstance(const RandomInstanceSpec &spec) {
  if (spec.n < 1 || spec.records < 1 || spec.tokens < 1 || spec.dim < 2) {
    throw UsageError("invalid random instance spec");
  }
  Rng rng(spec.seed);
  std::vector<std::string> first, second, phrases;
  std::vector<std::vector<float>> embeddings;
  for (int i = 0; i < spec.n; ++i) {
    first.push_back("qa" + std::to_string(i));
    second.push_back("qb" + std::to_string(i));
    phrases.push_back(first.back() + " " + second.back());
    embeddings.push_back(rng.UnitVector(static_cast<std::size_t>(spec.dim)));
  }

  std::vector<ImageRecord> records;
  std::vector<FeatureMatrix> features;
  for (int r = 0; r < spec.records; ++r) {
    ImageRecord rec;
    rec.id = Id("r", static_cast<std::size_t>(r));
    std::vector<std::string> parts{Filler(rng, 2, 50)};
    if (rng.Bernoulli(spec.scramble_rate)) {
      // Second words first, so no "qaI qbI" pair is ever adjacent in order.
      for (int i = 0; i < spec.n; ++i) {
        if (rng.Bernoulli(0.5)) parts.push_back(second[static_cast<std::size_t>(i)]);
      }
      for (int i = 0; i < spec.n; ++i) {
        if (rng.Bernoulli(0.5)) parts.push_back(first[static_cast<std::size_t>(i)]);
      }
    } else {
      for (int i = 0; i < spec.n; ++i) {
        if (rng.Bernoulli(spec.phrase_rate)) {
          parts.push_back(phrases[static_cast<std::size_t>(i)]);
          parts.push_back(Filler(rng, 1, 50));
        }
      }
    }
    rec.caption = Join(parts, " ");
    rec.feature_ref = rec.id + ".xmrg";
    records.push_back(std::move(rec));
    features.push_back(GaussianFeatures(rng, spec.tokens, spec.dim));
  }

  AdapterShape shape;
  shape.vision_dim = spec.dim;
  shape.text_dim = spec.dim;
  shape.model_dim = spec.dim;
  shape.heads = 2;
  shape.query_tokens = 2;
  shape.hidden_dim = 2 * spec.dim;
  shape.out_dim = spec.dim;
  AdapterParams params = InitAdapterParams<float>(shape, rng.NextU64());

  Corpus corpus(std::move(records), std::make_shared<InMemoryFeatureSource>(std::move(features)));
  return RandomInstance{std::move(corpus),
                        EmbeddedQuery(Join(phrases, ", "), phrases, std::move(embeddings)),
                        std::move(params)};
}

std::vector<PairExample> MakePairDataset(const PairDatasetSpec &spec) {
  if (spec.pairs < 1 || spec.tokens < 1 || spec.vision_dim < 1 || spec.text_dim < 2) {
    throw UsageError("invalid pair dataset spec");
  }
  Rng rng(spec.seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.text_dim));
  std::vector<Mat<double>> maps;
  for (int l = 0; l < spec.tokens; ++l) {
    Mat<double> a(spec.text_dim, spec.vision_dim);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.Normal() * scale;
    maps.push_back(std::move(a));
  }
  std::vector<PairExample> out;
  out.reserve(static_cast<std::size_t>(spec.pairs));
  for (int p = 0; p < spec.pairs; ++p) {
    PairExample ex;
    ex.t = rng.UnitVector(static_cast<std::size_t>(spec.text_dim));
    ex.label = p;
    ex.x = FeatureMatrix(static_cast<std::uint32_t>(spec.tokens),
                         static_cast<std::uint32_t>(spec.vision_dim));
    Mat<double> t(1, spec.text_dim);
    for (int i = 0; i < spec.text_dim; ++i) t(0, i) = ex.t[static_cast<std::size_t>(i)];
    for (int l = 0; l < spec.tokens; ++l) {
      const Mat<double> row = t * maps[static_cast<std::size_t>(l)];
      for (int c = 0; c < spec.vision_dim; ++c) {
        ex.x.at(static_cast<std::size_t>(l), static_cast<std::size_t>(c)) =
            static_cast<float>(row(0, c) + spec.noise * rng.Normal());
      }
    }
    out.push_back(std::move(ex));
  }
  return out;
}

BenchInstance MakeBenchInstance(const BenchSpec &spec) {
  if (spec.records < 1 || spec.n < 1 || spec.num_queries < 1 || spec.dim < 2) {
    throw UsageError("invalid bench spec");
  }
  Rng rng(spec.seed);
  const std::size_t pool = static_cast<std::size_t>(spec.num_queries) * static_cast<std::size_t>(spec.n);
  std::vector<std::string> phrases;
  for (std::size_t k = 0; k < pool; ++k) {
    phrases.push_back("ba" + std::to_string(k) + " bb" + std::to_string(k));
  }

  std::vector<ImageRecord> records;
  std::vector<FeatureMatrix> features;
  records.reserve(spec.records);
  features.reserve(spec.records);
  for (std::size_t r = 0; r < spec.records; ++r) {
    ImageRecord rec;
    rec.id = Id("b", r);
    rec.caption = Filler(rng, 4, 2000);
    if (rng.Bernoulli(spec.phrase_rate)) {
      rec.caption += " " + phrases[rng.Below(pool)] + " " + Filler(rng, 2, 2000);
    }
    rec.feature_ref = rec.id + ".xmrg";
    records.push_back(std::move(rec));
    features.push_back(GaussianFeatures(rng, spec.tokens, spec.dim));
  }

  BenchInstance inst;
  for (int q = 0; q < spec.num_queries; ++q) {
    std::vector<std::string> qp;
    std::vector<std::vector<float>> embeddings;
    for (int i = 0; i < spec.n; ++i) {
      qp.push_back(phrases[static_cast<std::size_t>(q * spec.n + i)]);
      embeddings.push_back(rng.UnitVector(static_cast<std::size_t>(spec.dim)));
    }
    inst.queries.push_back(EmbeddedQuery(Join(qp, ", "), qp, std::move(embeddings)));
  }
  AdapterShape shape;
  shape.vision_dim = spec.dim;
  shape.text_dim = spec.dim;
  shape.model_dim = spec.dim;
  shape.heads = 2;
  shape.query_tokens = 2;
  shape.hidden_dim = 2 * spec.dim;
  shape.out_dim = spec.dim;
  inst.params = InitAdapterParams<float>(shape, rng.NextU64());
  inst.corpus = Corpus(std::move(records), std::make_shared<InMemoryFeatureSource>(std::move(features)));
  return inst;
}

}  // namespace xmrag
