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
#include <string>
#include <vector>

#include "xmrag/adapter.h"
#include "xmrag/corpus.h"
#include "xmrag/query.h"
#include "xmrag/random.h"
#include "xmrag/trainer.h"

namespace xmrag {

/*! Adapter whose output for zero-mean features is exactly the layer-normed
 *  subquery embedding.
 *
 *  d_v = d = d_t = d_out = dim, one head. P_v, P_t, W_V*, W_O* are the
 *  identity and W_Q*, W_K* are zero, so both attention stages average their
 *  values: stage 1 yields mean(X) on every token and stage 2 adds t. The MLP
 *  uses W1 = [I, -I], W2 = [I; -I] so that GELU(z) - GELU(-z) = z. For a
 *  feature matrix with zero column means and a zero-mean unit t, the result
 *  is t itself.
 */
AdapterParams IdentityAdapter(int dim, int query_tokens = 4);

//! Unit vector with zero coordinate mean (invariant under the identity
//! adapter's layer norm).
std::vector<float> ZeroMeanUnitVector(Rng &rng, int dim);

struct PlantSpec {
  int num_queries = 100;
  int n = 3;            //!< subqueries per query
  int records = 50;     //!< N per instance, truth included
  int dim = 16;         //!< d_t (and every adapter width)
  std::uint64_t seed = 0;
};

struct PlantedInstance {
  Corpus corpus;
  Query query;
  std::string truth_id;
};

/*! One instance per query. Subquery embeddings are zero-mean unit vectors;
 *  the truth record's features are the rows [t_1, -t_1, ..., t_n, -t_n]
 *  (zero column means) and its caption contains every subquery phrase.
 *  Distractors get Gaussian features and captions holding a strict subset
 *  of the phrases. Use with IdentityAdapter(spec.dim).
 */
std::vector<PlantedInstance> PlantCorpus(const PlantSpec &spec);

struct RandomInstanceSpec {
  int n = 3;
  int records = 100;
  int tokens = 3;     //!< L
  int dim = 8;        //!< d_v = d_t = adapter width
  //! Probability that a caption contains a given subquery phrase.
  double phrase_rate = 0.3;
  //! Probability that a caption is a scrambled bag of subquery words that
  //! shares tokens with the query without containing any phrase.
  double scramble_rate = 0.0;
  std::uint64_t seed = 0;
};

struct RandomInstance {
  Corpus corpus;
  Query query;
  AdapterParams params;  //!< randomly initialized adapter of matching shape
};

//! Random corpus with two-word subquery phrases sprinkled into captions,
//! Gaussian features and a random adapter. Duplicate satisfaction vectors
//! and dense near-ties are common by construction.
RandomInstance MakeRandomInstance(const RandomInstanceSpec &spec);

struct PairDatasetSpec {
  int pairs = 200;
  int tokens = 8;        //!< L
  int vision_dim = 32;
  int text_dim = 16;
  double noise = 0.05;
  std::uint64_t seed = 0;
};

/*! Aligned (features, embedding) pairs: every vision token is a fixed
 *  random linear map of the pair's embedding plus Gaussian noise. Each pair
 *  carries its own label.
 */
std::vector<PairExample> MakePairDataset(const PairDatasetSpec &spec);

struct BenchSpec {
  std::size_t records = 100000;
  int n = 3;
  int num_queries = 30;
  int tokens = 2;
  int dim = 8;
  //! Probability that a caption embeds one phrase drawn uniformly from the
  //! pool of num_queries * n phrases, so a single query sees
  //! N~/N close to phrase_rate / num_queries.
  double phrase_rate = 0.6;
  std::uint64_t seed = 0;
};

struct BenchInstance {
  Corpus corpus;
  std::vector<Query> queries;
  AdapterParams params;
};

BenchInstance MakeBenchInstance(const BenchSpec &spec);

}  // namespace xmrag
