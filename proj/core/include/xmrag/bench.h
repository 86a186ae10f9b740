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
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "xmrag/synthetic.h"

namespace xmrag {

enum class BenchMode { kSparse, kDense, kHybrid };

const char *BenchModeName(BenchMode mode);

//! Parses "sparse", "dense" or "hybrid"; throws UsageError otherwise.
BenchMode ParseBenchMode(const std::string &name);

struct BenchQuery {
  std::size_t query = 0;
  std::uint64_t n_tilde = 0;
  std::uint64_t forwards = 0;
  double micros = 0.0;
};

struct BenchRow {
  BenchMode mode = BenchMode::kSparse;
  std::size_t records = 0;
  int n = 0;
  std::vector<BenchQuery> queries;
  double median_micros = 0.0;
};

struct BenchOptions {
  std::vector<std::size_t> sizes{100000};
  std::vector<BenchMode> modes{BenchMode::kSparse, BenchMode::kDense, BenchMode::kHybrid};
  //! Template for every corpus; `records` is replaced by each size.
  BenchSpec spec;
  //! Results kept by the pure-dense ranking.
  std::size_t dense_k = 10;
  int jobs = 1;
  bool include_timing = true;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  //! One message per violated forward-count relation; empty when all hold.
  std::vector<std::string> violations;
};

/*! Runs every query of a synthetic corpus per size in every mode: sparse is
 *  JointRetrieve with dense scoring off, hybrid is JointRetrieve, dense is
 *  RankDense over all records. Checks per query that sparse runs 0
 *  forwards, hybrid at most N~ * n, dense exactly N * n, and hybrid fewer
 *  than dense whenever N~ < N.
 */
BenchReport RunBench(const BenchOptions &options);

double Median(std::vector<double> values);

struct LatencyCheck {
  double sparse = 0.0, hybrid = 0.0, dense = 0.0;  //!< median micros
  double guard = 2.0;
  //! dense >= guard * hybrid and hybrid >= guard * sparse.
  bool ok = false;
};

//! Compares median latencies of the three modes at `records`. Throws
//! DataError when a mode is missing from the report.
LatencyCheck CheckLatencyOrdering(const BenchReport &report, std::size_t records,
                                  double guard = 2.0);

nlohmann::ordered_json BenchReportJson(const BenchReport &report);

std::string BenchReportTable(const BenchReport &report);

//! Writes dir/bench_<mode>_<N>.csv for every row; returns the paths.
std::vector<std::filesystem::path> WriteBenchCsv(const BenchReport &report,
                                                 const std::filesystem::path &dir);

}  // namespace xmrag
