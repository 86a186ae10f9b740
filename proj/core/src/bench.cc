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

#include "xmrag/bench.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "xmrag/dense.h"
#include "xmrag/error.h"
#include "xmrag/joint.h"
#include "xmrag/sparse.h"

namespace xmrag {

const char *BenchModeName(BenchMode mode) {
  switch (mode) {
    case BenchMode::kSparse:
      return "sparse";
    case BenchMode::kDense:
      return "dense";
    case BenchMode::kHybrid:
      return "hybrid";
  }
  return "unknown";
}

BenchMode ParseBenchMode(const std::string &name) {
  if (name == "sparse") return BenchMode::kSparse;
  if (name == "dense") return BenchMode::kDense;
  if (name == "hybrid") return BenchMode::kHybrid;
  throw UsageError("unknown bench mode \"" + name + "\"");
}

double Median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

BenchReport RunBench(const BenchOptions &options) {
  if (options.sizes.empty() || options.modes.empty()) {
    throw UsageError("bench needs at least one size and one mode");
  }
  using Clock = std::chrono::steady_clock;
  BenchReport report;
  for (std::size_t size : options.sizes) {
    BenchSpec spec = options.spec;
    spec.records = size;
    const BenchInstance inst = MakeBenchInstance(spec);
    const auto n = static_cast<std::uint64_t>(spec.n);
    std::vector<std::uint64_t> n_tilde;
    for (const auto &q : inst.queries) {
      n_tilde.push_back(NonzeroFilter(inst.corpus, q.texts()).size());
    }
    for (BenchMode mode : options.modes) {
      BenchRow row;
      row.mode = mode;
      row.records = size;
      row.n = spec.n;
      std::vector<double> micros;
      for (std::size_t qi = 0; qi < inst.queries.size(); ++qi) {
        const Query &q = inst.queries[qi];
        BenchQuery bq;
        bq.query = qi;
        bq.n_tilde = n_tilde[qi];
        const auto start = Clock::now();
        if (mode == BenchMode::kDense) {
          bq.forwards = RankDense(inst.corpus, q, inst.params, options.dense_k, options.jobs).forwards;
        } else {
          JointOptions jo;
          jo.dense = mode == BenchMode::kHybrid;
          jo.jobs = options.jobs;
          bq.forwards = JointRetrieve(inst.corpus, q, &inst.params, jo).counters.dense_forwards;
        }
        const double us = std::chrono::duration<double, std::micro>(Clock::now() - start).count();
        bq.micros = options.include_timing ? us : 0.0;
        micros.push_back(bq.micros);

        const std::string where = std::string(BenchModeName(mode)) + " N=" +
                                  std::to_string(size) + " query " + std::to_string(qi) + ": ";
        const std::uint64_t full = static_cast<std::uint64_t>(size) * n;
        if (mode == BenchMode::kSparse && bq.forwards != 0) {
          report.violations.push_back(where + "sparse ran " + std::to_string(bq.forwards) + " forwards");
        }
        if (mode == BenchMode::kHybrid) {
          if (bq.forwards > bq.n_tilde * n) {
            report.violations.push_back(where + "hybrid forwards exceed N~ * n");
          }
          if (bq.n_tilde < size && bq.forwards >= full) {
            report.violations.push_back(where + "hybrid forwards not below dense");
          }
        }
        if (mode == BenchMode::kDense && bq.forwards != full) {
          report.violations.push_back(where + "dense forwards differ from N * n");
        }
        row.queries.push_back(bq);
      }
      row.median_micros = Median(std::move(micros));
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

LatencyCheck CheckLatencyOrdering(const BenchReport &report, std::size_t records, double guard) {
  LatencyCheck c;
  c.guard = guard;
  bool seen[3] = {false, false, false};
  for (const auto &row : report.rows) {
    if (row.records != records) continue;
    const auto m = static_cast<int>(row.mode);
    seen[m] = true;
    (row.mode == BenchMode::kSparse ? c.sparse
     : row.mode == BenchMode::kDense ? c.dense
                                     : c.hybrid) = row.median_micros;
  }
  if (!seen[0] || !seen[1] || !seen[2]) {
    throw DataError("bench report lacks a mode at N=" + std::to_string(records));
  }
  c.ok = c.dense >= guard * c.hybrid && c.hybrid >= guard * c.sparse;
  return c;
}

nlohmann::ordered_json BenchReportJson(const BenchReport &report) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto &row : report.rows) {
    nlohmann::ordered_json qs = nlohmann::ordered_json::array();
    for (const auto &q : row.queries) {
      qs.push_back({{"query", q.query},
                    {"n_tilde", q.n_tilde},
                    {"dense_forwards", q.forwards},
                    {"micros", q.micros}});
    }
    rows.push_back({{"mode", BenchModeName(row.mode)},
                    {"N", row.records},
                    {"n", row.n},
                    {"median_micros", row.median_micros},
                    {"queries", std::move(qs)}});
  }
  return {{"rows", std::move(rows)}, {"violations", report.violations}};
}

std::string BenchReportTable(const BenchReport &report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-8s %10s %8s %14s %16s %14s\n", "mode", "N", "queries",
                "mean N~", "mean forwards", "median us");
  out << line;
  for (const auto &row : report.rows) {
    double nt = 0.0, fw = 0.0;
    for (const auto &q : row.queries) {
      nt += static_cast<double>(q.n_tilde);
      fw += static_cast<double>(q.forwards);
    }
    const double k = row.queries.empty() ? 1.0 : static_cast<double>(row.queries.size());
    std::snprintf(line, sizeof(line), "%-8s %10zu %8zu %14.1f %16.1f %14.1f\n",
                  BenchModeName(row.mode), row.records, row.queries.size(), nt / k, fw / k,
                  row.median_micros);
    out << line;
  }
  return out.str();
}

std::vector<std::filesystem::path> WriteBenchCsv(const BenchReport &report,
                                                 const std::filesystem::path &dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> paths;
  for (const auto &row : report.rows) {
    const auto path = dir / ("bench_" + std::string(BenchModeName(row.mode)) + "_" +
                             std::to_string(row.records) + ".csv");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << "query,n_tilde,dense_forwards,micros\n";
    for (const auto &q : row.queries) {
      out << q.query << ',' << q.n_tilde << ',' << q.forwards << ',' << q.micros << '\n';
    }
    if (!out) throw DataError("cannot write " + path.string());
    paths.push_back(path);
  }
  return paths;
}

}  // namespace xmrag
