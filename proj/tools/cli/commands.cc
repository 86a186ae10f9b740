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

#include "commands.h"

#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "xmrag/adapter_io.h"
#include "xmrag/bench.h"
#include "xmrag/corpus.h"
#include "xmrag/error.h"
#include "xmrag/eval.h"
#include "xmrag/generation.h"
#include "xmrag/joint.h"
#include "xmrag/query.h"
#include "xmrag/report.h"

namespace xmrag::cli {

namespace {

// Command-line values; unset optionals leave the config file value alone.
struct Flags {
  std::string config_file;
  std::string log_level = "warn";
  std::optional<int> jobs;
  std::optional<std::string> manifest, adapter, embeddings, decomposer, llm_replay,
      llm_endpoint, llm_model, mllm_replay, mllm_endpoint, mllm_model;
  std::optional<double> beta;
  std::optional<int> grid;
  std::optional<std::uint64_t> seed;
  bool no_support_vectors = false;
  bool strip_plurals = false;
  bool offline = false;
  bool sparse_only = false;
  bool no_timing = false;
  std::string query;
  std::vector<std::string> subqueries;
  std::string out_path;
  std::string format = "json";
};

EngineConfig ResolveConfig(const Flags &f, const EnvLookup &env) {
  EngineConfig c;
  if (!f.config_file.empty()) ApplyConfigFile(f.config_file, c);
  if (f.jobs) c.jobs = *f.jobs;
  if (f.manifest) c.manifest = *f.manifest;
  if (f.adapter) c.adapter = *f.adapter;
  if (f.embeddings) c.embeddings = *f.embeddings;
  if (f.decomposer) c.decomposer = *f.decomposer;
  if (f.llm_replay) c.llm_replay = *f.llm_replay;
  if (f.llm_endpoint) c.llm.endpoint = *f.llm_endpoint;
  if (f.llm_model) c.llm.model = *f.llm_model;
  if (f.mllm_replay) c.mllm_replay = *f.mllm_replay;
  if (f.mllm_endpoint) c.mllm.endpoint = *f.mllm_endpoint;
  if (f.mllm_model) c.mllm.model = *f.mllm_model;
  if (f.beta) c.beta = *f.beta;
  if (f.grid) c.grid_resolution = *f.grid;
  if (f.seed) c.seed = *f.seed;
  if (f.no_support_vectors) c.support_vectors = false;
  if (f.strip_plurals) c.strip_plurals = true;
  if (f.offline) c.offline = true;
  ApplyEnv(env, c);
  c.Validate();
  return c;
}

MatchOptions Matching(const EngineConfig &c) {
  MatchOptions o;
  o.strip_plural = c.strip_plurals;
  return o;
}

std::unique_ptr<LlmClient> MakeLlmClient(const EngineConfig &c) {
  if (!c.llm_replay.empty()) {
    return std::make_unique<ReplayLlmClient>(ReplayLlmClient::FromFile(c.llm_replay));
  }
  if (c.offline) throw UsageError("--offline allows the LLM decomposer only with a replay file");
  if (c.llm.endpoint.empty()) throw UsageError("the LLM decomposer needs an endpoint or a replay file");
  return std::make_unique<HttpLlmClient>(c.llm);
}

std::vector<Subquery> Decompose(const Flags &f, const EngineConfig &c) {
  if (!f.subqueries.empty()) {
    std::vector<Subquery> subs;
    for (const auto &s : f.subqueries) subs.push_back(Subquery{s, {}});
    return subs;
  }
  if (c.decomposer == "llm") {
    auto client = MakeLlmClient(c);
    return DecomposeWithLlm(f.query, *client);
  }
  return DecomposeRuleBased(f.query);
}

struct Retrieval {
  Corpus corpus;
  std::optional<Query> query;
  std::optional<AdapterParams> params;
  ParetoResult result;
};

Retrieval Retrieve(const Flags &f, const EngineConfig &c, std::ostream &err) {
  if (c.manifest.empty()) throw UsageError("a corpus manifest is required (--manifest)");
  Retrieval r;
  const MatchOptions matching = Matching(c);
  Query query(f.query, Decompose(f, c), matching);
  const bool dense = !c.adapter.empty() && !f.sparse_only;
  if (dense) {
    if (c.embeddings.empty()) throw UsageError("--adapter needs --embeddings");
    query = AttachEmbeddings(query, std::filesystem::path(c.embeddings));
    r.params = LoadAdapter(c.adapter);
  }
  r.corpus = LoadCorpus(c.manifest, matching);
  r.query = std::move(query);

  JointOptions options;
  options.beta = c.beta;
  options.grid_resolution = c.grid_resolution;
  options.grid.support_vectors = c.support_vectors;
  options.dense = dense;
  options.jobs = c.jobs;
  r.result = JointRetrieve(r.corpus, *r.query, r.params ? &*r.params : nullptr, options);
  if (c.beta && *c.beta > r.result.bound.loose) {
    err << "warning: beta " << *c.beta << " exceeds beta_max " << r.result.bound.loose
        << "; dominated images may be returned\n";
  }
  if (r.result.no_lexical_match) err << "no lexical match\n";
  return r;
}

void WriteFile(const std::filesystem::path &path, const std::string &bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()))) {
    throw DataError("cannot write " + path.string());
  }
}

int CmdIndex(const Flags &f, const EngineConfig &c, std::ostream &out, std::ostream &err) {
  if (c.manifest.empty()) throw UsageError("a corpus manifest is required (--manifest)");
  const Corpus corpus = LoadCorpus(c.manifest, Matching(c));
  const std::string summary = IndexSummaryJson(corpus).dump(2) + "\n";
  if (!f.out_path.empty()) WriteFile(f.out_path, summary);
  out << summary;
  err << "indexed " << corpus.size() << " records\n";
  return 0;
}

int CmdDecompose(const Flags &f, const EngineConfig &c, std::ostream &out) {
  const Query query(f.query, Decompose(f, c), Matching(c));
  nlohmann::ordered_json j{{"query", query.raw()}, {"subqueries", query.texts()}};
  out << j.dump(2) << "\n";
  return 0;
}

int CmdRetrieve(const Flags &f, const EngineConfig &c, std::ostream &out, std::ostream &err) {
  const Retrieval r = Retrieve(f, c, err);
  ReportOptions ro;
  ro.include_timing = !f.no_timing;
  out << RetrievalReportJson(*r.query, r.result, ro).dump(2) << "\n";
  return 0;
}

int CmdGenerate(const Flags &f, const EngineConfig &c, std::ostream &out, std::ostream &err) {
  const Retrieval r = Retrieve(f, c, err);
  if (r.result.entries.empty()) {
    err << "no retrieved image satisfies any subquery; nothing to generate\n";
    return kExitNothingToGenerate;
  }
  const GenerationPrompt prompt = BuildPrompt(*r.query, r.result, &r.corpus);
  if (c.offline) {
    out << prompt.rendered << "\n";
    return 0;
  }
  std::unique_ptr<MllmClient> client;
  if (!c.mllm_replay.empty()) {
    client = std::make_unique<ReplayMllmClient>(ReplayMllmClient::FromFile(c.mllm_replay));
  } else if (!c.mllm.endpoint.empty()) {
    client = std::make_unique<HttpMllmClient>(c.mllm);
  } else {
    throw UsageError("generate needs --offline, --mllm-replay or an image endpoint");
  }
  if (f.out_path.empty()) throw UsageError("generate needs --out for the image file");
  GenerateOptions go;
  go.model = c.mllm.model;
  go.max_reference_images = c.mllm.max_reference_images;
  const GenerationOutcome outcome = GenerateImage(prompt, client.get(), go);
  WriteFile(f.out_path, *outcome.image_bytes);
  WriteFile(f.out_path + ".json", ProvenanceJson(outcome.provenance) + "\n");
  out << f.out_path << "\n";
  return 0;
}

struct EvalFlags {
  std::string suite = "planted";
  int queries = 100;
  int n = 3;
  int records = 50;
  int dim = 16;
  int corpora = 200;
  std::size_t k = 3;
};

int CmdEval(const Flags &f, const EvalFlags &e, const EngineConfig &c, std::ostream &out) {
  nlohmann::ordered_json j;
  std::vector<EvalReport> reports;
  if (e.suite == "planted") {
    PlantSpec spec;
    spec.num_queries = e.queries;
    spec.n = e.n;
    spec.records = e.records;
    spec.dim = e.dim;
    spec.seed = c.seed;
    reports = EvaluatePlanted(spec, c.jobs);
  } else if (e.suite == "coverage") {
    JointOptions options;
    options.jobs = c.jobs;
    options.grid_resolution = c.grid_resolution;
    options.grid.support_vectors = c.support_vectors;
    options.beta = c.beta;
    const CoverageComparison cmp = CompareCoverage(CoverageSuiteSpec(c.seed), e.corpora, e.k, options);
    reports = {cmp.joint, cmp.baseline};
    j["at_least_fraction"] = cmp.at_least_fraction;
    j["strictly_greater_fraction"] = cmp.strictly_greater_fraction;
  } else {
    throw UsageError("unknown eval suite \"" + e.suite + "\"");
  }
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto &r : reports) arr.push_back(EvalReportJson(r));
  j["reports"] = arr;
  if (!f.out_path.empty()) {
    std::filesystem::create_directories(f.out_path);
    for (const auto &r : reports) {
      WriteFile(std::filesystem::path(f.out_path) / ("eval_" + r.metric + ".json"),
                EvalReportJson(r).dump(2) + "\n");
    }
  }
  if (f.format == "table") {
    out << EvalReportTable(reports);
  } else {
    out << j.dump(2) << "\n";
  }
  return 0;
}

struct BenchFlags {
  std::vector<std::size_t> sizes{100000};
  std::vector<std::string> modes{"sparse", "dense", "hybrid"};
  BenchSpec spec;
  std::size_t dense_k = 10;
  bool check_latency = false;
};

int CmdBench(const Flags &f, const BenchFlags &b, const EngineConfig &c, std::ostream &out,
             std::ostream &err) {
  BenchOptions options;
  options.sizes = b.sizes;
  options.modes.clear();
  for (const auto &m : b.modes) options.modes.push_back(ParseBenchMode(m));
  options.spec = b.spec;
  options.spec.seed = c.seed;
  options.dense_k = b.dense_k;
  options.include_timing = !f.no_timing;
  // Timing runs pin one worker; counter-only runs may use more.
  options.jobs = options.include_timing ? 1 : c.jobs;
  const BenchReport report = RunBench(options);

  nlohmann::ordered_json j = BenchReportJson(report);
  bool ok = report.violations.empty();
  if (b.check_latency) {
    for (std::size_t size : b.sizes) {
      const LatencyCheck lc = CheckLatencyOrdering(report, size);
      j["latency"].push_back({{"N", size},
                              {"sparse_median_micros", lc.sparse},
                              {"hybrid_median_micros", lc.hybrid},
                              {"dense_median_micros", lc.dense},
                              {"guard", lc.guard},
                              {"ok", lc.ok}});
      if (!lc.ok) {
        err << "latency ordering sparse < hybrid < dense not met at N=" << size << "\n";
        ok = false;
      }
    }
  }
  if (!f.out_path.empty()) {
    WriteBenchCsv(report, f.out_path);
    WriteFile(std::filesystem::path(f.out_path) / "bench.json", j.dump(2) + "\n");
  }
  if (f.format == "table") {
    out << BenchReportTable(report);
  } else {
    out << j.dump(2) << "\n";
  }
  for (const auto &v : report.violations) err << "violation: " << v << "\n";
  return ok ? 0 : static_cast<int>(ErrorKind::kData);
}

// Routes the default logger to `err` until destroyed, then restores the
// previous one so no logger outlives the stream.
class ScopedLogging {
 public:
  ScopedLogging(const std::string &level, std::ostream &err)
      : previous_(spdlog::default_logger()) {
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
    auto logger = std::make_shared<spdlog::logger>("xmrag", std::move(sink));
    logger->set_pattern("[%l] %v");
    logger->set_level(spdlog::level::from_str(level));
    spdlog::set_default_logger(std::move(logger));
  }
  ~ScopedLogging() { spdlog::set_default_logger(previous_); }
  ScopedLogging(const ScopedLogging &) = delete;
  ScopedLogging &operator=(const ScopedLogging &) = delete;

 private:
  std::shared_ptr<spdlog::logger> previous_;
};

}  // namespace

int RunCli(int argc, const char *const *argv, std::ostream &out, std::ostream &err,
           const EnvLookup &env) {
  CLI::App app{"Multi-objective image retrieval and generation prompts", "xmrag"};
  app.require_subcommand(1);
  Flags f;
  app.add_option("--config", f.config_file, "JSON config file (flags and env override it)");
  app.add_option("--log-level", f.log_level, "Log level")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}));
  app.add_option("--jobs", f.jobs, "Worker threads (default: available parallelism)");
  app.add_option("--seed", f.seed, "Seed for generated data");

  auto add_manifest = [&](CLI::App *cmd) {
    cmd->add_option("--manifest", f.manifest, "Corpus manifest (JSON Lines)");
    cmd->add_flag("--strip-plurals", f.strip_plurals, "Drop a trailing 's' from tokens");
  };
  auto add_decompose = [&](CLI::App *cmd) {
    cmd->add_option("query", f.query, "Query text")->required();
    cmd->add_option("--subquery", f.subqueries, "Explicit subquery (repeatable)");
    cmd->add_option("--decomposer", f.decomposer, "rule or llm");
    cmd->add_option("--llm-replay", f.llm_replay, "Canned LLM completions (JSON)");
    cmd->add_option("--llm-endpoint", f.llm_endpoint, "Chat-completions URL");
    cmd->add_option("--llm-model", f.llm_model, "LLM model name");
    cmd->add_flag("--offline", f.offline, "Forbid network access");
  };
  auto add_retrieve = [&](CLI::App *cmd) {
    add_manifest(cmd);
    add_decompose(cmd);
    cmd->add_option("--adapter", f.adapter, "Adapter params file; enables dense scoring");
    cmd->add_option("--embeddings", f.embeddings, "XMRG file, one row per subquery");
    cmd->add_option("--beta", f.beta, "Dense weight (default 0.9 * beta_max)");
    cmd->add_option("--grid", f.grid, "Simplex grid resolution m");
    cmd->add_flag("--no-support-vectors", f.no_support_vectors,
                  "Use only the composition grid");
    cmd->add_flag("--sparse-only", f.sparse_only, "Skip dense scoring");
  };

  auto *index = app.add_subcommand("index", "Validate a manifest and print a summary");
  add_manifest(index);
  index->add_option("--out", f.out_path, "Also write the summary here");

  auto *decompose = app.add_subcommand("decompose", "Split a query into subqueries");
  add_decompose(decompose);

  auto *retrieve = app.add_subcommand("retrieve", "Print the retrieval report");
  add_retrieve(retrieve);
  retrieve->add_flag("--no-timing", f.no_timing, "Write 0 for wall-clock fields");

  auto *generate = app.add_subcommand("generate", "Build the prompt and call the generator");
  add_retrieve(generate);
  generate->add_option("--mllm-replay", f.mllm_replay, "Image file returned by a replay client");
  generate->add_option("--mllm-endpoint", f.mllm_endpoint, "Image generation URL");
  generate->add_option("--mllm-model", f.mllm_model, "Image model name");
  generate->add_option("--out", f.out_path, "Image output path");

  EvalFlags e;
  auto *eval = app.add_subcommand("eval", "Planted recall or coverage suites");
  eval->add_option("--suite", e.suite, "planted or coverage")
      ->check(CLI::IsMember({"planted", "coverage"}));
  eval->add_option("--queries", e.queries, "Planted queries");
  eval->add_option("--n", e.n, "Subqueries per planted query");
  eval->add_option("--records", e.records, "Records per planted instance");
  eval->add_option("--dim", e.dim, "Embedding width of planted data");
  eval->add_option("--corpora", e.corpora, "Random corpora for the coverage suite");
  eval->add_option("--k", e.k, "Baseline top-k");
  eval->add_option("--grid", f.grid, "Simplex grid resolution m");
  eval->add_option("--out", f.out_path, "Directory for per-metric JSON files");
  eval->add_option("--format", f.format, "json or table")->check(CLI::IsMember({"json", "table"}));

  BenchFlags b;
  auto *bench = app.add_subcommand("bench", "Forward counts and latency per retrieval mode");
  bench->add_option("--sizes", b.sizes, "Corpus sizes")->delimiter(',');
  bench->add_option("--modes", b.modes, "sparse, dense, hybrid")->delimiter(',');
  bench->add_option("--queries", b.spec.num_queries, "Queries per corpus");
  bench->add_option("--n", b.spec.n, "Subqueries per query");
  bench->add_option("--tokens", b.spec.tokens, "Vision tokens per image");
  bench->add_option("--dim", b.spec.dim, "Feature and embedding width");
  bench->add_option("--phrase-rate", b.spec.phrase_rate, "Share of captions holding a phrase");
  bench->add_option("--dense-k", b.dense_k, "Results kept by dense ranking");
  bench->add_flag("--check-latency", b.check_latency, "Require sparse < hybrid < dense (2x)");
  bench->add_flag("--no-timing", f.no_timing, "Write 0 for wall-clock fields");
  bench->add_option("--out", f.out_path, "Directory for CSV and JSON output");
  bench->add_option("--format", f.format, "json or table")->check(CLI::IsMember({"json", "table"}));

  app.fallthrough();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &pe) {
    const int code = app.exit(pe, out, err);
    return code == 0 ? 0 : static_cast<int>(ErrorKind::kUsage);
  }

  const ScopedLogging logging(f.log_level, err);
  try {
    const EngineConfig c = ResolveConfig(f, env);
    if (*index) return CmdIndex(f, c, out, err);
    if (*decompose) return CmdDecompose(f, c, out);
    if (*retrieve) return CmdRetrieve(f, c, out, err);
    if (*generate) return CmdGenerate(f, c, out, err);
    if (*eval) return CmdEval(f, e, c, out);
    if (*bench) return CmdBench(f, b, c, out, err);
  } catch (const CompletionParseError &ex) {
    err << "error: " << ex.what() << "\ncompletion was:\n" << ex.completion() << "\n";
    return static_cast<int>(ex.kind());
  } catch (const Error &ex) {
    err << "error: " << ex.what() << "\n";
    return static_cast<int>(ex.kind());
  } catch (const std::filesystem::filesystem_error &ex) {
    err << "error: " << ex.what() << "\n";
    return static_cast<int>(ErrorKind::kData);
  }
  return static_cast<int>(ErrorKind::kUsage);
}

}  // namespace xmrag::cli
