#pragma once

// End-to-end driver: corpus -> chain -> embedding -> soft clustering ->
// artifacts, plus the invariant checks shared by `run` and `validate`.

#include <json.hpp>

#include <array>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "softcut/chain.hpp"
#include "softcut/corpus.hpp"
#include "softcut/render.hpp"
#include "softcut/softcluster.hpp"
#include "softcut/spectral.hpp"

namespace softcut::pipeline {

enum class Format { Html, Svg, Json, Csv };

std::string_view format_name(Format format) noexcept;
/// Parses a comma-separated list such as "html,svg,json,csv".
std::set<Format> parse_formats(std::string_view list);

struct AnalysisOptions {
  int clusters = 4;
  corpus::FilterPolicy filter = corpus::FilterPolicy::DropPunctuation;
  bool circular = true;
  bool strict_connectivity = false;
  spectral::SolverOptions solver;
};

struct RunConfig {
  std::vector<std::filesystem::path> inputs;
  corpus::CorpusConfig corpus;
  AnalysisOptions analysis;
  render::ColorSpec color;
  std::array<int, 2> scatter_axes{2, 3};
  std::size_t top_n = 40;
  std::filesystem::path out_dir = "softcut-out";
  std::set<Format> formats{Format::Html, Format::Svg, Format::Json, Format::Csv};
  bool dump_chain = false;
  bool timings = false;

  /// Throws Error{InvalidArgument} on q < 1, chi < 2, bad axes or no inputs.
  void validate() const;
  nlohmann::json to_json() const;
};

struct Analysis {
  corpus::TokenStream stream;          // filtered, with dropped tokens kept
  corpus::TypeTable table;             // every retained type
  chain::ComponentMap components;      // over the full weight graph
  std::vector<corpus::TypeId> analyzed; // global ids of the analyzed component
  corpus::TypeTable analyzed_table;    // local ids 0..v'-1
  chain::BigramChain chain;            // restricted to the analyzed component
  spectral::SpectralEmbedding embedding;
  soft::SoftClustering soft;
  double nu = 0.0;
  soft::HardPartition argmax;          // compacted (no empty clusters)
  double hard_mnc = 0.0;
  Eigen::VectorXd escape;
  soft::SoftEscapeReport soft_escape;
};

/// Runs every numeric stage on an already tokenized corpus.
/// Throws Error{Disconnected} under strict connectivity, Error{QTooLarge}, ...
Analysis analyze(const corpus::TokenStream& raw, const AnalysisOptions& options);

enum class CheckStatus { Pass, Fail, ExpectedFail, Info, Skip };

std::string_view status_name(CheckStatus status) noexcept;

struct Check {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

/// Invariant suite over a finished analysis.
std::vector<Check> run_checks(const Analysis& analysis, const AnalysisOptions& options);

bool any_failed(const std::vector<Check>& checks);

nlohmann::json checks_to_json(const std::vector<Check>& checks);

/// Deterministic summary of an analysis (no timings).
nlohmann::json analysis_report(const Analysis& analysis);

struct RunResult {
  nlohmann::json report;
  std::vector<Check> checks;
  std::vector<std::filesystem::path> artifacts;
};

/// Reads inputs, analyzes, renders and writes every requested artifact.
RunResult run_pipeline(const RunConfig& config);

struct ValidationResult {
  std::vector<Check> checks;
  bool failed = false;
};

/// Runs the analysis and invariant suite without writing renders. Analysis
/// errors (e.g. disconnected under the strict flag) become failed checks.
ValidationResult validate(const RunConfig& config);

// Artifact writers, exposed for tests.
std::string types_csv(const Analysis& analysis);
std::string embedding_csv(const Analysis& analysis);
nlohmann::json embedding_json(const Analysis& analysis);
std::string render_html(const Analysis& analysis, const render::ColorSpec& spec);
std::string render_scatter(const Analysis& analysis, const render::ColorSpec& spec, std::array<int, 2> axes,
                           std::size_t top_n);
std::string colors_csv(const Analysis& analysis, const render::ColorSpec& spec);

}  // namespace softcut::pipeline
