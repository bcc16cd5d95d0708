// softcut: soft spectral clustering of the word types of a text corpus.
//
//   softcut run --input a.txt b.txt --clusters 4 --out out/
//   softcut validate --input a.txt --clusters 4

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "softcut/error.hpp"
#include "softcut/pipeline.hpp"

namespace {

// Exit codes.
constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;
constexpr int kInput = 3;
constexpr int kAnalysis = 4;

int exit_code(softcut::Errc code) {
  using softcut::Errc;
  switch (code) {
    case Errc::InvalidArgument:
    case Errc::QTooLarge:
    case Errc::TooFewValues: return kUsage;
    case Errc::InvalidEncoding:
    case Errc::EmptyInput:
    case Errc::AllTokensDropped:
    case Errc::Io: return kInput;
    default: return kAnalysis;
  }
}

struct CliOptions {
  std::vector<std::string> inputs;
  int clusters = 4;
  std::vector<int> axes{2, 3, 4};
  std::vector<int> scatter_axes{2, 3};
  std::string quantity = "conditional";
  int chi = 5;
  bool continuous = false;
  std::string punct = "drop";
  std::string circular = "on";
  bool strict = false;
  bool fold_case = false;
  bool split_paragraphs = false;
  double tol = 1e-8;
  int max_restarts = 2000;
  std::string solver = "auto";
  std::size_t top_n = 40;
  std::string out = "softcut-out";
  std::string formats = "html,svg,json,csv";
  bool dump_chain = false;
  bool timings = false;
};

void add_options(CLI::App& cmd, CliOptions& o) {
  cmd.set_config("--config", "", "Read options from a TOML/INI file; command-line flags take precedence");
  cmd.add_option("-i,--input", o.inputs, "Input text files (UTF-8); each file is one text")->expected(1, -1);
  cmd.add_option("-q,--clusters", o.clusters, "Number of spectral axes q")->capture_default_str();
  cmd.add_option("--axes", o.axes, "Three 1-based axes mapped to R,G,B")->delimiter(',')->expected(3)->capture_default_str();
  cmd.add_option("--quantity", o.quantity, "Colored quantity")
      ->check(CLI::IsMember({"conditional", "eigen", "posterior"}))
      ->capture_default_str();
  cmd.add_option("--chi", o.chi, "Color levels per channel")->capture_default_str();
  cmd.add_flag("--continuous", o.continuous, "Map values to intensity without binning");
  cmd.add_option("--punct", o.punct, "Punctuation handling")
      ->check(CLI::IsMember({"drop", "keep", "drop-figures"}))
      ->capture_default_str();
  cmd.add_option("--circular", o.circular, "Count each text's last->first adjacency")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  cmd.add_flag("--strict", o.strict, "Fail instead of restricting to the largest connected component");
  cmd.add_flag("--fold-case", o.fold_case, "Lowercase word types");
  cmd.add_flag("--split-paragraphs", o.split_paragraphs, "Treat blank-line separated paragraphs as separate texts");
  cmd.add_option("--tol", o.tol, "Relative eigen-residual tolerance")->capture_default_str();
  cmd.add_option("--max-restarts", o.max_restarts, "Iterative solver restart budget")->capture_default_str();
  cmd.add_option("--solver", o.solver, "Eigensolver strategy")
      ->check(CLI::IsMember({"auto", "dense", "iterative"}))
      ->capture_default_str();
  cmd.add_option("--top-n", o.top_n, "Types shown in the scatter plot")->capture_default_str();
  cmd.add_option("--scatter-axes", o.scatter_axes, "Two 1-based axes for the scatter plot")
      ->delimiter(',')
      ->expected(2)
      ->capture_default_str();
  cmd.add_option("-o,--out", o.out, "Output directory")->capture_default_str();
  cmd.add_option("--format", o.formats, "Comma-separated subset of html,svg,json,csv")->capture_default_str();
  cmd.add_flag("--dump-chain", o.dump_chain, "Also write counts and W as chain.txt");
  cmd.add_flag("--timings", o.timings, "Record stage timings in report.json");
}

softcut::pipeline::RunConfig to_config(const CliOptions& o) {
  using namespace softcut;
  pipeline::RunConfig config;
  for (const auto& p : o.inputs) config.inputs.emplace_back(p);
  config.analysis.clusters = o.clusters;
  config.analysis.circular = o.circular == "on";
  config.analysis.strict_connectivity = o.strict;
  config.analysis.filter = o.punct == "keep"           ? corpus::FilterPolicy::KeepAll
                           : o.punct == "drop-figures" ? corpus::FilterPolicy::DropPunctuationAndFigures
                                                       : corpus::FilterPolicy::DropPunctuation;
  config.analysis.solver.tol = o.tol;
  config.analysis.solver.max_restarts = o.max_restarts;
  config.analysis.solver.strategy = o.solver == "dense"       ? spectral::SolverStrategy::Dense
                                    : o.solver == "iterative" ? spectral::SolverStrategy::Iterative
                                                              : spectral::SolverStrategy::Auto;
  config.corpus.tokenizer.fold_case = o.fold_case;
  config.corpus.split_paragraphs = o.split_paragraphs;
  config.color.axes = {o.axes.at(0), o.axes.at(1), o.axes.at(2)};
  config.color.quantity = render::parse_quantity(o.quantity);
  config.color.chi = o.chi;
  config.color.continuous = o.continuous;
  config.scatter_axes = {o.scatter_axes.at(0), o.scatter_axes.at(1)};
  config.top_n = o.top_n;
  config.out_dir = o.out;
  config.formats = pipeline::parse_formats(o.formats);
  config.dump_chain = o.dump_chain;
  config.timings = o.timings;
  return config;
}

void print_checks(const std::vector<softcut::pipeline::Check>& checks, std::ostream& out) {
  for (const auto& c : checks) {
    out << softcut::pipeline::status_name(c.status) << "  " << c.name << "  value=" << c.value
        << " threshold=" << c.threshold;
    if (!c.detail.empty()) out << "  (" << c.detail << ")";
    out << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"softcut - soft spectral clustering of word types from a bigram Markov chain"};
  app.require_subcommand(1);
  // Options live on the parent so a config file applies to either
  // subcommand; fallthrough lets them follow the subcommand name.
  CliOptions opts;
  add_options(app, opts);
  const std::string footer = "Options are shared by both subcommands; see softcut --help.";
  auto* run = app.add_subcommand("run", "Analyze a corpus and write renders and tables")->fallthrough()->footer(footer);
  app.add_subcommand("validate", "Analyze a corpus and print the invariant checks")->fallthrough()->footer(footer);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (run->parsed()) {
      const auto config = to_config(opts);
      const auto result = softcut::pipeline::run_pipeline(config);
      const auto& spectral = result.report["spectral"];
      std::cout << "types analyzed: " << result.report["components"]["v"] << " (of "
                << result.report["corpus"]["types"] << "), tokens: " << result.report["components"]["n"] << '\n'
                << "lambdas: " << spectral["lambdas"].dump() << '\n'
                << "nu(Y) = " << spectral["nu"] << ", 2*sum(lambda) = " << spectral["two_sum_lambda"] << '\n';
      for (const auto& path : result.artifacts) std::cout << "wrote " << path.string() << '\n';
      if (softcut::pipeline::any_failed(result.checks)) {
        std::cerr << "invariant checks failed:\n";
        print_checks(result.checks, std::cerr);
        return kCheckFailed;
      }
      return kOk;
    }
    const auto config = to_config(opts);
    const auto result = softcut::pipeline::validate(config);
    print_checks(result.checks, std::cout);
    return result.failed ? kCheckFailed : kOk;
  } catch (const softcut::Error& e) {
    std::cerr << "softcut: " << softcut::errc_name(e.code()) << ": " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "softcut: " << e.what() << '\n';
    return kAnalysis;
  }
}
