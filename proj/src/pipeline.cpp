#include "softcut/pipeline.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "softcut/error.hpp"

namespace softcut::pipeline {

namespace {

std::string number(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

std::string_view policy_name(corpus::FilterPolicy policy) {
  switch (policy) {
    case corpus::FilterPolicy::KeepAll: return "keep";
    case corpus::FilterPolicy::DropPunctuation: return "drop";
    case corpus::FilterPolicy::DropPunctuationAndFigures: return "drop-figures";
  }
  return "unknown";
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  out << contents;
  if (!out) throw Error(Errc::Io, "failed writing " + path.string());
}

const Eigen::MatrixXd& quantity_matrix(const Analysis& analysis, render::Quantity quantity) {
  switch (quantity) {
    case render::Quantity::Conditional: return analysis.soft.ytilde;
    case render::Quantity::RawEigen: return analysis.embedding.Y;
    case render::Quantity::Posterior: return analysis.soft.posteriors;
  }
  return analysis.soft.ytilde;
}

std::vector<render::TypeColor> type_colors(const Analysis& analysis, const render::ColorSpec& spec) {
  spec.validate(analysis.embedding.q());
  const auto channels = render::select_channels(quantity_matrix(analysis, spec.quantity), spec.axes);
  if (spec.continuous) return render::colorize_continuous(channels, spec.value_range());
  return render::colorize(channels, render::build_bin_map(channels, spec.chi));
}

Check judge(std::string name, double value, double threshold, bool expected_fail = false, std::string detail = {}) {
  Check check{std::move(name), CheckStatus::Pass, value, threshold, std::move(detail)};
  if (!(value <= threshold)) check.status = expected_fail ? CheckStatus::ExpectedFail : CheckStatus::Fail;
  return check;
}

}  // namespace

std::string_view format_name(Format format) noexcept {
  switch (format) {
    case Format::Html: return "html";
    case Format::Svg: return "svg";
    case Format::Json: return "json";
    case Format::Csv: return "csv";
  }
  return "unknown";
}

std::set<Format> parse_formats(std::string_view list) {
  std::set<Format> out;
  while (!list.empty()) {
    const auto comma = list.find(',');
    const auto item = list.substr(0, comma);
    if (item == "html") out.insert(Format::Html);
    else if (item == "svg") out.insert(Format::Svg);
    else if (item == "json") out.insert(Format::Json);
    else if (item == "csv") out.insert(Format::Csv);
    else if (!item.empty()) throw Error(Errc::InvalidArgument, "unknown format '" + std::string(item) + "'");
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  return out;
}

void RunConfig::validate() const {
  if (inputs.empty()) throw Error(Errc::InvalidArgument, "at least one input file is required");
  if (analysis.clusters < 1) throw Error(Errc::InvalidArgument, "clusters must be at least 1");
  if (formats.contains(Format::Html) || formats.contains(Format::Csv)) color.validate(analysis.clusters);
  if (formats.contains(Format::Svg)) {
    for (int axis : scatter_axes) {
      if (axis < 1 || axis > analysis.clusters) {
        throw Error(Errc::InvalidArgument, "scatter axis " + std::to_string(axis) + " outside 1.." +
                                               std::to_string(analysis.clusters));
      }
    }
    if (top_n < 1) throw Error(Errc::InvalidArgument, "top-n must be at least 1");
  }
  if (analysis.solver.tol <= 0) throw Error(Errc::InvalidArgument, "solver tolerance must be positive");
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  std::vector<std::string> paths;
  for (const auto& p : inputs) paths.push_back(p.string());
  j["inputs"] = paths;
  j["clusters"] = analysis.clusters;
  j["punct"] = policy_name(analysis.filter);
  j["circular"] = analysis.circular;
  j["strict_connectivity"] = analysis.strict_connectivity;
  j["fold_case"] = corpus.tokenizer.fold_case;
  j["split_paragraphs"] = corpus.split_paragraphs;
  j["solver"] = {{"tol", analysis.solver.tol},
                 {"max_restarts", analysis.solver.max_restarts},
                 {"dense_limit", analysis.solver.dense_limit},
                 {"strategy", spectral::strategy_name(analysis.solver.strategy)}};
  j["color"] = {{"axes", color.axes},
                {"quantity", render::quantity_name(color.quantity)},
                {"chi", color.chi},
                {"continuous", color.continuous}};
  j["scatter_axes"] = scatter_axes;
  j["top_n"] = top_n;
  std::vector<std::string_view> fmts;
  for (auto f : formats) fmts.push_back(format_name(f));
  j["formats"] = fmts;
  return j;
}

Analysis analyze(const corpus::TokenStream& raw, const AnalysisOptions& options) {
  Analysis a;
  a.stream = corpus::filter_tokens(raw, options.filter);
  a.table = corpus::build_type_table(a.stream);
  const auto counts = chain::count_bigrams(a.stream, a.table, options.circular);
  const auto full = chain::symmetrize(counts);
  a.components = chain::connected_components(full.W);
  if (a.components.count() > 1 && options.strict_connectivity) {
    throw Error(Errc::Disconnected,
                "corpus chain has " + std::to_string(a.components.count()) + " connected components");
  }
  a.analyzed = a.components.members(a.components.largest());
  a.analyzed_table = a.table.subset(a.analyzed);
  a.chain = chain::BigramChain::build(a.components.count() > 1 ? chain::restrict_counts(counts, a.analyzed) : counts);

  a.embedding = spectral::solve_embedding(a.chain.W, a.chain.degrees, options.clusters, options.solver);
  a.soft = soft::soft_cluster(a.embedding, a.chain.degrees, a.chain.pi);
  a.nu = spectral::relaxed_objective(a.chain.W, a.embedding.Y);
  a.argmax = soft::argmax_assignment(a.soft.posteriors).compacted();
  a.hard_mnc = soft::hard_mnc(a.argmax, a.chain.W, a.chain.degrees);
  a.escape = soft::escape_probabilities(a.chain.P, a.chain.pi, a.argmax);
  a.soft_escape = soft::soft_escape_diagnostic(a.chain.P, a.soft, a.nu);
  return a;
}

std::string_view status_name(CheckStatus status) noexcept {
  switch (status) {
    case CheckStatus::Pass: return "PASS";
    case CheckStatus::Fail: return "FAIL";
    case CheckStatus::ExpectedFail: return "XFAIL";
    case CheckStatus::Info: return "INFO";
    case CheckStatus::Skip: return "SKIP";
  }
  return "?";
}

std::vector<Check> run_checks(const Analysis& a, const AnalysisOptions& options) {
  // Several identities rest on sum_j w_ij = n_i, which needs wrap-around counting.
  const bool open = !options.circular;
  std::vector<Check> checks;
  const auto& ch = a.chain;

  {
    Check c{"connectivity", CheckStatus::Pass, static_cast<double>(a.components.count()), 1.0, {}};
    if (a.components.count() > 1) {
      c.detail = "analysis restricted to the largest component (" + std::to_string(a.analyzed.size()) + " of " +
                 std::to_string(a.table.size()) + " types)";
      c.status = options.strict_connectivity ? CheckStatus::Fail : CheckStatus::Info;
    }
    checks.push_back(c);
  }
  checks.push_back(judge("degree_identity", chain::degree_defect(ch.W, ch.degrees), 0.0, open,
                         open ? "wrap-around counting disabled" : ""));
  checks.push_back(judge("w_symmetry", chain::symmetry_defect(ch.W), 0.0));
  checks.push_back(judge("p_row_sums", chain::row_sum_defect(ch.P), 1e-12, open));
  checks.push_back(judge("stationary_fixed_point", chain::stationarity_defect(ch.P, ch.pi), 1e-12, open));
  checks.push_back(judge("reversibility", chain::reversibility_defect(ch.P, ch.pi), 1e-12));

  const auto& emb = a.embedding;
  const auto residuals = spectral::check_residuals(ch.W, ch.degrees, emb);
  checks.push_back(judge("eigen_residuals", residuals.max_residual(), spectral::residual_bound(ch.degrees, options.solver.tol)));
  checks.push_back(judge("d_orthonormality", residuals.orthonormality_defect, 1e-8));
  checks.push_back(judge("lambda1_zero", std::abs(emb.lambdas[0]), 1e-8, open));
  {
    const Eigen::VectorXd y1 = emb.Y.col(0);
    const double mean = y1.mean();
    const double spread = (y1.array() - mean).abs().maxCoeff() / std::abs(mean);
    checks.push_back(judge("y1_constant", spread, 1e-6, open));
  }
  {
    double outside = 0.0;
    for (Eigen::Index k = 0; k < emb.lambdas.size(); ++k) {
      outside = std::max({outside, -emb.lambdas[k], emb.lambdas[k] - 2.0});
    }
    checks.push_back(judge("lambda_range", outside, 1e-8));
  }
  {
    const double two_sum = 2.0 * emb.lambdas.sum();
    const double rel = std::abs(a.nu - two_sum) / std::max(std::abs(two_sum), 1e-8);
    checks.push_back(judge("nu_equals_2sum_lambda", rel, 1e-8, open));
  }
  const auto& soft = a.soft;
  checks.push_back(judge("ytilde_column_sums", (soft.ytilde.colwise().sum().array() - 1.0).abs().maxCoeff(), 1e-10));
  checks.push_back(judge("ytilde1_equals_pi", (soft.ytilde.col(0) - ch.pi).lpNorm<Eigen::Infinity>(), 1e-8, open));
  {
    const double defect = soft::posterior_row_defect(soft.posteriors);
    if (soft.prior_fit.residual <= 1e-8 && !soft.prior_fit.degenerate) {
      checks.push_back(judge("posterior_rows", defect, 1e-8));
    } else {
      checks.push_back({"posterior_rows", CheckStatus::Info, defect, 1e-8,
                        "prior fit residual " + number(soft.prior_fit.residual) +
                            (soft.prior_fit.degenerate ? " (degenerate system, uniform priors)" : "")});
    }
  }
  {
    const double two_escape = 2.0 * a.escape.sum();
    checks.push_back(judge("mnc_escape_identity", std::abs(a.hard_mnc - two_escape), 1e-10 * std::max(1.0, a.hard_mnc),
                           open, "argmax partition with " + std::to_string(a.argmax.clusters) + " clusters"));
  }
  checks.push_back({"soft_escape_diagnostic", CheckStatus::Info, a.soft_escape.four_total(), a.nu,
                    "4 * sum soft escape vs nu(Y)"});
  return checks;
}

bool any_failed(const std::vector<Check>& checks) {
  return std::any_of(checks.begin(), checks.end(), [](const Check& c) { return c.status == CheckStatus::Fail; });
}

nlohmann::json checks_to_json(const std::vector<Check>& checks) {
  auto out = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json j{{"name", c.name}, {"status", status_name(c.status)}, {"value", c.value}, {"threshold", c.threshold}};
    if (!c.detail.empty()) j["detail"] = c.detail;
    out.push_back(std::move(j));
  }
  return out;
}

nlohmann::json analysis_report(const Analysis& a) {
  nlohmann::json r;
  std::size_t dropped = 0;
  for (const auto& t : a.stream.texts) dropped += t.dropped.size();
  r["corpus"] = {{"texts", a.stream.texts.size()},
                 {"tokens", a.stream.token_count()},
                 {"dropped_tokens", dropped},
                 {"types", a.table.size()}};
  std::vector<std::string> excluded;
  for (std::size_t i = 0; i < a.table.size(); ++i) {
    if (a.components.component[i] != a.components.largest()) excluded.push_back(a.table.name(static_cast<corpus::TypeId>(i)));
  }
  r["components"] = {{"count", a.components.count()},
                     {"sizes", a.components.sizes},
                     {"v", a.chain.size()},
                     {"n", a.chain.counts.total},
                     {"excluded_types", excluded}};
  const auto residuals = spectral::check_residuals(a.chain.W, a.chain.degrees, a.embedding);
  const double two_sum = 2.0 * a.embedding.lambdas.sum();
  r["spectral"] = {{"q", a.embedding.q()},
                   {"strategy", spectral::strategy_name(a.embedding.strategy)},
                   {"restarts", a.embedding.restarts},
                   {"lambdas", to_vector(a.embedding.lambdas)},
                   {"residuals", to_vector(residuals.residuals)},
                   {"orthonormality_defect", residuals.orthonormality_defect},
                   {"degenerate_groups", a.embedding.degenerate_groups},
                   {"nu", a.nu},
                   {"two_sum_lambda", two_sum}};
  r["soft"] = {{"priors", to_vector(a.soft.prior_fit.priors)},
               {"prior_fit_residual", a.soft.prior_fit.residual},
               {"prior_fit_rank", a.soft.prior_fit.rank},
               {"prior_fit_degenerate", a.soft.prior_fit.degenerate},
               {"posterior_row_defect", soft::posterior_row_defect(a.soft.posteriors)},
               {"ytilde_column_sums", to_vector(a.soft.ytilde.colwise().sum().transpose())}};
  r["hard"] = {{"argmax_cluster_sizes", a.argmax.sizes()},
               {"mnc", a.hard_mnc},
               {"escape_probabilities", to_vector(a.escape)},
               {"two_sum_escape", 2.0 * a.escape.sum()}};
  r["escape_diagnostic"] = {{"soft_escape", to_vector(a.soft_escape.per_cluster)},
                            {"four_sum_soft_escape", a.soft_escape.four_total()},
                            {"nu", a.nu}};
  return r;
}

std::string types_csv(const Analysis& a) {
  const auto q = a.embedding.q();
  std::ostringstream out;
  out << "type,n,pi";
  for (int k = 1; k <= q; ++k) out << ",ytilde_" << k;
  for (int k = 1; k <= q; ++k) out << ",posterior_" << k;
  out << ",argmax\n";
  for (Eigen::Index i = 0; i < a.chain.size(); ++i) {
    const auto id = static_cast<corpus::TypeId>(i);
    out << csv_field(a.analyzed_table.name(id)) << ',' << a.analyzed_table.count(id) << ',' << number(a.chain.pi[i]);
    for (int k = 0; k < q; ++k) out << ',' << number(a.soft.ytilde(i, k));
    for (int k = 0; k < q; ++k) out << ',' << number(a.soft.posteriors(i, k));
    out << ',' << a.argmax.assignment[static_cast<std::size_t>(i)] + 1 << '\n';
  }
  return out.str();
}

std::string embedding_csv(const Analysis& a) {
  std::ostringstream out;
  out << "type";
  for (int k = 1; k <= a.embedding.q(); ++k) out << ",y_" << k;
  out << '\n';
  for (Eigen::Index i = 0; i < a.embedding.size(); ++i) {
    out << csv_field(a.analyzed_table.name(static_cast<corpus::TypeId>(i)));
    for (Eigen::Index k = 0; k < a.embedding.Y.cols(); ++k) out << ',' << number(a.embedding.Y(i, k));
    out << '\n';
  }
  return out.str();
}

nlohmann::json embedding_json(const Analysis& a) {
  const auto residuals = spectral::check_residuals(a.chain.W, a.chain.degrees, a.embedding);
  nlohmann::json j;
  j["lambdas"] = to_vector(a.embedding.lambdas);
  j["residuals"] = to_vector(residuals.residuals);
  j["orthonormality_defect"] = residuals.orthonormality_defect;
  j["degenerate_groups"] = a.embedding.degenerate_groups;
  j["types"] = a.analyzed_table.names();
  auto columns = nlohmann::json::array();
  for (Eigen::Index k = 0; k < a.embedding.Y.cols(); ++k) columns.push_back(to_vector(a.embedding.Y.col(k)));
  j["Y"] = std::move(columns);
  return j;
}

std::string render_html(const Analysis& a, const render::ColorSpec& spec) {
  const auto colors = type_colors(a, spec);
  std::vector<std::optional<render::Rgb>> by_type(a.table.size());
  for (std::size_t k = 0; k < a.analyzed.size(); ++k) by_type[static_cast<std::size_t>(a.analyzed[k])] = colors[k].rgb;
  render::HtmlLegend legend;
  legend.notes.push_back("types analyzed: " + std::to_string(a.analyzed.size()) + " of " + std::to_string(a.table.size()));
  return render::emit_html(a.stream, a.table, by_type, spec, legend);
}

std::string render_scatter(const Analysis& a, const render::ColorSpec& spec, std::array<int, 2> axes, std::size_t top_n) {
  return render::emit_scatter(a.analyzed_table, quantity_matrix(a, spec.quantity), axes[0], axes[1], top_n,
                              render::quantity_name(spec.quantity));
}

std::string colors_csv(const Analysis& a, const render::ColorSpec& spec) {
  const auto colors = type_colors(a, spec);
  std::ostringstream out;
  out << "type,R,G,B,bin_R,bin_G,bin_B\n";
  for (std::size_t k = 0; k < colors.size(); ++k) {
    const auto& c = colors[k];
    out << csv_field(a.analyzed_table.name(static_cast<corpus::TypeId>(k))) << ',' << int(c.rgb.r) << ',' << int(c.rgb.g)
        << ',' << int(c.rgb.b) << ',' << c.bins[0] << ',' << c.bins[1] << ',' << c.bins[2] << '\n';
  }
  return out.str();
}

RunResult run_pipeline(const RunConfig& config) {
  using clock = std::chrono::steady_clock;
  config.validate();
  nlohmann::json timings;
  auto mark = clock::now();
  const auto lap = [&](const char* stage) {
    const auto now = clock::now();
    timings[stage] = std::chrono::duration<double>(now - mark).count();
    mark = now;
  };

  const auto raw = corpus::read_corpus(config.inputs, config.corpus);
  lap("read");
  const auto analysis = analyze(raw, config.analysis);
  lap("analyze");

  RunResult result;
  result.checks = run_checks(analysis, config.analysis);
  result.report = analysis_report(analysis);
  result.report["tool"] = "softcut";
  result.report["config"] = config.to_json();
  result.report["checks"] = checks_to_json(result.checks);

  std::filesystem::create_directories(config.out_dir);
  const auto emit = [&](const std::string& name, std::string_view contents) {
    const auto path = config.out_dir / name;
    write_file(path, contents);
    result.artifacts.push_back(path);
  };
  if (config.formats.contains(Format::Html)) emit("softcut.html", render_html(analysis, config.color));
  if (config.formats.contains(Format::Svg)) {
    emit("scatter.svg", render_scatter(analysis, config.color, config.scatter_axes, config.top_n));
  }
  if (config.formats.contains(Format::Csv)) {
    emit("types.csv", types_csv(analysis));
    emit("embedding.csv", embedding_csv(analysis));
    emit("colors.csv", colors_csv(analysis, config.color));
  }
  if (config.formats.contains(Format::Json)) emit("embedding.json", embedding_json(analysis).dump(2) + "\n");
  if (config.dump_chain) {
    std::ostringstream dump;
    chain::write_chain_dump(dump, analysis.chain.counts, analysis.chain.W, analysis.components);
    emit("chain.txt", dump.str());
  }
  lap("render");

  std::vector<std::string> names;
  for (const auto& p : result.artifacts) names.push_back(p.filename().string());
  if (config.formats.contains(Format::Json)) names.push_back("report.json");
  result.report["artifacts"] = names;
  if (config.timings) result.report["timings"] = timings;
  if (config.formats.contains(Format::Json)) {
    emit("report.json", result.report.dump(2) + "\n");
  }
  return result;
}

ValidationResult validate(const RunConfig& config) {
  // Nothing is rendered, so color and scatter settings are not checked.
  auto checked = config;
  checked.formats.clear();
  checked.validate();
  ValidationResult result;
  const auto raw = corpus::read_corpus(config.inputs, config.corpus);
  try {
    const auto analysis = analyze(raw, config.analysis);
    result.checks = run_checks(analysis, config.analysis);
  } catch (const Error& e) {
    if (e.code() != Errc::Disconnected) throw;
    result.checks.push_back({"connectivity", CheckStatus::Fail, 0.0, 1.0, e.what()});
    result.checks.push_back({"remaining_checks", CheckStatus::Skip, 0.0, 0.0, "analysis requires a connected chain"});
  }
  result.failed = any_failed(result.checks);
  return result;
}

}  // namespace softcut::pipeline
