#include "softcut/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include "softcut/error.hpp"

namespace softcut::render {

namespace {

std::string fixed(double x, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

bool is_dark(const Rgb& c) { return 299 * c.r + 587 * c.g + 114 * c.b < 128000; }

std::uint8_t scale_to_byte(double t) {
  return static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(t, 0.0, 1.0)));
}

}  // namespace

std::string_view quantity_name(Quantity quantity) noexcept {
  switch (quantity) {
    case Quantity::Conditional: return "conditional";
    case Quantity::RawEigen: return "eigen";
    case Quantity::Posterior: return "posterior";
  }
  return "unknown";
}

Quantity parse_quantity(std::string_view name) {
  if (name == "conditional") return Quantity::Conditional;
  if (name == "eigen") return Quantity::RawEigen;
  if (name == "posterior") return Quantity::Posterior;
  throw Error(Errc::InvalidArgument, "unknown quantity '" + std::string(name) + "'");
}

std::string Rgb::hex() const {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

void ColorSpec::validate(int q) const {
  if (chi < 2) throw Error(Errc::InvalidArgument, "chi must be at least 2");
  for (std::size_t c = 0; c < axes.size(); ++c) {
    if (axes[c] < 1 || axes[c] > q) {
      throw Error(Errc::InvalidArgument, "axis " + std::to_string(axes[c]) + " outside 1.." + std::to_string(q));
    }
    for (std::size_t d = 0; d < c; ++d) {
      if (axes[c] == axes[d]) throw Error(Errc::InvalidArgument, "color axes must be distinct");
    }
  }
}

std::pair<double, double> ColorSpec::value_range() const {
  return quantity == Quantity::RawEigen ? std::pair{-1.0, 1.0} : std::pair{0.0, 1.0};
}

int ChannelBins::bin_of(double x) const {
  // Number of breakpoints strictly below x.
  return static_cast<int>(std::lower_bound(breakpoints.begin(), breakpoints.end(), x) - breakpoints.begin());
}

ChannelBins quantile_bins(std::span<const double> values, int chi) {
  if (chi < 2) throw Error(Errc::InvalidArgument, "chi must be at least 2");
  const auto v = values.size();
  if (v < static_cast<std::size_t>(chi)) {
    throw Error(Errc::TooFewValues, std::to_string(v) + " values cannot fill " + std::to_string(chi) + " bins");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  ChannelBins bins;
  for (int b = 1; b < chi; ++b) {
    const auto cut = static_cast<std::size_t>(b) * v / static_cast<std::size_t>(chi);
    bins.breakpoints.push_back(sorted[cut - 1]);
    if (sorted[cut - 1] == sorted[cut]) bins.ties = true;
  }
  bins.populations.assign(static_cast<std::size_t>(chi), 0);
  for (double x : values) ++bins.populations[static_cast<std::size_t>(bins.bin_of(x))];
  return bins;
}

BinMap build_bin_map(const Eigen::MatrixXd& channels, int chi) {
  BinMap map;
  for (Eigen::Index c = 0; c < 3; ++c) {
    const Eigen::VectorXd column = channels.col(c);
    map.channels[static_cast<std::size_t>(c)] = quantile_bins(std::span<const double>(column.data(), column.size()), chi);
  }
  return map;
}

std::uint8_t bin_intensity(int bin, int chi) {
  return scale_to_byte(static_cast<double>(bin) / static_cast<double>(chi - 1));
}

std::vector<TypeColor> colorize(const Eigen::MatrixXd& channels, const BinMap& bins) {
  std::vector<TypeColor> out(static_cast<std::size_t>(channels.rows()));
  for (Eigen::Index i = 0; i < channels.rows(); ++i) {
    auto& color = out[static_cast<std::size_t>(i)];
    for (std::size_t c = 0; c < 3; ++c) {
      color.bins[c] = bins.channels[c].bin_of(channels(i, static_cast<Eigen::Index>(c)));
    }
    color.rgb = {bin_intensity(color.bins[0], bins.channels[0].chi()),
                 bin_intensity(color.bins[1], bins.channels[1].chi()),
                 bin_intensity(color.bins[2], bins.channels[2].chi())};
  }
  return out;
}

std::vector<TypeColor> colorize_continuous(const Eigen::MatrixXd& channels, std::pair<double, double> range) {
  const auto [lo, hi] = range;
  std::vector<TypeColor> out(static_cast<std::size_t>(channels.rows()));
  for (Eigen::Index i = 0; i < channels.rows(); ++i) {
    const auto level = [&](Eigen::Index c) { return scale_to_byte((channels(i, c) - lo) / (hi - lo)); };
    out[static_cast<std::size_t>(i)].rgb = {level(0), level(1), level(2)};
    out[static_cast<std::size_t>(i)].bins = {-1, -1, -1};
  }
  return out;
}

Eigen::MatrixXd select_channels(const Eigen::MatrixXd& quantity, const std::array<int, 3>& axes) {
  Eigen::MatrixXd out(quantity.rows(), 3);
  for (Eigen::Index c = 0; c < 3; ++c) out.col(c) = quantity.col(axes[static_cast<std::size_t>(c)] - 1);
  return out;
}

std::string escape_xml(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out.push_back(ch);
    }
  }
  return out;
}

std::string emit_html(const corpus::TokenStream& stream, const corpus::TypeTable& table,
                      const std::vector<std::optional<Rgb>>& colors, const ColorSpec& spec,
                      const HtmlLegend& legend) {
  std::ostringstream html;
  html << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>" << escape_xml(legend.title)
       << "</title>\n<style>\n"
          "body { font-family: Georgia, serif; margin: 2em; background: #ffffff; }\n"
          ".legend { font-family: sans-serif; font-size: small; border-bottom: 1px solid #ccc; padding-bottom: 0.5em; }\n"
          ".text { white-space: pre-wrap; line-height: 1.7; margin: 1.5em 0; }\n"
          ".text span { padding: 0 1px; }\n"
          ".d { background: " << kDroppedColor.hex() << "; }\n"
          ".o { background: " << kOutsideColor.hex() << "; }\n"
          "</style>\n</head>\n<body>\n";

  html << "<div class=\"legend\">quantity: " << quantity_name(spec.quantity) << "; axes R=" << spec.axes[0]
       << " G=" << spec.axes[1] << " B=" << spec.axes[2] << "; ";
  if (spec.continuous) {
    html << "continuous levels";
  } else {
    html << "chi=" << spec.chi << " equal-population levels";
  }
  html << "; white: not analyzed (filtered); gray: outside the analyzed component";
  for (const auto& note : legend.notes) html << "<br>" << escape_xml(note);
  html << "</div>\n";

  for (const auto& text : stream.texts) {
    html << "<div class=\"text\" title=\"" << escape_xml(text.name) << "\">";
    // Retained and dropped tokens merged back into source order.
    std::size_t a = 0;
    std::size_t b = 0;
    std::size_t cursor = 0;
    while (a < text.tokens.size() || b < text.dropped.size()) {
      const bool take_retained =
          b == text.dropped.size() || (a < text.tokens.size() && text.tokens[a].span.start < text.dropped[b].span.start);
      const auto& token = take_retained ? text.tokens[a++] : text.dropped[b++];
      html << escape_xml(std::string_view(text.source).substr(cursor, token.span.start - cursor));
      const auto surface = escape_xml(std::string_view(text.source).substr(token.span.start, token.span.size()));
      if (!take_retained) {
        html << "<span class=\"d\">" << surface << "</span>";
      } else {
        const auto id = table.find(token.text);
        const std::optional<Rgb> color = id ? colors.at(static_cast<std::size_t>(*id)) : std::nullopt;
        if (color) {
          html << "<span style=\"background:" << color->hex() << ";color:" << (is_dark(*color) ? "#ffffff" : "#000000")
               << "\">" << surface << "</span>";
        } else {
          html << "<span class=\"o\">" << surface << "</span>";
        }
      }
      cursor = token.span.end;
    }
    html << escape_xml(std::string_view(text.source).substr(cursor)) << "</div>\n";
  }
  html << "</body>\n</html>\n";
  return html.str();
}

std::vector<corpus::TypeId> most_frequent(const corpus::TypeTable& table, std::size_t top_n) {
  std::vector<corpus::TypeId> ids(table.size());
  std::iota(ids.begin(), ids.end(), 0);
  std::stable_sort(ids.begin(), ids.end(),
                   [&](corpus::TypeId x, corpus::TypeId y) { return table.count(x) > table.count(y); });
  ids.resize(std::min(top_n, ids.size()));
  return ids;
}

std::string emit_scatter(const corpus::TypeTable& table, const Eigen::MatrixXd& values, int axis_x, int axis_y,
                         std::size_t top_n, std::string_view quantity_label) {
  if (axis_x < 1 || axis_y < 1 || axis_x > values.cols() || axis_y > values.cols()) {
    throw Error(Errc::InvalidArgument, "scatter axes outside 1.." + std::to_string(values.cols()));
  }
  if (values.rows() != static_cast<Eigen::Index>(table.size())) {
    throw Error(Errc::InvalidArgument, "scatter values do not match the type table");
  }
  const auto chosen = most_frequent(table, top_n);

  constexpr double width = 800;
  constexpr double height = 600;
  constexpr double margin = 60;
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  if (!chosen.empty()) {
    xmin = xmax = values(chosen.front(), axis_x - 1);
    ymin = ymax = values(chosen.front(), axis_y - 1);
  }
  for (auto id : chosen) {
    xmin = std::min(xmin, values(id, axis_x - 1));
    xmax = std::max(xmax, values(id, axis_x - 1));
    ymin = std::min(ymin, values(id, axis_y - 1));
    ymax = std::max(ymax, values(id, axis_y - 1));
  }
  const auto to_px = [](double x, double lo, double hi, double from, double to) {
    if (hi <= lo) return 0.5 * (from + to);
    return from + (x - lo) / (hi - lo) * (to - from);
  };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n"
      << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin << "\" y2=\""
      << height - margin << "\" stroke=\"#000000\"/>\n"
      << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\"" << height - margin
      << "\" stroke=\"#000000\"/>\n"
      << "<text x=\"" << width / 2 << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\" font-size=\"14\">axis "
      << axis_x << " (" << escape_xml(quantity_label) << ") [" << fixed(xmin, 4) << ", " << fixed(xmax, 4)
      << "]</text>\n"
      << "<text x=\"20\" y=\"" << height / 2 << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 20 "
      << height / 2 << ")\">axis " << axis_y << " (" << escape_xml(quantity_label) << ") [" << fixed(ymin, 4) << ", "
      << fixed(ymax, 4) << "]</text>\n";
  for (auto id : chosen) {
    const double px = to_px(values(id, axis_x - 1), xmin, xmax, margin, width - margin);
    const double py = to_px(values(id, axis_y - 1), ymin, ymax, height - margin, margin);
    svg << "<g><circle cx=\"" << fixed(px) << "\" cy=\"" << fixed(py) << "\" r=\"3\" fill=\"#1f4e99\"/>"
        << "<text x=\"" << fixed(px + 5) << "\" y=\"" << fixed(py - 5) << "\" font-size=\"12\">"
        << escape_xml(table.name(id)) << "</text></g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace softcut::render
