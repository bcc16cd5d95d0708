#pragma once

// Visual outputs: equal-population color levels per axis, colored HTML text
// and an SVG scatter of the most frequent types.

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "softcut/corpus.hpp"

namespace softcut::render {

enum class Quantity { Conditional, RawEigen, Posterior };

std::string_view quantity_name(Quantity quantity) noexcept;
/// Accepts "conditional", "eigen" and "posterior". Throws Error{InvalidArgument}.
Quantity parse_quantity(std::string_view name);

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  std::string hex() const;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

inline constexpr Rgb kDroppedColor{255, 255, 255};
inline constexpr Rgb kOutsideColor{160, 160, 160};

struct ColorSpec {
  std::array<int, 3> axes{2, 3, 4};  // 1-based (R, G, B)
  Quantity quantity = Quantity::Conditional;
  int chi = 5;
  bool continuous = false;

  /// Throws Error{InvalidArgument} unless axes are distinct and in 1..q and chi >= 2.
  void validate(int q) const;
  std::pair<double, double> value_range() const;
};

/// Equal-population bins for one channel. A value x falls in bin b when
/// breakpoints[b-1] < x <= breakpoints[b]; ties go to the lower bin.
struct ChannelBins {
  std::vector<double> breakpoints;      // chi - 1 inclusive upper edges
  std::vector<std::size_t> populations; // values per bin
  bool ties = false;                    // tied values broke the equal-population split

  int chi() const noexcept { return static_cast<int>(breakpoints.size()) + 1; }
  int bin_of(double x) const;
};

/// Throws Error{TooFewValues} when fewer than chi values are given.
ChannelBins quantile_bins(std::span<const double> values, int chi);

struct BinMap {
  std::array<ChannelBins, 3> channels;
};

/// Bins each of the three columns of `channels` (v x 3).
BinMap build_bin_map(const Eigen::MatrixXd& channels, int chi);

/// Level for bin index `bin` out of chi: round(255 bin / (chi - 1)).
std::uint8_t bin_intensity(int bin, int chi);

struct TypeColor {
  Rgb rgb;
  std::array<int, 3> bins{};
};

std::vector<TypeColor> colorize(const Eigen::MatrixXd& channels, const BinMap& bins);

/// Unbinned mapping of [lo, hi] onto 0..255, clamped.
std::vector<TypeColor> colorize_continuous(const Eigen::MatrixXd& channels, std::pair<double, double> range);

/// Picks the R, G, B columns (1-based axes) out of a v x q quantity matrix.
Eigen::MatrixXd select_channels(const Eigen::MatrixXd& quantity, const std::array<int, 3>& axes);

struct HtmlLegend {
  std::string title = "softcut";
  std::vector<std::string> notes;
};

/// Colors are indexed by the stream's global type id; std::nullopt marks a
/// type outside the analyzed component (drawn gray). Dropped tokens are white.
std::string emit_html(const corpus::TokenStream& stream, const corpus::TypeTable& table,
                      const std::vector<std::optional<Rgb>>& colors, const ColorSpec& spec,
                      const HtmlLegend& legend = {});

/// Scatter of the top_n most frequent types (count descending, id ascending)
/// at (values(:, axis_x - 1), values(:, axis_y - 1)).
std::string emit_scatter(const corpus::TypeTable& table, const Eigen::MatrixXd& values, int axis_x, int axis_y,
                         std::size_t top_n, std::string_view quantity_label);

/// Indices of the top_n types by count, descending, ties by id.
std::vector<corpus::TypeId> most_frequent(const corpus::TypeTable& table, std::size_t top_n);

std::string escape_xml(std::string_view text);

}  // namespace softcut::render
