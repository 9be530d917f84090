#pragma once

// Text renderings used by the CLI: CSV tables, JSON reports, SVG line plots.

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "embdim/empirical.hpp"
#include "embdim/sizing.hpp"

namespace embdim {

/// Shortest decimal text that parses back to the same double.
std::string format_shortest(double value);
/// One digit after the decimal point.
std::string format_fixed1(double value);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  friend bool operator==(const CsvTable&, const CsvTable&) = default;
};

/// Comma delimited, '\n' line endings, header always present. Fields never
/// contain commas or quotes here, so no quoting is performed.
std::string write_csv(const CsvTable& table);
CsvTable parse_csv(std::string_view text);

/// Header n,k,h_bits,d_s8,d_s16,d_s32,h_embedding with H to one decimal.
CsvTable roofline_csv(const std::vector<RooflineRow>& rows);
nlohmann::ordered_json roofline_json(const std::vector<RooflineRow>& rows,
                                     EntropyMethod method, Rounding rounding);

/// Header k,h_bits.
CsvTable curve_csv(const EntropyCurve& curve);
/// Header n,k,h_bits, one block per curve.
CsvTable grouped_curve_csv(const std::vector<EntropyCurve>& curves);

struct SvgOptions {
  std::string title = "Lookup entropy";
  bool log_x = false;  // log10 abscissa, for k spanning decades
  int width = 640;
  int height = 400;
};

/// Self-contained SVG with one polyline per curve and a log2 ordinate.
/// Points with H <= 0 cannot sit on a log axis and are omitted.
std::string curves_svg(const std::vector<EntropyCurve>& curves, const SvgOptions& options);

nlohmann::ordered_json report_json(const EmpiricalReport& report);

}  // namespace embdim
