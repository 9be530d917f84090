#include "embdim/format.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "embdim/errors.hpp"

namespace embdim {

namespace {

std::string svg_number(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.6g", v);
  return buf.data();
}

constexpr std::array<const char*, 6> kPalette = {"#1f77b4", "#d62728", "#2ca02c",
                                                 "#9467bd", "#ff7f0e", "#17becf"};

}  // namespace

std::string format_shortest(double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

std::string format_fixed1(double value) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.1f", value);
  return buf.data();
}

std::string write_csv(const CsvTable& table) {
  std::string out;
  auto emit = [&out](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out.push_back(',');
      out += fields[i];
    }
    out.push_back('\n');
  };
  emit(table.header);
  for (const auto& row : table.rows) {
    emit(row);
  }
  return out;
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  bool first = true;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    if (eol == std::string_view::npos) {
      throw DomainError("CSV must end every line with '\\n'");
    }
    const auto line = text.substr(0, eol);
    text.remove_prefix(eol + 1);
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
      const auto comma = line.find(',', pos);
      fields.emplace_back(line.substr(pos, comma == std::string_view::npos
                                               ? std::string_view::npos
                                               : comma - pos));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      if (fields.size() != table.header.size()) {
        throw DomainError("CSV row width differs from header");
      }
      table.rows.push_back(std::move(fields));
    }
  }
  if (first) {
    throw DomainError("CSV is missing its header row");
  }
  return table;
}

CsvTable roofline_csv(const std::vector<RooflineRow>& rows) {
  CsvTable table{{"n", "k", "h_bits", "d_s8", "d_s16", "d_s32", "h_embedding"}, {}};
  auto d_at = [](const RooflineRow& row, std::uint32_t s) {
    const auto it = row.d_by_s.find(s);
    return it == row.d_by_s.end() ? std::string() : std::to_string(it->second);
  };
  for (const auto& row : rows) {
    table.rows.push_back({std::to_string(row.signature.n), std::to_string(row.signature.k),
                          format_fixed1(row.h_lookup.bits()), d_at(row, 8), d_at(row, 16),
                          d_at(row, 32), format_shortest(row.h_embedding.bits())});
  }
  return table;
}

nlohmann::ordered_json roofline_json(const std::vector<RooflineRow>& rows,
                                     EntropyMethod method, Rounding rounding) {
  nlohmann::ordered_json doc;
  doc["method"] = to_string(method);
  doc["rounding"] = to_string(rounding);
  auto out = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json r;
    r["n"] = row.signature.n;
    r["k"] = row.signature.k;
    r["t"] = row.signature.t;
    r["h_bits"] = row.h_lookup.bits();
    auto d = nlohmann::ordered_json::object();
    for (const auto& [s, dim] : row.d_by_s) {
      d[std::to_string(s)] = dim;
    }
    r["recommended_d"] = std::move(d);
    r["h_embedding_bits"] = row.h_embedding.bits();
    out.push_back(std::move(r));
  }
  doc["rows"] = std::move(out);
  return doc;
}

CsvTable curve_csv(const EntropyCurve& curve) {
  CsvTable table{{"k", "h_bits"}, {}};
  for (const auto& p : curve.points) {
    table.rows.push_back({std::to_string(p.k), format_shortest(p.h_bits)});
  }
  return table;
}

CsvTable grouped_curve_csv(const std::vector<EntropyCurve>& curves) {
  CsvTable table{{"n", "k", "h_bits"}, {}};
  for (const auto& curve : curves) {
    for (const auto& p : curve.points) {
      table.rows.push_back(
          {std::to_string(curve.n), std::to_string(p.k), format_shortest(p.h_bits)});
    }
  }
  return table;
}

std::string curves_svg(const std::vector<EntropyCurve>& curves, const SvgOptions& options) {
  constexpr double kLeft = 70.0, kRight = 150.0, kTop = 40.0, kBottom = 50.0;
  const double width = options.width;
  const double height = options.height;
  const double plot_w = width - kLeft - kRight;
  const double plot_h = height - kTop - kBottom;

  auto x_of = [&](double k) { return options.log_x ? std::log10(k) : k; };
  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -x_min;
  double y_min = x_min;
  double y_max = -x_min;
  for (const auto& curve : curves) {
    for (const auto& p : curve.points) {
      if (p.h_bits <= 0.0 || (options.log_x && p.k == 0)) continue;
      x_min = std::min(x_min, x_of(static_cast<double>(p.k)));
      x_max = std::max(x_max, x_of(static_cast<double>(p.k)));
      y_min = std::min(y_min, std::log2(p.h_bits));
      y_max = std::max(y_max, std::log2(p.h_bits));
    }
  }
  if (!(x_min <= x_max)) {
    x_min = 0.0;
    x_max = 1.0;
    y_min = 0.0;
    y_max = 1.0;
  }
  y_min = std::floor(y_min);
  y_max = std::max(std::ceil(y_max), y_min + 1.0);
  if (x_max == x_min) {
    x_min -= 0.5;
    x_max += 0.5;
  }
  auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double y) { return kTop + (y_max - y) / (y_max - y_min) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width
      << "\" height=\"" << options.height << "\" viewBox=\"0 0 " << options.width << ' '
      << options.height << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << options.width << "\" height=\""
      << options.height << "\" style=\"fill:#ffffff\"/>\n";
  svg << "<text x=\"" << svg_number(width / 2) << "\" y=\"24\" "
      << "style=\"font:14px sans-serif;text-anchor:middle\">" << options.title << "</text>\n";
  svg << "<rect x=\"" << svg_number(kLeft) << "\" y=\"" << svg_number(kTop)
      << "\" width=\"" << svg_number(plot_w) << "\" height=\"" << svg_number(plot_h)
      << "\" style=\"fill:none;stroke:#000000;stroke-width:1\"/>\n";

  const double y_step = std::max(1.0, std::ceil((y_max - y_min) / 8.0));
  for (double y = y_min; y <= y_max + 1e-9; y += y_step) {
    svg << "<line x1=\"" << svg_number(kLeft - 4) << "\" y1=\"" << svg_number(py(y))
        << "\" x2=\"" << svg_number(kLeft) << "\" y2=\"" << svg_number(py(y))
        << "\" style=\"stroke:#000000\"/>\n";
    svg << "<text x=\"" << svg_number(kLeft - 6) << "\" y=\"" << svg_number(py(y) + 4)
        << "\" style=\"font:10px sans-serif;text-anchor:end\">2^" << svg_number(y)
        << "</text>\n";
  }
  const int x_ticks = 5;
  for (int i = 0; i <= x_ticks; ++i) {
    const double x = x_min + (x_max - x_min) * i / x_ticks;
    const double label = options.log_x ? std::pow(10.0, x) : x;
    svg << "<line x1=\"" << svg_number(px(x)) << "\" y1=\"" << svg_number(kTop + plot_h)
        << "\" x2=\"" << svg_number(px(x)) << "\" y2=\"" << svg_number(kTop + plot_h + 4)
        << "\" style=\"stroke:#000000\"/>\n";
    svg << "<text x=\"" << svg_number(px(x)) << "\" y=\"" << svg_number(kTop + plot_h + 16)
        << "\" style=\"font:10px sans-serif;text-anchor:middle\">" << svg_number(label)
        << "</text>\n";
  }
  svg << "<text x=\"" << svg_number(kLeft + plot_w / 2) << "\" y=\""
      << svg_number(height - 12) << "\" style=\"font:12px sans-serif;text-anchor:middle\">"
      << (options.log_x ? "k (log scale)" : "k") << "</text>\n";
  svg << "<text x=\"16\" y=\"" << svg_number(kTop + plot_h / 2)
      << "\" transform=\"rotate(-90 16 " << svg_number(kTop + plot_h / 2)
      << ")\" style=\"font:12px sans-serif;text-anchor:middle\">H (bits, log2 scale)</text>\n";

  for (std::size_t c = 0; c < curves.size(); ++c) {
    const char* color = kPalette[c % kPalette.size()];
    svg << "<polyline style=\"fill:none;stroke:" << color << ";stroke-width:1.5\" points=\"";
    bool first = true;
    for (const auto& p : curves[c].points) {
      if (p.h_bits <= 0.0 || (options.log_x && p.k == 0)) continue;
      if (!first) svg << ' ';
      first = false;
      svg << svg_number(px(x_of(static_cast<double>(p.k)))) << ','
          << svg_number(py(std::log2(p.h_bits)));
    }
    svg << "\"/>\n";
    const double ly = kTop + 14.0 * static_cast<double>(c) + 8.0;
    svg << "<line x1=\"" << svg_number(kLeft + plot_w + 10) << "\" y1=\"" << svg_number(ly)
        << "\" x2=\"" << svg_number(kLeft + plot_w + 30) << "\" y2=\"" << svg_number(ly)
        << "\" style=\"stroke:" << color << ";stroke-width:1.5\"/>\n";
    svg << "<text x=\"" << svg_number(kLeft + plot_w + 34) << "\" y=\""
        << svg_number(ly + 4) << "\" style=\"font:10px sans-serif\">n=" << curves[c].n
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

nlohmann::ordered_json report_json(const EmpiricalReport& report) {
  nlohmann::ordered_json doc;
  doc["distinct"] = report.distinct;
  doc["total"] = report.total;
  doc["h_empirical_bits"] = report.h_empirical.bits();
  doc["h_roofline_bits"] = report.h_roofline.bits();
  doc["k_max"] = report.k_max;
  auto d = nlohmann::ordered_json::object();
  for (const auto& [s, dim] : report.recommended_d) {
    d[std::to_string(s)] = dim;
  }
  doc["recommended_d"] = std::move(d);
  doc["skipped_records"] = report.skipped_records;
  auto ks = nlohmann::ordered_json::object();
  for (const auto& [k, count] : report.k_counts) {
    ks[std::to_string(k)] = count;
  }
  doc["k_counts"] = std::move(ks);
  doc["caveat"] = report.caveat;
  return doc;
}

}  // namespace embdim
