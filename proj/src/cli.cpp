#include "embdim/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string_view>

#include <CLI11.hpp>

#include "embdim/empirical.hpp"
#include "embdim/entropy.hpp"
#include "embdim/errors.hpp"
#include "embdim/format.hpp"
#include "embdim/sizing.hpp"
#include "embdim/verify.hpp"

namespace embdim::cli {

namespace {

struct OutputTarget {
  std::string path;  // empty: stdout
};

void emit(const OutputTarget& target, const std::string& text, std::ostream& out) {
  if (target.path.empty()) {
    out << text;
    return;
  }
  namespace fs = std::filesystem;
  const fs::path final_path(target.path);
  fs::path tmp = final_path;
  tmp += ".tmp";
  {
    std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
    if (!file) {
      throw IoError("cannot open " + tmp.string() + " for writing");
    }
    file << text;
    file.close();
    if (!file) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw IoError("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, final_path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into " + final_path.string());
  }
}

struct KRange {
  std::uint64_t first = 0;
  std::uint64_t last = 0;
};

KRange parse_k_range(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw DomainError("--k range must be written a:b (got '" + std::string(text) + "')");
  }
  auto number = [&](std::string_view part) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size()) {
      throw DomainError("--k range bounds must be non-negative integers (got '" +
                        std::string(text) + "')");
    }
    return v;
  };
  return {number(text.substr(0, colon)), number(text.substr(colon + 1))};
}

std::vector<std::uint32_t> checked_s_values(const std::vector<std::uint32_t>& s_values) {
  if (s_values.empty()) {
    throw DomainError("--s needs at least one element width");
  }
  for (const auto s : s_values) {
    if (!is_supported_element_bits(s)) {
      throw DomainError("--s values must be one of 8, 16, 32, 64 (got " +
                        std::to_string(s) + ")");
    }
  }
  return s_values;
}

std::string dump(const nlohmann::ordered_json& doc) { return doc.dump(2) + "\n"; }

struct RooflineArgs {
  std::uint64_t n = 0;
  std::uint64_t k = 0;
  std::uint32_t t = 0;
  std::vector<std::uint32_t> s_values{8, 16, 32};
  std::vector<std::string> methods{"exact"};
  std::string rounding = "ceil";
};

std::string cmd_roofline(const RooflineArgs& a) {
  const LookupSignature sig{a.n, a.k, a.t};
  validate(sig);
  const auto rounding = parse_rounding(a.rounding);
  const auto s_values = checked_s_values(a.s_values);
  std::vector<EntropyMethod> methods;
  for (const auto& m : a.methods) {
    methods.push_back(parse_entropy_method(m));
  }

  nlohmann::ordered_json doc;
  doc["n"] = sig.n;
  doc["k"] = sig.k;
  doc["t"] = sig.t;
  doc["rounding"] = to_string(rounding);
  auto results = nlohmann::ordered_json::array();
  for (const auto method : methods) {
    const auto h = lookup_entropy(sig, method);
    nlohmann::ordered_json r;
    r["method"] = to_string(method);
    r["h_bits"] = h.bits();
    auto d = nlohmann::ordered_json::object();
    auto capacity = nlohmann::ordered_json::object();
    for (const auto s : s_values) {
      const auto dim = recommend_dim(h, s, rounding);
      d[std::to_string(s)] = dim;
      capacity[std::to_string(s)] = embedding_entropy_uniform({dim, s}).bits();
    }
    r["recommended_d"] = std::move(d);
    r["capacity_bits"] = std::move(capacity);
    results.push_back(std::move(r));
  }
  doc["results"] = std::move(results);
  return dump(doc);
}

struct TableArgs {
  std::string method = "paper-table";
  std::string rounding = "table-compat";
  std::string format = "csv";
};

std::string cmd_table(const TableArgs& a) {
  const auto method = parse_entropy_method(a.method);
  const auto rounding = parse_rounding(a.rounding);
  const std::vector<std::uint32_t> s_values{8, 16, 32};
  const auto rows = roofline_table(table_signatures(), s_values, method, rounding);
  if (a.format == "json") {
    return dump(roofline_json(rows, method, rounding));
  }
  return write_csv(roofline_csv(rows));
}

struct CurveArgs {
  std::uint64_t n = 0;
  std::string k_range;
  std::string method = "exact";
  std::string signatures;
  std::string format = "csv";
  std::string svg_path;
};

std::string cmd_curve(const CurveArgs& a, std::string& svg_out) {
  const auto method = parse_entropy_method(a.method);
  std::vector<EntropyCurve> curves;
  SvgOptions svg;
  if (!a.signatures.empty()) {
    if (a.signatures != "builtin") {
      throw DomainError("--signatures accepts only 'builtin'");
    }
    std::map<std::uint64_t, std::vector<std::uint64_t>> by_n;
    for (const auto& sig : figure_signatures()) {
      by_n[sig.n].push_back(sig.k);
    }
    for (const auto& [n, ks] : by_n) {
      curves.push_back(entropy_curve(n, ks, method));
    }
    svg.title = "Lookup entropy, sample signatures";
    svg.log_x = true;
  } else {
    if (a.n < 1) {
      throw DomainError("curve needs --n >= 1 (or --signatures builtin)");
    }
    const KRange range =
        a.k_range.empty() ? KRange{1, a.n > 1 ? a.n - 1 : 1} : parse_k_range(a.k_range);
    curves.push_back(entropy_curve(a.n, range.first, range.last, method));
    svg.title = "Lookup entropy, n=" + std::to_string(a.n);
  }
  const bool grouped = curves.size() > 1 || !a.signatures.empty();
  const std::string csv =
      write_csv(grouped ? grouped_curve_csv(curves) : curve_csv(curves.front()));
  const std::string plot = curves_svg(curves, svg);
  if (!a.svg_path.empty()) {
    svg_out = plot;
  }
  return a.format == "svg" ? plot : csv;
}

struct ScanArgs {
  std::string input;
  std::uint64_t n = 0;
  std::uint32_t t = 0;
  std::size_t shards = 1;
};

std::string cmd_scan(const ScanArgs& a, std::ostream& err) {
  if (a.n < 1 || a.n > kMaxItemCount) {
    throw DomainError("scan needs 1 <= n <= 2^40 (got n=" + std::to_string(a.n) + ")");
  }
  if (a.t > kMaxWeightBits) {
    throw DomainError("t must be at most " + std::to_string(kMaxWeightBits));
  }
  std::ifstream file(a.input, std::ios::binary);
  if (!file) {
    throw IoError("cannot open input " + a.input);
  }
  ParsedRecords parsed = read_records(file);
  auto hist = scan_sharded(parsed.records, {a.n, a.t, std::nullopt}, a.shards);
  hist.add_skipped(parsed.malformed);
  const auto report = empirical_entropy(hist);
  if (report.skipped_records > 0) {
    err << "warning: skipped " << report.skipped_records << " invalid record(s)\n";
  }
  return dump(report_json(report));
}

std::pair<std::string, bool> cmd_verify(const KernelCheckConfig& config) {
  std::ostringstream text;
  bool all = true;
  for (const auto& r : run_kernel_checks(config)) {
    if (r.passed) {
      text << "PASS " << r.name << " (" << r.trials << " trials)\n";
    } else {
      all = false;
      text << "FAIL " << r.name << ": " << r.detail << " (counterexample seed "
           << r.counterexample_seed << ")\n";
    }
  }
  text << (all ? "all kernel properties hold\n" : "kernel verification FAILED\n");
  return {text.str(), all};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entropy rooflines and dimension sizing for embedding lookups", "embdim"};
  app.require_subcommand(1);
  std::string output;

  RooflineArgs roofline;
  auto* roofline_cmd = app.add_subcommand("roofline", "Entropy roofline of one signature");
  roofline_cmd->add_option("--n", roofline.n, "Item count")->required();
  roofline_cmd->add_option("--k", roofline.k, "Items selected per lookup")->required();
  roofline_cmd->add_option("--t", roofline.t, "Bits per weight (0 = binary)");
  roofline_cmd->add_option("--s", roofline.s_values, "Element widths")->delimiter(',');
  roofline_cmd->add_option("--method", roofline.methods,
                           "exact, stirling, ramanujan or paper-table (repeatable)")
      ->delimiter(',');
  roofline_cmd->add_option("--rounding", roofline.rounding, "ceil or table-compat");
  roofline_cmd->add_option("--output", output, "Output file (default stdout)");

  TableArgs table;
  auto* table_cmd = app.add_subcommand("table", "Roofline table for the built-in signatures");
  table_cmd->add_option("--method", table.method, "Entropy method");
  table_cmd->add_option("--rounding", table.rounding, "ceil or table-compat");
  table_cmd->add_option("--format", table.format)->check(CLI::IsMember({"csv", "json"}));
  table_cmd->add_option("--output", output, "Output file (default stdout)");

  CurveArgs curve;
  auto* curve_cmd = app.add_subcommand("curve", "Entropy as a function of k");
  curve_cmd->add_option("--n", curve.n, "Item count");
  curve_cmd->add_option("--k", curve.k_range, "Inclusive k range a:b");
  curve_cmd->add_option("--method", curve.method, "Entropy method");
  curve_cmd->add_option("--signatures", curve.signatures, "Named signature set: builtin");
  curve_cmd->add_option("--format", curve.format)->check(CLI::IsMember({"csv", "svg"}));
  curve_cmd->add_option("--svg", curve.svg_path, "Also write an SVG plot here");
  curve_cmd->add_option("--output", output, "Output file (default stdout)");

  ScanArgs scan_args;
  auto* scan_cmd = app.add_subcommand("scan", "Empirical entropy of a lookup dataset");
  scan_cmd->add_option("--input", scan_args.input, "Line-delimited records")->required();
  scan_cmd->add_option("--n", scan_args.n, "Declared item count")->required();
  scan_cmd->add_option("--t", scan_args.t, "Weight bits (0 ignores weights)");
  scan_cmd->add_option("--shards", scan_args.shards, "Parallel scan shards")
      ->check(CLI::PositiveNumber);
  scan_cmd->add_option("--output", output, "Output file (default stdout)");

  KernelCheckConfig verify;
  auto* verify_cmd =
      app.add_subcommand("verify-kernels", "Check lookup kernels against dense products");
  verify_cmd->add_option("--n", verify.n, "Table rows");
  verify_cmd->add_option("--d", verify.d, "Table columns");
  verify_cmd->add_option("--r", verify.r, "Lookups per batch");
  verify_cmd->add_option("--k", verify.k, "Entries per lookup");
  verify_cmd->add_option("--seed", verify.seed, "Base seed");
  verify_cmd->add_option("--trials", verify.trials, "Random instances");
  verify_cmd->add_flag("--inject-fault", verify.inject_fault)->group("");
  verify_cmd->add_option("--output", output, "Output file (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream cli_out;
    std::ostringstream cli_err;
    const int code = app.exit(e, cli_out, cli_err);
    out << cli_out.str();
    err << cli_err.str();
    return code == 0 ? kSuccess : kDomainError;
  }

  try {
    const OutputTarget target{output};
    if (*roofline_cmd) {
      emit(target, cmd_roofline(roofline), out);
    } else if (*table_cmd) {
      emit(target, cmd_table(table), out);
    } else if (*curve_cmd) {
      std::string svg;
      const std::string text = cmd_curve(curve, svg);
      if (!curve.svg_path.empty()) {
        emit(OutputTarget{curve.svg_path}, svg, out);
      }
      emit(target, text, out);
    } else if (*scan_cmd) {
      emit(target, cmd_scan(scan_args, err), out);
    } else if (*verify_cmd) {
      const auto [text, ok] = cmd_verify(verify);
      emit(target, text, out);
      if (!ok) {
        err << "error: kernel verification failed\n";
        return kVerificationFailure;
      }
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const EmptyInputError& e) {
    err << "error: " << e.what() << "\n";
    return kDomainError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kDomainError;
  }
  return kSuccess;
}

}  // namespace embdim::cli
