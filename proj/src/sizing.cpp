#include "embdim/sizing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "embdim/errors.hpp"

namespace embdim {

namespace {

std::uint64_t ceil_div_bits(double h, double s) {
  return static_cast<std::uint64_t>(std::ceil(h / s));
}

}  // namespace

std::string_view to_string(Rounding rounding) {
  return rounding == Rounding::ceil ? "ceil" : "table-compat";
}

Rounding parse_rounding(std::string_view name) {
  if (name == "ceil") return Rounding::ceil;
  if (name == "table-compat") return Rounding::table_compat;
  throw DomainError("unknown rounding '" + std::string(name) +
                    "' (expected ceil or table-compat)");
}

bool is_supported_element_bits(std::uint32_t s) {
  return s == 8 || s == 16 || s == 32 || s == 64;
}

std::uint64_t recommend_dim(EntropyBits h, std::uint32_t s, Rounding rounding) {
  if (!is_supported_element_bits(s)) {
    throw DomainError("s must be one of 8, 16, 32, 64 (got " + std::to_string(s) + ")");
  }
  if (rounding == Rounding::ceil) {
    return std::max<std::uint64_t>(1, ceil_div_bits(h.bits(), s));
  }
  if (s == 64) {
    throw DomainError("table-compat rounding supports s in {8, 16, 32} only");
  }
  const std::uint64_t base = std::max<std::uint64_t>(1, ceil_div_bits(h.bits(), 32.0));
  return (32 / s) * base;
}

EntropyBits lookup_entropy(const LookupSignature& sig, EntropyMethod method) {
  validate(sig);
  if (sig.k == 0) {
    return EntropyBits(0.0);
  }
  return weighted_lookup_entropy(sig, method);
}

std::vector<RooflineRow> roofline_table(std::span<const LookupSignature> signatures,
                                        std::span<const std::uint32_t> s_values,
                                        EntropyMethod method, Rounding rounding) {
  if (s_values.empty()) {
    throw DomainError("roofline_table needs at least one element width");
  }
  const std::uint32_t s_max = *std::max_element(s_values.begin(), s_values.end());
  std::vector<RooflineRow> rows;
  rows.reserve(signatures.size());
  for (const auto& sig : signatures) {
    RooflineRow row{sig, lookup_entropy(sig, method), {}, EntropyBits{}};
    for (const std::uint32_t s : s_values) {
      row.d_by_s[s] = recommend_dim(row.h_lookup, s, rounding);
    }
    row.h_embedding = embedding_entropy_uniform({row.d_by_s.at(s_max), s_max});
    rows.push_back(std::move(row));
  }
  return rows;
}

EntropyCurve entropy_curve(std::uint64_t n, std::uint64_t k_first, std::uint64_t k_last,
                           EntropyMethod method) {
  validate({n, 0, 0});
  const bool exact = method == EntropyMethod::exact;
  const std::uint64_t lo = exact ? 0 : 1;
  const std::uint64_t hi = exact ? n : n - 1;
  if (k_first > k_last || k_first < lo || k_last > hi) {
    throw DomainError("k range " + std::to_string(k_first) + ":" +
                      std::to_string(k_last) + " must lie within [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "] for method " +
                      std::string(to_string(method)));
  }
  EntropyCurve curve{n, {}};
  curve.points.reserve(k_last - k_first + 1);
  for (std::uint64_t k = k_first; k <= k_last; ++k) {
    const double h = k == 0 ? 0.0 : multi_lookup_entropy({n, k, 0}, method).bits();
    curve.points.push_back({k, h});
  }
  return curve;
}

EntropyCurve entropy_curve(std::uint64_t n, std::span<const std::uint64_t> ks,
                           EntropyMethod method) {
  EntropyCurve curve{n, {}};
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (i > 0 && ks[i] <= ks[i - 1]) {
      throw DomainError("curve k values must be strictly increasing");
    }
    const auto part = entropy_curve(n, ks[i], ks[i], method);
    curve.points.push_back(part.points.front());
  }
  return curve;
}

std::vector<LookupSignature> table_signatures() {
  std::vector<LookupSignature> sigs;
  for (const std::uint64_t k : {1, 10, 100, 1000}) {
    for (const std::uint64_t n : {1'000'000, 10'000'000, 100'000'000}) {
      sigs.push_back({n, k, 0});
    }
  }
  return sigs;
}

std::vector<LookupSignature> figure_signatures() {
  std::vector<LookupSignature> sigs;
  for (const std::uint64_t n : {1'000'000, 10'000'000, 20'000'000, 100'000'000}) {
    for (const std::uint64_t k : {1, 10, 100, 1000}) {
      sigs.push_back({n, k, 0});
    }
  }
  return sigs;
}

}  // namespace embdim
