#pragma once

// Embedding-dimension recommendations derived from lookup entropy rooflines.

#include <cstdint>
#include <map>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "embdim/entropy.hpp"

namespace embdim {

enum class Rounding {
  ceil,          // minimal sufficient d = max(1, ceil(H / s))
  table_compat,  // d = (32 / s) * ceil(H / 32), matching the published table
};

std::string_view to_string(Rounding rounding);
/// Accepts "ceil" and "table-compat".
Rounding parse_rounding(std::string_view name);

/// Element widths an embedding may use.
bool is_supported_element_bits(std::uint32_t s);

/// Smallest d under the chosen rounding with d * s >= H. table_compat does
/// not support s = 64.
std::uint64_t recommend_dim(EntropyBits h, std::uint32_t s, Rounding rounding);

/// Entropy of a uniformly chosen lookup with signature sig: zero for k == 0,
/// weighted_lookup_entropy otherwise.
EntropyBits lookup_entropy(const LookupSignature& sig, EntropyMethod method);

struct RooflineRow {
  LookupSignature signature;
  EntropyBits h_lookup;
  std::map<std::uint32_t, std::uint64_t> d_by_s;
  EntropyBits h_embedding;  // d(s_max) * s_max
};

std::vector<RooflineRow> roofline_table(std::span<const LookupSignature> signatures,
                                        std::span<const std::uint32_t> s_values,
                                        EntropyMethod method, Rounding rounding);

struct CurvePoint {
  std::uint64_t k = 0;
  double h_bits = 0.0;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

struct EntropyCurve {
  std::uint64_t n = 1;
  std::vector<CurvePoint> points;  // strictly increasing k
};

/// H(n, k) for every k in [k_first, k_last]. Exact accepts k in [0, n]; the
/// approximations and paper-table need k in [1, n-1].
EntropyCurve entropy_curve(std::uint64_t n, std::uint64_t k_first,
                           std::uint64_t k_last, EntropyMethod method);

/// H(n, k) at the listed k values (ascending, no repeats).
EntropyCurve entropy_curve(std::uint64_t n, std::span<const std::uint64_t> ks,
                           EntropyMethod method);

/// n in {1M, 10M, 100M} x k in {1, 10, 100, 1000}, ordered by k then n.
std::vector<LookupSignature> table_signatures();

/// The table's signatures plus n = 20M, grouped by n.
std::vector<LookupSignature> figure_signatures();

}  // namespace embdim
