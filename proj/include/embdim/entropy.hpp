#pragma once

// Log-factorials, log-binomials and the entropy rooflines of sparse lookup
// signatures. Every value is in bits.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace embdim {

/// Information content in bits. Always finite and non-negative.
class EntropyBits {
 public:
  constexpr EntropyBits() = default;
  explicit EntropyBits(double bits);

  constexpr double bits() const { return bits_; }

  friend constexpr auto operator<=>(EntropyBits, EntropyBits) = default;

 private:
  double bits_ = 0.0;
};

enum class EntropyMethod {
  exact,       // oracle: compensated summation / high-order asymptotic series
  stirling,    // ln n! ~ n ln n - n + ln(2 pi n)/2
  ramanujan,   // ln n! ~ n ln n - n + ln(n + 4n^2 + 8n^3)/6 + ln(pi)/2
  paper_table, // reproduces the published roofline table, see multi_lookup_entropy
};

std::string_view to_string(EntropyMethod method);
/// Accepts "exact", "stirling", "ramanujan", "paper-table".
EntropyMethod parse_entropy_method(std::string_view name);

/// (n items, k selected per lookup, t bits per weight). t == 0 is a binary
/// presence lookup.
struct LookupSignature {
  std::uint64_t n = 1;
  std::uint64_t k = 0;
  std::uint32_t t = 0;

  friend bool operator==(const LookupSignature&, const LookupSignature&) = default;
};

inline constexpr std::uint64_t kMaxItemCount = std::uint64_t{1} << 40;

/// Throws DomainError unless 1 <= n <= 2^40 and k <= n.
void validate(const LookupSignature& sig);

/// d elements of s bits each; capacity d*s bits.
struct EmbeddingSpec {
  std::uint64_t d = 1;
  std::uint32_t s = 32;

  friend bool operator==(const EmbeddingSpec&, const EmbeddingSpec&) = default;
};

/// log2(n!). Exact sums log2 i directly up to kFactorialSeriesCrossover and
/// switches to the Stirling series with terms through 1/(1260 n^5) above it.
/// stirling/ramanujan require n >= 1; negative outputs are clamped to zero.
EntropyBits log2_factorial(std::int64_t n, EntropyMethod method);

inline constexpr std::int64_t kFactorialSeriesCrossover = 1'000'000;

namespace detail {
/// The asymptotic branch of exact log2 n!, exposed for crossover tests.
double log2_factorial_series(double n);
}  // namespace detail

/// log2 C(n, k).
///
/// The exact method accumulates sum_{i=1..m} log2(n-m+i) - log2(i) with
/// m = min(k, n-k), so C(n, k) is never formed and no large factorials are
/// subtracted. Beyond kBinomialSummationLimit terms it falls back to the
/// asymptotic factorial series, where all three arguments exceed the series
/// crossover.
///
/// The ramanujan method evaluates the closed-form expansion
///   n log2(n/(n-k)) + k log2((n-k)/k)
///     + log2[f(n) / (f(n-k) f(k))] / 6 - log2(pi) / 2,  f(x) = x + 4x^2 + 8x^3
/// and is undefined for k in {0, n}. So is stirling.
EntropyBits log2_binomial(std::int64_t n, std::int64_t k, EntropyMethod method);

inline constexpr std::int64_t kBinomialSummationLimit = 10'000'000;

/// -sum p_i log2 p_i with 0 log2 0 = 0. Entries must be non-negative and sum
/// to 1 within kDistributionTolerance.
EntropyBits entropy_of_distribution(std::span<const double> p);

inline constexpr double kDistributionTolerance = 1e-9;

/// d * s: the entropy of an embedding vector whose 2^(ds) values are equally
/// likely.
EntropyBits embedding_entropy_uniform(const EmbeddingSpec& spec);

/// log2 n: a uniformly chosen one-hot lookup.
EntropyBits single_lookup_entropy(std::uint64_t n);

/// Entropy of a uniformly chosen binary k-of-n lookup (sig.t must be 0).
///
/// paper_table reproduces the published table: log2 n when k == 1 and
/// log2 C(n,k) - k log2 e otherwise (clamped at zero). The printed values
/// carry that k log2 e offset relative to the exact roofline.
///
/// C(n, 1) = n, so k == 1 yields log2 n for every method.
EntropyBits multi_lookup_entropy(const LookupSignature& sig, EntropyMethod method);

/// t*k + multi_lookup_entropy(sig with t = 0).
EntropyBits weighted_lookup_entropy(const LookupSignature& sig, EntropyMethod method);

}  // namespace embdim
