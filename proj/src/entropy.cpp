#include "embdim/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "embdim/detail/compensated_sum.hpp"
#include "embdim/errors.hpp"

namespace embdim {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kLog2E = std::numbers::log2e;

// ln n! by the Stirling series; accurate to far below 1e-9 bits for n > 1e6.
double ln_factorial_series(double n) {
  const double inv = 1.0 / n;
  const double inv2 = inv * inv;
  const double correction =
      inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0)));
  return n * (std::log(n) - 1.0) + 0.5 * std::log(2.0 * std::numbers::pi * n) +
         correction;
}

double log2_factorial_exact(std::int64_t n) {
  if (n <= kFactorialSeriesCrossover) {
    detail::CompensatedSum sum;
    for (std::int64_t i = 2; i <= n; ++i) {
      sum += std::log2(static_cast<double>(i));
    }
    return sum.value();
  }
  return ln_factorial_series(static_cast<double>(n)) / kLn2;
}

double ln_factorial_stirling(double n) {
  return n * std::log(n) - n + 0.5 * std::log(2.0 * std::numbers::pi * n);
}

double ln_factorial_ramanujan(double n) {
  return n * std::log(n) - n + std::log(n + 4.0 * n * n + 8.0 * n * n * n) / 6.0 +
         0.5 * std::log(std::numbers::pi);
}

double ramanujan_cubic(double x) { return x + 4.0 * x * x + 8.0 * x * x * x; }

double log2_binomial_exact(std::int64_t n, std::int64_t k) {
  const std::int64_t m = std::min(k, n - k);
  if (m == 0) {
    return 0.0;
  }
  if (m > kBinomialSummationLimit) {
    return log2_factorial_exact(n) - log2_factorial_exact(m) -
           log2_factorial_exact(n - m);
  }
  detail::CompensatedSum sum;
  const std::int64_t base = n - m;
  for (std::int64_t i = 1; i <= m; ++i) {
    sum += std::log2(static_cast<double>(base + i));
    sum += -std::log2(static_cast<double>(i));
  }
  return sum.value();
}

double log2_binomial_ramanujan(double n, double k) {
  const double rest = n - k;
  // n log2(n / (n-k)) = n log2(1 + k / (n-k)); log1p keeps small k/n accurate.
  const double head = n * std::log1p(k / rest) * kLog2E;
  const double middle = k * std::log2(rest / k);
  const double cubic = std::log2(ramanujan_cubic(n) / ramanujan_cubic(rest) /
                                 ramanujan_cubic(k)) /
                       6.0;
  return head + middle + cubic - 0.5 * std::log2(std::numbers::pi);
}

double clamp_bits(double bits) { return std::max(0.0, bits); }

void require_binomial_method(EntropyMethod method) {
  if (method == EntropyMethod::paper_table) {
    throw DomainError("paper-table is a lookup-entropy mode, not a factorial method");
  }
}

}  // namespace

double detail::log2_factorial_series(double n) { return ln_factorial_series(n) / kLn2; }

EntropyBits::EntropyBits(double bits) : bits_(bits) {
  if (!std::isfinite(bits) || bits < 0.0) {
    throw DomainError("entropy must be finite and non-negative, got " +
                      std::to_string(bits));
  }
}

std::string_view to_string(EntropyMethod method) {
  switch (method) {
    case EntropyMethod::exact:
      return "exact";
    case EntropyMethod::stirling:
      return "stirling";
    case EntropyMethod::ramanujan:
      return "ramanujan";
    case EntropyMethod::paper_table:
      return "paper-table";
  }
  return "unknown";
}

EntropyMethod parse_entropy_method(std::string_view name) {
  if (name == "exact") return EntropyMethod::exact;
  if (name == "stirling") return EntropyMethod::stirling;
  if (name == "ramanujan") return EntropyMethod::ramanujan;
  if (name == "paper-table") return EntropyMethod::paper_table;
  throw DomainError("unknown entropy method '" + std::string(name) +
                    "' (expected exact, stirling, ramanujan or paper-table)");
}

void validate(const LookupSignature& sig) {
  if (sig.n < 1 || sig.n > kMaxItemCount) {
    throw DomainError("n must satisfy 1 <= n <= 2^40 (got n=" +
                      std::to_string(sig.n) + ")");
  }
  if (sig.k > sig.n) {
    throw DomainError("k must satisfy 0 <= k <= n (got k=" + std::to_string(sig.k) +
                      ", n=" + std::to_string(sig.n) + ")");
  }
}

EntropyBits log2_factorial(std::int64_t n, EntropyMethod method) {
  require_binomial_method(method);
  if (n < 0) {
    throw DomainError("log2_factorial: n must be non-negative (got " +
                      std::to_string(n) + ")");
  }
  if (method == EntropyMethod::exact) {
    return EntropyBits(log2_factorial_exact(n));
  }
  if (n == 0) {
    throw DomainError("log2_factorial: approximations need n >= 1");
  }
  const double x = static_cast<double>(n);
  const double ln = method == EntropyMethod::stirling ? ln_factorial_stirling(x)
                                                      : ln_factorial_ramanujan(x);
  return EntropyBits(clamp_bits(ln / kLn2));
}

EntropyBits log2_binomial(std::int64_t n, std::int64_t k, EntropyMethod method) {
  require_binomial_method(method);
  if (n < 0 || k < 0 || k > n) {
    throw DomainError("log2_binomial: need 0 <= k <= n (got n=" + std::to_string(n) +
                      ", k=" + std::to_string(k) + ")");
  }
  if (method == EntropyMethod::exact) {
    return EntropyBits(log2_binomial_exact(n, k));
  }
  if (k == 0 || k == n) {
    throw DomainError("log2_binomial: " + std::string(to_string(method)) +
                      " is undefined for k = 0 or k = n");
  }
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  if (method == EntropyMethod::ramanujan) {
    return EntropyBits(clamp_bits(log2_binomial_ramanujan(nd, kd)));
  }
  const double ln = ln_factorial_stirling(nd) - ln_factorial_stirling(kd) -
                    ln_factorial_stirling(nd - kd);
  return EntropyBits(clamp_bits(ln / kLn2));
}

EntropyBits entropy_of_distribution(std::span<const double> p) {
  detail::CompensatedSum total;
  for (const double pi : p) {
    if (!std::isfinite(pi) || pi < 0.0) {
      throw DomainError("distribution entries must be finite and non-negative");
    }
    total += pi;
  }
  if (std::abs(total.value() - 1.0) > kDistributionTolerance) {
    throw DomainError("distribution must sum to 1 (got " +
                      std::to_string(total.value()) + ")");
  }
  detail::CompensatedSum h;
  for (const double pi : p) {
    if (pi > 0.0) {
      h += -pi * std::log2(pi);
    }
  }
  const double bound = p.empty() ? 0.0 : std::log2(static_cast<double>(p.size()));
  return EntropyBits(std::clamp(h.value(), 0.0, bound));
}

EntropyBits embedding_entropy_uniform(const EmbeddingSpec& spec) {
  if (spec.d < 1 || spec.s < 1) {
    throw DomainError("embedding spec needs d >= 1 and s >= 1");
  }
  return EntropyBits(static_cast<double>(spec.d) * static_cast<double>(spec.s));
}

EntropyBits single_lookup_entropy(std::uint64_t n) {
  if (n < 1) {
    throw DomainError("single_lookup_entropy: n must be >= 1");
  }
  return EntropyBits(std::log2(static_cast<double>(n)));
}

EntropyBits multi_lookup_entropy(const LookupSignature& sig, EntropyMethod method) {
  validate(sig);
  if (sig.t != 0) {
    throw DomainError("multi_lookup_entropy expects a binary signature (t=0)");
  }
  if (sig.k < 1) {
    throw DomainError("multi_lookup_entropy: k must satisfy 1 <= k <= n");
  }
  if (sig.k == 1) {
    return single_lookup_entropy(sig.n);
  }
  const auto n = static_cast<std::int64_t>(sig.n);
  const auto k = static_cast<std::int64_t>(sig.k);
  if (method == EntropyMethod::paper_table) {
    const double exact = log2_binomial(n, k, EntropyMethod::exact).bits();
    return EntropyBits(clamp_bits(exact - static_cast<double>(k) * kLog2E));
  }
  return log2_binomial(n, k, method);
}

EntropyBits weighted_lookup_entropy(const LookupSignature& sig, EntropyMethod method) {
  const LookupSignature binary{sig.n, sig.k, 0};
  const double weight_bits = static_cast<double>(sig.t) * static_cast<double>(sig.k);
  return EntropyBits(weight_bits + multi_lookup_entropy(binary, method).bits());
}

}  // namespace embdim
