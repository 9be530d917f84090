#include "embdim/verify.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>
#include <string>

#include "embdim/errors.hpp"
#include "embdim/kernels.hpp"

namespace embdim {

namespace {

using Table = EmbeddingTable<double>;
using Lookup = SparseLookup<double>;
using Batch = LookupBatch<double>;
using Dense = Eigen::MatrixXd;

struct Instance {
  Table table;
  Batch batch;
  Lookup dense_lookup;  // touches every row
};

Instance make_instance(const KernelCheckConfig& config, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  std::uniform_real_distribution<double> magnitude(0.25, 2.0);
  std::bernoulli_distribution negative(0.5);
  auto weight = [&] { return negative(rng) ? -magnitude(rng) : magnitude(rng); };

  Table::Matrix values(config.n, config.d);
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    values.data()[i] = value(rng);
  }

  std::vector<Eigen::Index> items(static_cast<std::size_t>(config.n));
  std::iota(items.begin(), items.end(), Eigen::Index{0});
  const auto k = std::min(config.k, config.n);
  Batch batch;
  for (std::int64_t j = 0; j < config.r; ++j) {
    std::shuffle(items.begin(), items.end(), rng);
    Lookup a;
    for (std::int64_t e = 0; e < k; ++e) {
      a.entries.push_back({items[static_cast<std::size_t>(e)], weight()});
    }
    batch.lookups.push_back(std::move(a));
  }
  Lookup dense;
  for (Eigen::Index i = 0; i < config.n; ++i) {
    dense.entries.push_back({i, weight()});
  }
  return {Table(std::move(values)), std::move(batch), std::move(dense)};
}

// Error relative to the magnitude of the accumulated terms, |V|^T |A|.
double relative_error(const Dense& got, const Dense& expected, const Dense& scale) {
  const double denom = scale.cwiseAbs().maxCoeff();
  const double err = (got - expected).cwiseAbs().maxCoeff();
  return denom > 0.0 ? err / denom : err;
}

bool bit_equal(const Dense& a, const Dense& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::equal(a.data(), a.data() + a.size(), b.data(),
                    [](double x, double y) { return x == y; });
}

Lookup scaled(const Lookup& a, double alpha) {
  Lookup out = a;
  for (auto& e : out.entries) {
    e.weight *= alpha;
  }
  return out;
}

class Recorder {
 public:
  explicit Recorder(std::string name) { result_.name = std::move(name); }

  void record(bool ok, std::uint64_t seed, const std::string& detail) {
    ++result_.trials;
    if (!ok && result_.passed) {
      result_.passed = false;
      result_.counterexample_seed = seed;
      result_.detail = detail;
    }
  }

  PropertyResult result() const { return result_; }

 private:
  PropertyResult result_;
};

}  // namespace

std::vector<PropertyResult> run_kernel_checks(const KernelCheckConfig& config) {
  if (config.n < 1 || config.d < 1 || config.r < 1 || config.k < 1 || config.trials < 1) {
    throw DomainError("verify-kernels needs n, d, r, k, trials >= 1");
  }

  const std::function<Eigen::VectorXd(const Table&, const Lookup&)> weighted =
      [&config](const Table& v, const Lookup& a) -> Eigen::VectorXd {
    if (!config.inject_fault || a.entries.empty()) {
      return lookup_weighted(v, a);
    }
    Lookup broken = a;
    broken.entries.front().weight = -broken.entries.front().weight;
    return lookup_weighted(v, broken);
  };

  Recorder one_hot("one-hot-equivalence");
  Recorder weighted_oracle("weighted-dense-oracle");
  Recorder batch_oracle("batch-dense-oracle");
  Recorder batch_rows("batch-rows-match-weighted");
  Recorder linearity("linearity");
  Recorder permutation("batch-permutation");
  Recorder deletion("batch-deletion");

  for (std::int64_t trial = 0; trial < config.trials; ++trial) {
    const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(trial);
    const Instance inst = make_instance(config, seed);
    const Dense& v = inst.table.values();
    const Dense v_abs_t = v.cwiseAbs().transpose();
    const auto n = inst.table.n();

    bool gather_ok = true;
    for (Eigen::Index i = 0; i < n && gather_ok; ++i) {
      const Eigen::VectorXd e = Eigen::VectorXd::Unit(n, i);
      const Eigen::VectorXd expected = v.transpose() * e;
      gather_ok = bit_equal(gather_single(inst.table, i), expected);
    }
    one_hot.record(gather_ok, seed, "gather differs from V^T e_i");

    bool weighted_ok = true;
    std::vector<Lookup> singles = inst.batch.lookups;
    singles.push_back(inst.dense_lookup);
    for (const auto& a : singles) {
      const Eigen::VectorXd dense_a = densify(a, n);
      const Eigen::VectorXd expected = v.transpose() * dense_a;
      const Eigen::VectorXd scale = v_abs_t * dense_a.cwiseAbs();
      weighted_ok = weighted_ok && relative_error(weighted(inst.table, a), expected, scale) <=
                                       kKernelRelativeTolerance;
    }
    weighted_oracle.record(weighted_ok, seed, "weighted lookup differs from V^T a");

    const Dense u = lookup_batch(inst.table, inst.batch);
    const Dense dense_a = densify(inst.batch, n);
    const Dense expected_u = (v.transpose() * dense_a).transpose();
    const Dense scale_u = (v_abs_t * dense_a.cwiseAbs()).transpose();
    batch_oracle.record(relative_error(u, expected_u, scale_u) <= kKernelRelativeTolerance,
                        seed, "batch lookup differs from (V^T A)^T");

    bool rows_ok = true;
    for (std::size_t j = 0; j < inst.batch.lookups.size(); ++j) {
      const Dense row = weighted(inst.table, inst.batch.lookups[j]).transpose();
      rows_ok = rows_ok && bit_equal(u.row(static_cast<Eigen::Index>(j)), row);
    }
    batch_rows.record(rows_ok, seed, "batch row differs from single weighted lookup");

    const Lookup& a = inst.batch.lookups.front();
    const Lookup& b = inst.batch.lookups.back();
    const double alpha = 0.75;
    const double beta = -1.5;
    Lookup combined = scaled(a, alpha);
    for (const auto& e : scaled(b, beta).entries) {
      combined.entries.push_back(e);
    }
    const Eigen::VectorXd lhs = weighted(inst.table, combined);
    const Eigen::VectorXd rhs =
        alpha * weighted(inst.table, a) + beta * weighted(inst.table, b);
    const Eigen::VectorXd lin_scale =
        std::abs(alpha) * (v_abs_t * densify(a, n).cwiseAbs()) +
        std::abs(beta) * (v_abs_t * densify(b, n).cwiseAbs());
    linearity.record(relative_error(lhs, rhs, lin_scale) <= kKernelRelativeTolerance, seed,
                     "lookup of alpha*a + beta*b is not alpha*lookup(a) + beta*lookup(b)");

    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::vector<std::size_t> order(inst.batch.lookups.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    Batch permuted;
    for (const auto j : order) {
      permuted.lookups.push_back(inst.batch.lookups[j]);
    }
    const Dense u_perm = lookup_batch(inst.table, permuted);
    bool perm_ok = true;
    for (std::size_t j = 0; j < order.size(); ++j) {
      perm_ok = perm_ok && bit_equal(u_perm.row(static_cast<Eigen::Index>(j)),
                                     u.row(static_cast<Eigen::Index>(order[j])));
    }
    permutation.record(perm_ok, seed, "permuting lookups did not permute output rows");

    bool delete_ok = true;
    if (inst.batch.lookups.size() > 1) {
      const auto drop = std::uniform_int_distribution<std::size_t>(
          0, inst.batch.lookups.size() - 1)(rng);
      Batch reduced = inst.batch;
      reduced.lookups.erase(reduced.lookups.begin() + static_cast<std::ptrdiff_t>(drop));
      const Dense u_reduced = lookup_batch(inst.table, reduced);
      for (std::size_t j = 0, src = 0; j < reduced.lookups.size(); ++j, ++src) {
        if (src == drop) ++src;
        delete_ok = delete_ok && bit_equal(u_reduced.row(static_cast<Eigen::Index>(j)),
                                           u.row(static_cast<Eigen::Index>(src)));
      }
    }
    deletion.record(delete_ok, seed, "deleting a lookup changed another output row");
  }

  return {one_hot.result(),     weighted_oracle.result(), batch_oracle.result(),
          batch_rows.result(),  linearity.result(),       permutation.result(),
          deletion.result()};
}

}  // namespace embdim
