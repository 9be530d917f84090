#pragma once

// Reference embedding lookups: one-hot gather, weighted bag, and batched
// sparse lookup. Accumulation always follows entry order, so results are
// reproducible bit for bit.

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "embdim/errors.hpp"

namespace embdim {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using RowMajorMatrix =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Immutable n x d table; row i is the embedding of item i.
template <typename Scalar = double>
class EmbeddingTable {
 public:
  using Matrix = RowMajorMatrix<Scalar>;

  explicit EmbeddingTable(Matrix values) : values_(std::move(values)) {
    if (values_.rows() < 1 || values_.cols() < 1) {
      throw DomainError("embedding table needs n >= 1 and d >= 1");
    }
    if (!values_.allFinite()) {
      throw DomainError("embedding table values must be finite");
    }
  }

  Eigen::Index n() const { return values_.rows(); }
  Eigen::Index d() const { return values_.cols(); }
  const Matrix& values() const { return values_; }
  auto row(Eigen::Index i) const { return values_.row(i); }

 private:
  Matrix values_;
};

template <typename Scalar = double>
struct LookupEntry {
  Eigen::Index index = 0;
  Scalar weight = Scalar(1);
};

/// Sparse column a of the lookup matrix: (index, weight) pairs in the order
/// they are accumulated. Repeated indices are allowed and simply add up.
template <typename Scalar = double>
struct SparseLookup {
  std::vector<LookupEntry<Scalar>> entries;

  static SparseLookup binary(const std::vector<Eigen::Index>& indices) {
    SparseLookup a;
    a.entries.reserve(indices.size());
    for (const auto i : indices) {
      a.entries.push_back({i, Scalar(1)});
    }
    return a;
  }
};

template <typename Scalar = double>
struct LookupBatch {
  std::vector<SparseLookup<Scalar>> lookups;
};

namespace detail {

inline void check_index(Eigen::Index i, Eigen::Index n) {
  if (i < 0 || i >= n) {
    throw DomainError("lookup index " + std::to_string(i) + " outside [0, " +
                      std::to_string(n) + ")");
  }
}

}  // namespace detail

/// Row i of V, i.e. V^T e_i.
template <typename Scalar>
Vector<Scalar> gather_single(const EmbeddingTable<Scalar>& table, Eigen::Index i) {
  detail::check_index(i, table.n());
  return table.row(i).transpose();
}

/// V^T a = sum of weight * row(index), accumulated in entry order.
template <typename Scalar>
Vector<Scalar> lookup_weighted(const EmbeddingTable<Scalar>& table,
                               const SparseLookup<Scalar>& lookup) {
  for (const auto& e : lookup.entries) {
    detail::check_index(e.index, table.n());
    if (!std::isfinite(static_cast<double>(e.weight))) {
      throw DomainError("lookup weight must be finite");
    }
  }
  Vector<Scalar> out = Vector<Scalar>::Zero(table.d());
  for (const auto& e : lookup.entries) {
    out.noalias() += e.weight * table.row(e.index).transpose();
  }
  return out;
}

/// U = (V^T A)^T: row j is lookup_weighted(V, A.lookups[j]).
template <typename Scalar>
RowMajorMatrix<Scalar> lookup_batch(const EmbeddingTable<Scalar>& table,
                                    const LookupBatch<Scalar>& batch) {
  if (batch.lookups.empty()) {
    throw DomainError("lookup batch must hold at least one lookup");
  }
  RowMajorMatrix<Scalar> out(static_cast<Eigen::Index>(batch.lookups.size()), table.d());
  for (std::size_t j = 0; j < batch.lookups.size(); ++j) {
    try {
      out.row(static_cast<Eigen::Index>(j)) =
          lookup_weighted(table, batch.lookups[j]).transpose();
    } catch (const DomainError& e) {
      throw DomainError("lookup " + std::to_string(j) + ": " + e.what());
    }
  }
  return out;
}

/// Dense column a in R^n; the densification the sparse kernels stand in for.
template <typename Scalar>
Vector<Scalar> densify(const SparseLookup<Scalar>& lookup, Eigen::Index n) {
  Vector<Scalar> a = Vector<Scalar>::Zero(n);
  for (const auto& e : lookup.entries) {
    detail::check_index(e.index, n);
    a(e.index) += e.weight;
  }
  return a;
}

/// Dense n x r matrix A whose columns are the batch lookups.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> densify(
    const LookupBatch<Scalar>& batch, Eigen::Index n) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a(
      n, static_cast<Eigen::Index>(batch.lookups.size()));
  for (std::size_t j = 0; j < batch.lookups.size(); ++j) {
    a.col(static_cast<Eigen::Index>(j)) = densify(batch.lookups[j], n);
  }
  return a;
}

}  // namespace embdim
