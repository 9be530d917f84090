#pragma once

// Empirical entropy of a real lookup dataset: one pass to canonicalize and
// count the distinct combinations, then the plug-in estimate over the counts.

#include <compare>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "embdim/entropy.hpp"

namespace embdim {

struct LookupRecord {
  std::vector<std::uint64_t> indices;
  std::optional<std::vector<double>> weights;
};

/// Canonical byte string of one lookup: sorted distinct indices, each as
/// 8 little-endian bytes, followed in weighted mode by its 8-byte weight code.
class CombinationKey {
 public:
  CombinationKey() = default;
  explicit CombinationKey(std::string bytes) : bytes_(std::move(bytes)) {}

  const std::string& bytes() const { return bytes_; }
  std::string hex() const;
  static CombinationKey from_hex(std::string_view hex);

  friend auto operator<=>(const CombinationKey&, const CombinationKey&) = default;

 private:
  std::string bytes_;
};

struct WeightRange {
  double lo = 0.0;
  double hi = 1.0;

  friend bool operator==(const WeightRange&, const WeightRange&) = default;
};

inline constexpr std::uint32_t kMaxWeightBits = 32;

/// Uniform 2^t-cell quantizer over [lo, hi]: cell j holds
/// [lo + j*w, lo + (j+1)*w) with w = (hi - lo) / 2^t, the top cell is closed,
/// and values outside the range clamp to the end cells.
std::uint64_t quantize_weight(double w, std::uint32_t t, const WeightRange& range);

/// Throws RecordError for out-of-range indices, non-finite weights, or
/// missing/mismatched weights when t > 0. Duplicate indices are merged by
/// summing their weights; t == 0 ignores weights.
CombinationKey canonicalize(const LookupRecord& record, std::uint64_t n, std::uint32_t t,
                            std::optional<WeightRange> range = std::nullopt);

struct ScanParams {
  std::uint64_t n = 1;
  std::uint32_t t = 0;
  std::optional<WeightRange> range;  // used only when t > 0

  friend bool operator==(const ScanParams&, const ScanParams&) = default;
};

class CombinationHistogram {
 public:
  explicit CombinationHistogram(ScanParams params);

  const ScanParams& params() const { return params_; }
  const std::map<CombinationKey, std::uint64_t>& counts() const { return counts_; }
  /// Distinct-index count per record -> number of records.
  const std::map<std::uint64_t, std::uint64_t>& k_counts() const { return k_counts_; }
  std::uint64_t total() const { return total_; }
  std::uint64_t distinct() const { return counts_.size(); }
  std::uint64_t skipped() const { return skipped_; }
  bool empty() const { return counts_.empty(); }
  std::uint64_t k_max() const;

  void add(const CombinationKey& key, std::uint64_t k, std::uint64_t count = 1);
  void add_skipped(std::uint64_t count = 1) { skipped_ += count; }

  friend bool operator==(const CombinationHistogram&, const CombinationHistogram&) = default;
  friend CombinationHistogram merge(const CombinationHistogram& a,
                                    const CombinationHistogram& b);

 private:
  ScanParams params_;
  std::map<CombinationKey, std::uint64_t> counts_;
  std::map<std::uint64_t, std::uint64_t> k_counts_;
  std::uint64_t total_ = 0;
  std::uint64_t skipped_ = 0;
};

/// Global [min, max] of the merged weights over the valid records; nullopt
/// when t == 0 or no weights are present. A degenerate range [w, w] widens
/// to [w, w + 1] so every weight lands in code 0.
std::optional<WeightRange> observe_weight_range(std::span<const LookupRecord> records,
                                                std::uint64_t n, std::uint32_t t);

/// Counts canonical combinations. Invalid records are skipped and counted.
/// When t > 0 and params.range is unset the range comes from a first pass
/// over the records. Throws EmptyInputError if nothing valid was seen.
CombinationHistogram scan(std::span<const LookupRecord> records, ScanParams params);

/// Splits records into `shards` contiguous pieces, scans them concurrently
/// against one global weight range and merges in shard order. Identical to
/// scan().
CombinationHistogram scan_sharded(std::span<const LookupRecord> records, ScanParams params,
                                  std::size_t shards);

/// Pointwise sum. Throws MergeError unless both sides share ScanParams.
CombinationHistogram merge(const CombinationHistogram& a, const CombinationHistogram& b);

/// Deterministic text form (JSON, keys ordered), for diffing and tests.
std::string serialize(const CombinationHistogram& hist);

struct EmpiricalReport {
  std::uint64_t distinct = 0;
  std::uint64_t total = 0;
  EntropyBits h_empirical;
  EntropyBits h_roofline;
  std::uint64_t k_max = 0;
  std::map<std::uint32_t, std::uint64_t> recommended_d;
  std::uint64_t skipped_records = 0;
  std::map<std::uint64_t, std::uint64_t> k_counts;
  std::string caveat;
};

/// Plug-in (maximum-likelihood) entropy of the observed combinations, and the
/// exact roofline at (n, k_max, t) for comparison.
EmpiricalReport empirical_entropy(const CombinationHistogram& hist);

// Line-delimited input: either {"indices": [...], "weights": [...]} or a
// whitespace-separated list of integer indices. Blank lines are ignored.

/// Throws RecordError on a malformed line.
LookupRecord parse_record_line(std::string_view line);

struct ParsedRecords {
  std::vector<LookupRecord> records;
  std::uint64_t malformed = 0;
  std::uint64_t lines = 0;
};

/// Throws IoError with the line number if the stream fails mid-read.
ParsedRecords read_records(std::istream& in);

}  // namespace embdim
