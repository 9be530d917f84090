#include "embdim/empirical.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <utility>

#include <json.hpp>

#include "embdim/detail/compensated_sum.hpp"
#include "embdim/errors.hpp"
#include "embdim/sizing.hpp"

namespace embdim {

namespace {

using Entry = std::pair<std::uint64_t, double>;

void append_le64(std::string& out, std::uint64_t v) {
  for (int byte = 0; byte < 8; ++byte) {
    out.push_back(static_cast<char>((v >> (8 * byte)) & 0xffu));
  }
}

// Validates the record and returns its (index, merged weight) pairs sorted by
// index. Weights are 1 when absent.
std::vector<Entry> merged_entries(const LookupRecord& record, std::uint64_t n,
                                  std::uint32_t t) {
  const auto& weights = record.weights;
  if (t > 0 && !weights) {
    throw RecordError("weighted scan (t > 0) requires weights");
  }
  if (weights && weights->size() != record.indices.size()) {
    throw RecordError("weights and indices differ in length");
  }
  std::vector<Entry> entries;
  entries.reserve(record.indices.size());
  for (std::size_t i = 0; i < record.indices.size(); ++i) {
    const std::uint64_t index = record.indices[i];
    if (index >= n) {
      throw RecordError("index " + std::to_string(index) + " outside [0, " +
                        std::to_string(n) + ")");
    }
    const double w = weights ? (*weights)[i] : 1.0;
    if (!std::isfinite(w)) {
      throw RecordError("non-finite weight");
    }
    entries.emplace_back(index, w);
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.first < b.first; });
  std::vector<Entry> merged;
  merged.reserve(entries.size());
  for (const auto& e : entries) {
    if (!merged.empty() && merged.back().first == e.first) {
      merged.back().second += e.second;
    } else {
      merged.push_back(e);
    }
  }
  return merged;
}

CombinationKey key_from_entries(const std::vector<Entry>& entries, std::uint32_t t,
                                const std::optional<WeightRange>& range) {
  std::string bytes;
  bytes.reserve(entries.size() * (t > 0 ? 16 : 8));
  for (const auto& [index, weight] : entries) {
    append_le64(bytes, index);
    if (t > 0) {
      append_le64(bytes, quantize_weight(weight, t, *range));
    }
  }
  return CombinationKey(std::move(bytes));
}

void check_weight_bits(std::uint32_t t) {
  if (t > kMaxWeightBits) {
    throw DomainError("t must be at most " + std::to_string(kMaxWeightBits));
  }
}

// Scans without the empty-input check; shards may legitimately be empty.
CombinationHistogram scan_shard(std::span<const LookupRecord> records,
                                const ScanParams& params) {
  CombinationHistogram hist(params);
  for (const auto& record : records) {
    try {
      const auto entries = merged_entries(record, params.n, params.t);
      hist.add(key_from_entries(entries, params.t, params.range), entries.size());
    } catch (const RecordError&) {
      hist.add_skipped();
    }
  }
  return hist;
}

ScanParams resolve_params(std::span<const LookupRecord> records, ScanParams params) {
  if (params.n < 1) {
    throw DomainError("scan: n must be >= 1");
  }
  check_weight_bits(params.t);
  if (params.t == 0) {
    params.range.reset();
  } else if (!params.range) {
    params.range = observe_weight_range(records, params.n, params.t);
    if (!params.range) {
      params.range = WeightRange{0.0, 1.0};
    }
  } else if (!(params.range->lo < params.range->hi)) {
    throw DomainError("weight range needs lo < hi");
  }
  return params;
}

void require_nonempty(const CombinationHistogram& hist, std::size_t record_count) {
  if (record_count == 0) {
    throw EmptyInputError("no records in input");
  }
  if (hist.empty()) {
    throw EmptyInputError("no valid records in input (" +
                          std::to_string(hist.skipped()) + " skipped)");
  }
}

std::uint64_t parse_index_token(std::string_view token) {
  std::uint64_t value = 0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw RecordError("bad index token '" + std::string(token) + "'");
  }
  return value;
}

LookupRecord parse_json_record(std::string_view line) {
  const auto doc = nlohmann::json::parse(line.begin(), line.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw RecordError("malformed JSON record");
  }
  const auto indices = doc.find("indices");
  if (indices == doc.end() || !indices->is_array()) {
    throw RecordError("JSON record lacks an \"indices\" array");
  }
  LookupRecord record;
  for (const auto& v : *indices) {
    if (!v.is_number_unsigned()) {
      throw RecordError("indices must be non-negative integers");
    }
    record.indices.push_back(v.get<std::uint64_t>());
  }
  const auto weights = doc.find("weights");
  if (weights != doc.end() && !weights->is_null()) {
    if (!weights->is_array()) {
      throw RecordError("\"weights\" must be an array");
    }
    std::vector<double> w;
    for (const auto& v : *weights) {
      if (!v.is_number()) {
        throw RecordError("weights must be numbers");
      }
      w.push_back(v.get<double>());
    }
    record.weights = std::move(w);
  }
  return record;
}

}  // namespace

std::string CombinationKey::hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes_.size() * 2);
  for (const char c : bytes_) {
    const auto b = static_cast<unsigned char>(c);
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

CombinationKey CombinationKey::from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) {
    throw DomainError("hex key has odd length");
  }
  std::string bytes;
  bytes.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    unsigned value = 0;
    const auto [ptr, ec] = std::from_chars(hex.data() + i, hex.data() + i + 2, value, 16);
    if (ec != std::errc{} || ptr != hex.data() + i + 2) {
      throw DomainError("bad hex key");
    }
    bytes.push_back(static_cast<char>(value));
  }
  return CombinationKey(std::move(bytes));
}

std::uint64_t quantize_weight(double w, std::uint32_t t, const WeightRange& range) {
  check_weight_bits(t);
  if (t == 0) {
    return 0;
  }
  if (!(range.lo < range.hi)) {
    throw DomainError("weight range needs lo < hi");
  }
  const double cells = std::ldexp(1.0, static_cast<int>(t));
  const double position = std::floor((w - range.lo) / (range.hi - range.lo) * cells);
  return static_cast<std::uint64_t>(std::clamp(position, 0.0, cells - 1.0));
}

CombinationKey canonicalize(const LookupRecord& record, std::uint64_t n, std::uint32_t t,
                            std::optional<WeightRange> range) {
  check_weight_bits(t);
  if (t > 0 && (!range || !(range->lo < range->hi))) {
    throw DomainError("weighted canonicalization needs a weight range with lo < hi");
  }
  return key_from_entries(merged_entries(record, n, t), t, range);
}

CombinationHistogram::CombinationHistogram(ScanParams params) : params_(params) {}

std::uint64_t CombinationHistogram::k_max() const {
  return k_counts_.empty() ? 0 : k_counts_.rbegin()->first;
}

void CombinationHistogram::add(const CombinationKey& key, std::uint64_t k,
                               std::uint64_t count) {
  counts_[key] += count;
  k_counts_[k] += count;
  total_ += count;
}

std::optional<WeightRange> observe_weight_range(std::span<const LookupRecord> records,
                                                std::uint64_t n, std::uint32_t t) {
  if (t == 0) {
    return std::nullopt;
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& record : records) {
    try {
      for (const auto& [index, weight] : merged_entries(record, n, t)) {
        lo = std::min(lo, weight);
        hi = std::max(hi, weight);
      }
    } catch (const RecordError&) {
    }
  }
  if (lo > hi) {
    return std::nullopt;
  }
  if (lo == hi) {
    return WeightRange{lo, lo + 1.0};
  }
  return WeightRange{lo, hi};
}

CombinationHistogram scan(std::span<const LookupRecord> records, ScanParams params) {
  auto hist = scan_shard(records, resolve_params(records, params));
  require_nonempty(hist, records.size());
  return hist;
}

CombinationHistogram scan_sharded(std::span<const LookupRecord> records, ScanParams params,
                                  std::size_t shards) {
  const ScanParams resolved = resolve_params(records, params);
  shards = std::clamp<std::size_t>(shards, 1, std::max<std::size_t>(1, records.size()));
  const std::size_t chunk = (records.size() + shards - 1) / shards;
  std::vector<std::future<CombinationHistogram>> parts;
  for (std::size_t begin = 0; begin < records.size(); begin += chunk) {
    const auto piece = records.subspan(begin, std::min(chunk, records.size() - begin));
    parts.push_back(std::async(std::launch::async,
                               [piece, &resolved] { return scan_shard(piece, resolved); }));
  }
  CombinationHistogram hist(resolved);
  for (auto& part : parts) {
    hist = merge(hist, part.get());
  }
  require_nonempty(hist, records.size());
  return hist;
}

CombinationHistogram merge(const CombinationHistogram& a, const CombinationHistogram& b) {
  if (!(a.params() == b.params())) {
    throw MergeError("cannot merge histograms scanned with different (n, t, weight range)");
  }
  CombinationHistogram out = a;
  for (const auto& [key, count] : b.counts_) {
    out.counts_[key] += count;
  }
  for (const auto& [k, count] : b.k_counts_) {
    out.k_counts_[k] += count;
  }
  out.total_ += b.total_;
  out.skipped_ += b.skipped_;
  return out;
}

std::string serialize(const CombinationHistogram& hist) {
  nlohmann::ordered_json doc;
  doc["n"] = hist.params().n;
  doc["t"] = hist.params().t;
  if (hist.params().range) {
    doc["weight_range"] = {hist.params().range->lo, hist.params().range->hi};
  } else {
    doc["weight_range"] = nullptr;
  }
  doc["total"] = hist.total();
  doc["skipped"] = hist.skipped();
  auto counts = nlohmann::ordered_json::object();
  for (const auto& [key, count] : hist.counts()) {
    counts[key.hex()] = count;
  }
  doc["counts"] = std::move(counts);
  auto ks = nlohmann::ordered_json::object();
  for (const auto& [k, count] : hist.k_counts()) {
    ks[std::to_string(k)] = count;
  }
  doc["k_counts"] = std::move(ks);
  return doc.dump();
}

EmpiricalReport empirical_entropy(const CombinationHistogram& hist) {
  if (hist.empty()) {
    throw DomainError("empirical_entropy needs a non-empty histogram");
  }
  const double total = static_cast<double>(hist.total());
  detail::CompensatedSum h;
  for (const auto& [key, count] : hist.counts()) {
    const double p = static_cast<double>(count) / total;
    h += -p * std::log2(p);
  }
  // The plug-in estimate never exceeds log2(distinct); clamp away rounding.
  const double bound = std::log2(static_cast<double>(hist.distinct()));

  EmpiricalReport report;
  report.distinct = hist.distinct();
  report.total = hist.total();
  report.h_empirical = EntropyBits(std::clamp(h.value(), 0.0, bound));
  report.k_max = hist.k_max();
  report.h_roofline = lookup_entropy(
      {hist.params().n, std::min(report.k_max, hist.params().n), hist.params().t},
      EntropyMethod::exact);
  for (const std::uint32_t s : {8u, 16u, 32u}) {
    report.recommended_d[s] = recommend_dim(report.h_empirical, s, Rounding::ceil);
  }
  report.skipped_records = hist.skipped();
  report.k_counts = hist.k_counts();
  report.caveat =
      "plug-in estimate over observed combinations only; unseen combinations are "
      "not corrected for, so undersampled data underestimates the true entropy";
  return report;
}

LookupRecord parse_record_line(std::string_view line) {
  const auto first = line.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    throw RecordError("empty record");
  }
  if (line[first] == '{') {
    return parse_json_record(line);
  }
  LookupRecord record;
  std::size_t pos = first;
  while (pos < line.size()) {
    const auto end = line.find_first_of(" \t\r", pos);
    const auto token = line.substr(pos, end == std::string_view::npos ? line.size() - pos
                                                                       : end - pos);
    record.indices.push_back(parse_index_token(token));
    if (end == std::string_view::npos) {
      break;
    }
    pos = line.find_first_not_of(" \t\r", end);
    if (pos == std::string_view::npos) {
      break;
    }
  }
  return record;
}

ParsedRecords read_records(std::istream& in) {
  ParsedRecords parsed;
  std::string line;
  while (std::getline(in, line)) {
    ++parsed.lines;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    try {
      parsed.records.push_back(parse_record_line(line));
    } catch (const RecordError&) {
      ++parsed.malformed;
    }
  }
  if (in.bad()) {
    throw IoError("read failure", parsed.lines + 1);
  }
  return parsed;
}

}  // namespace embdim
