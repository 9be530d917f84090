#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "embdim/errors.hpp"
#include "embdim/sizing.hpp"
#include "oracles.hpp"

using namespace embdim;

namespace {

struct PrintedRow {
  std::uint64_t n, k;
  double h;
  std::uint64_t d8, d16, d32, h_embedding;
};

// The published roofline table.
const std::vector<PrintedRow> kPrinted = {
    {1'000'000, 1, 19.9, 4, 2, 1, 32},
    {10'000'000, 1, 23.2, 4, 2, 1, 32},
    {100'000'000, 1, 26.5, 4, 2, 1, 32},
    {1'000'000, 10, 163.0, 24, 12, 6, 192},
    {10'000'000, 10, 196.3, 28, 14, 7, 224},
    {100'000'000, 10, 229.5, 32, 16, 8, 256},
    {1'000'000, 100, 1324.1, 168, 84, 42, 1344},
    {10'000'000, 100, 1656.3, 208, 104, 52, 1664},
    {100'000'000, 100, 1988.5, 252, 126, 63, 2016},
    {1'000'000, 1000, 9958.0, 1248, 624, 312, 9984},
    {10'000'000, 1000, 13281.2, 1664, 832, 416, 13312},
    {100'000'000, 1000, 16603.3, 2076, 1038, 519, 16608},
};

const std::vector<std::uint32_t> kTableWidths{8, 16, 32};

}  // namespace

TEST_CASE("recommend_dim examples") {
  CHECK(recommend_dim(EntropyBits(1656.3), 32, Rounding::table_compat) == 52);
  CHECK(recommend_dim(EntropyBits(1656.3), 16, Rounding::table_compat) == 104);
  CHECK(recommend_dim(EntropyBits(1656.3), 8, Rounding::table_compat) == 208);
  CHECK(recommend_dim(EntropyBits(32.0), 32, Rounding::ceil) == 1);
  CHECK(recommend_dim(EntropyBits(19.93), 8, Rounding::ceil) == 3);
  CHECK(recommend_dim(EntropyBits(19.93), 8, Rounding::table_compat) == 4);
  CHECK(recommend_dim(EntropyBits(0.0), 8, Rounding::ceil) == 1);
  CHECK(recommend_dim(EntropyBits(0.0), 8, Rounding::table_compat) == 4);
  CHECK(recommend_dim(EntropyBits(100.0), 64, Rounding::ceil) == 2);
}

TEST_CASE("recommend_dim errors") {
  CHECK_THROWS_AS(recommend_dim(EntropyBits(10.0), 64, Rounding::table_compat), DomainError);
  CHECK_THROWS_AS(recommend_dim(EntropyBits(10.0), 12, Rounding::ceil), DomainError);
  CHECK_THROWS_AS(parse_rounding("floor"), DomainError);
  CHECK(parse_rounding("table-compat") == Rounding::table_compat);
}

TEST_CASE("property: sufficiency, minimality and scale consistency") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> bits(0.0, 50'000.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const EntropyBits h(trial < 10 ? 32.0 * trial : bits(rng));
    for (const std::uint32_t s : {8u, 16u, 32u, 64u}) {
      const auto d = recommend_dim(h, s, Rounding::ceil);
      CHECK(static_cast<double>(d * s) >= h.bits());
      if (d > 1) CHECK(static_cast<double>((d - 1) * s) < h.bits());
      if (s != 64) {
        CHECK(static_cast<double>(recommend_dim(h, s, Rounding::table_compat) * s) >= h.bits());
      }
    }
    const auto d8 = recommend_dim(h, 8, Rounding::table_compat);
    const auto d16 = recommend_dim(h, 16, Rounding::table_compat);
    const auto d32 = recommend_dim(h, 32, Rounding::table_compat);
    CHECK(d8 == 2 * d16);
    CHECK(d16 == 2 * d32);
  }
}

TEST_CASE("roofline_table reproduces the published table in compatibility mode") {
  const auto sigs = table_signatures();
  REQUIRE(sigs.size() == kPrinted.size());
  const auto rows = roofline_table(sigs, kTableWidths, EntropyMethod::paper_table,
                                   Rounding::table_compat);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& p = kPrinted[i];
    CAPTURE(p.n);
    CAPTURE(p.k);
    CHECK(rows[i].signature == LookupSignature{p.n, p.k, 0});
    CHECK(std::abs(rows[i].h_lookup.bits() - p.h) <= 1.0);
    CHECK(rows[i].d_by_s.at(8) == p.d8);
    CHECK(rows[i].d_by_s.at(16) == p.d16);
    CHECK(rows[i].d_by_s.at(32) == p.d32);
    CHECK(rows[i].h_embedding.bits() == static_cast<double>(p.h_embedding));
    CHECK(rows[i].h_embedding >= rows[i].h_lookup);
  }
}

TEST_CASE("roofline_table small cases") {
  const std::vector<LookupSignature> one{{1024, 1, 0}};
  const std::vector<std::uint32_t> s32{32};
  const auto rows = roofline_table(one, s32, EntropyMethod::exact, Rounding::ceil);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].h_lookup.bits() == 10.0);
  CHECK(rows[0].d_by_s.at(32) == 1);
  CHECK(rows[0].h_embedding.bits() == 32.0);

  const std::vector<LookupSignature> empty_lookup{{50, 0, 0}};
  CHECK(roofline_table(empty_lookup, s32, EntropyMethod::ramanujan, Rounding::ceil)[0]
            .h_lookup.bits() == 0.0);
  const std::vector<std::uint32_t> none;
  CHECK_THROWS_AS(roofline_table(one, none, EntropyMethod::exact, Rounding::ceil),
                  DomainError);
}

TEST_CASE("roofline_table exact mode exceeds the printed column by k log2 e") {
  const auto rows = roofline_table(table_signatures(), kTableWidths, EntropyMethod::exact,
                                   Rounding::table_compat);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& p = kPrinted[i];
    const double oracle =
        static_cast<double>(embdim::testing::lgamma_log2_binomial(p.n, p.k));
    CHECK(std::abs(rows[i].h_lookup.bits() - oracle) < 1e-6);
    const double offset = p.k == 1 ? 0.0 : static_cast<double>(p.k) * std::numbers::log2e;
    CHECK(std::abs(rows[i].h_lookup.bits() - p.h - offset) <= 1.0);
  }
  CHECK(rows[6].h_lookup.bits() == doctest::Approx(1468.4).epsilon(0.05 / 1468.4));
}

TEST_CASE("entropy_curve for n = 64") {
  const auto curve = entropy_curve(64, 1, 63, EntropyMethod::exact);
  REQUIRE(curve.points.size() == 63);
  CHECK(curve.points.front().h_bits == 6.0);
  CHECK(curve.points.back().h_bits == 6.0);
  std::uint64_t argmax = 0;
  double best = 0.0;
  for (const auto& p : curve.points) {
    CHECK(p.h_bits == doctest::Approx(static_cast<double>(
                          embdim::testing::pascal_log2_binomial(64, p.k)))
                          .epsilon(1e-13));
    if (p.h_bits > best) {
      best = p.h_bits;
      argmax = p.k;
    }
  }
  CHECK(argmax == 32);
  CHECK(std::abs(best - 60.66861663700344) < 1e-9);
}

TEST_CASE("entropy_curve degenerate and invalid ranges") {
  const auto single = entropy_curve(4096, 1, 1, EntropyMethod::ramanujan);
  REQUIRE(single.points.size() == 1);
  CHECK(single.points[0] == CurvePoint{1, 12.0});

  const auto full = entropy_curve(10, 0, 10, EntropyMethod::exact);
  CHECK(full.points.front().h_bits == 0.0);
  CHECK(full.points.back().h_bits == 0.0);

  CHECK_THROWS_AS(entropy_curve(10, 0, 5, EntropyMethod::ramanujan), DomainError);
  CHECK_THROWS_AS(entropy_curve(10, 1, 10, EntropyMethod::ramanujan), DomainError);
  CHECK_THROWS_AS(entropy_curve(10, 1, 11, EntropyMethod::exact), DomainError);
  CHECK_THROWS_AS(entropy_curve(10, 5, 4, EntropyMethod::exact), DomainError);
}

TEST_CASE("property: curve symmetry for n <= 10^4") {
  for (const std::uint64_t n : {1u, 2u, 63u, 64u, 999u, 10'000u}) {
    const auto curve = entropy_curve(n, 0, n, EntropyMethod::exact);
    for (std::uint64_t k = 0; k <= n; ++k) {
      CHECK(std::abs(curve.points[k].h_bits - curve.points[n - k].h_bits) <= 1e-9);
    }
  }
}

TEST_CASE("figure signatures are monotone in n and k") {
  const std::vector<std::uint64_t> ks{1, 10, 100, 1000};
  std::vector<EntropyCurve> curves;
  for (const std::uint64_t n : {1'000'000u, 10'000'000u, 20'000'000u, 100'000'000u}) {
    curves.push_back(entropy_curve(n, ks, EntropyMethod::exact));
  }
  CHECK(figure_signatures().size() == 16);
  for (std::size_t c = 0; c < curves.size(); ++c) {
    for (std::size_t i = 1; i < ks.size(); ++i) {
      CHECK(curves[c].points[i].h_bits > curves[c].points[i - 1].h_bits);
      if (c > 0) CHECK(curves[c].points[i].h_bits > curves[c - 1].points[i].h_bits);
    }
  }
  const std::vector<std::uint64_t> unsorted{10, 1};
  CHECK_THROWS_AS(entropy_curve(100, unsorted, EntropyMethod::exact), DomainError);
}
