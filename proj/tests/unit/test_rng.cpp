#include <doctest.h>

#include <set>
#include <vector>

#include "oracles.hpp"
#include "priorcheck/rng.hpp"

using namespace priorcheck;

TEST_CASE("philox4x32-10 known-answer vectors") {
  // Random123 kat_vectors
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) ==
        PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                      {0xffffffff, 0xffffffff}) ==
        PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                      {0xa4093822, 0x299f31d0}) ==
        PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("stream output is a function of (seed, stream_id, index)") {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
  CHECK(a.position() == 100);

  RngStream c(42, 8), d(43, 7);
  RngStream e(42, 7);
  std::set<std::uint64_t> firsts{c(), d(), e()};
  CHECK(firsts.size() == 3);
}

TEST_CASE("uniform stays inside the open unit interval") {
  RngStream rng(1, 0);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("normal and gamma moments") {
  constexpr int kDraws = 100000;
  RngStream rng(5, 3);
  std::vector<double> z(kDraws), g(kDraws), g_small(kDraws);
  for (auto& x : z) x = rng.normal();
  for (auto& x : g) x = rng.gamma(2.5);
  for (auto& x : g_small) x = rng.gamma(0.5);

  const auto mz = oracle::moments(z);
  CHECK(std::abs(mz.mean) < 4 * mz.mean_se);
  CHECK(std::abs(mz.variance - 1.0) < 4 * mz.variance_se);

  const auto mg = oracle::moments(g);
  CHECK(std::abs(mg.mean - 2.5) < 4 * mg.mean_se);
  CHECK(std::abs(mg.variance - 2.5) < 4 * mg.variance_se);

  const auto ms = oracle::moments(g_small);
  CHECK(std::abs(ms.mean - 0.5) < 4 * ms.mean_se);
}

TEST_CASE("adjacent stream ids are uncorrelated") {
  constexpr std::size_t kDraws = 100000;
  std::vector<double> a(kDraws), b(kDraws);
  for (std::size_t k = 0; k < kDraws; ++k) {
    RngStream s0(9, stage_stream(1, k)), s1(9, stage_stream(1, k + 1));
    a[k] = s0.normal();
    b[k] = s1.normal();
  }
  CHECK(std::abs(oracle::correlation(a, b)) < 4.0 / std::sqrt(double(kDraws)));
}

TEST_CASE("stage streams are disjoint") {
  CHECK(stage_stream(0, 5) == 5);
  CHECK(stage_stream(1, 0) == (std::uint64_t{1} << 60));
  CHECK(stage_stream(2, 3) != stage_stream(1, 3));
}
