#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "lemtree/rng.hpp"

using namespace lemtree;

// Known-answer vectors generated independently with numpy.random.Philox
// (the 4x64, 10-round variant). numpy advances the counter before producing
// each block, so numpy's first block for counter c is block(c + 1).
TEST_CASE("philox known answers match the reference stream") {
  auto out = rng::Philox4x64::block({1, 0, 0, 0}, {0, 0});
  CHECK(out[0] == 0x02f4ba6408e4d89bULL);
  CHECK(out[1] == 0x3dd62b0b9ca8c5b2ULL);
  CHECK(out[2] == 0x1c8667a55d902e79ULL);
  CHECK(out[3] == 0x907d7a052fd5b4dcULL);

  auto out2 = rng::Philox4x64::block({2, 0, 0, 0}, {0, 0});
  CHECK(out2[0] == 0x809bf322883987c3ULL);
  CHECK(out2[1] == 0x471128b9e807f7ddULL);
  CHECK(out2[2] == 0xf250ba0dbec065b7ULL);
  CHECK(out2[3] == 0xfc6ed66767a457bcULL);

  auto out3 = rng::Philox4x64::block({1, 0, 0, 0}, {0xdeadbeefULL, 0});
  CHECK(out3[0] == 0xa4e930dc738acaf1ULL);
  CHECK(out3[1] == 0xb1c7ecc6484e9cf0ULL);
  CHECK(out3[2] == 0x6b88a411909298aaULL);
  CHECK(out3[3] == 0x66f3c896201f7262ULL);

  auto out4 = rng::Philox4x64::block({6, 0, 1, 0}, {7, 42});
  CHECK(out4[0] == 0x8ca0b4e4d0136478ULL);
  CHECK(out4[1] == 0x1b786ceb3ae85f37ULL);
  CHECK(out4[2] == 0xaf09b4355c0ee13eULL);
  CHECK(out4[3] == 0x5d35c65cef17c5d3ULL);
}

TEST_CASE("stream draws follow the block sequence") {
  rng::Stream s(0, 0);
  auto b0 = rng::Philox4x64::block({0, 0, 0, 0}, {0, 0});
  auto b1 = rng::Philox4x64::block({1, 0, 0, 0}, {0, 0});
  CHECK(s.next_u64() == b0[0]);
  CHECK(s.next_u64() == b0[1]);
  CHECK(s.next_u64() == b0[2]);
  CHECK(s.next_u64() == b0[3]);
  CHECK(s.next_u64() == b1[0]);  // second block: 0x02f4ba6408e4d89b
  CHECK(s.next_u64() == 0x3dd62b0b9ca8c5b2ULL);
}

TEST_CASE("streams are reproducible and distinct") {
  rng::Stream a(123, 7), b(123, 7), c(123, 8), d(124, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  std::set<std::uint64_t> overlap;
  rng::Stream a2(123, 7);
  for (int i = 0; i < 100; ++i) overlap.insert(a2.next_u64());
  int hits = 0;
  for (int i = 0; i < 100; ++i) {
    if (overlap.count(c.next_u64())) ++hits;
    if (overlap.count(d.next_u64())) ++hits;
  }
  CHECK(hits == 0);
}

TEST_CASE("next_double in [0,1), next_below unbiased range") {
  rng::Stream s(42, 0);
  for (int i = 0; i < 10000; ++i) {
    double u = s.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  long counts[7] = {0};
  for (int i = 0; i < 70000; ++i) ++counts[s.next_below(7)];
  for (long c : counts) {
    CHECK(c > 9000);
    CHECK(c < 11000);
  }
  CHECK(s.next_below(1) == 0);
}

TEST_CASE("gaussian moments") {
  rng::Stream s(9, 3);
  double sum = 0, sumsq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double g = s.next_gaussian();
    sum += g;
    sumsq += g * g;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sumsq / n - 1.0) < 0.02);
}
