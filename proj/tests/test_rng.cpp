#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <vector>

#include "contrastive/rng.hpp"

using contrastive::Rng;

TEST_CASE("identical seeds produce identical streams") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("derived streams differ from each other and the base") {
  const std::uint64_t s = 7;
  std::set<std::uint64_t> seen;
  for (std::uint64_t stream = 0; stream < 64; ++stream) seen.insert(Rng::derive(s, stream));
  CHECK(seen.size() == 64);
  CHECK(Rng::derive(1, 0) != Rng::derive(2, 0));
  CHECK(Rng::derive(1, 0) == Rng::derive(1, 0));
}

TEST_CASE("uniform stays in [0,1) and fills the range") {
  Rng rng(3);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double x = rng.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  CHECK(lo < 0.001);
  CHECK(hi > 0.999);
}

TEST_CASE("below covers every residue without bias artifacts") {
  Rng rng(9);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[static_cast<std::size_t>(rng.below(7))];
  for (int c : counts) {
    CHECK(c > 9000);
    CHECK(c < 11000);
  }
}

TEST_CASE("normal moments match the standard distribution") {
  Rng rng(12);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("shuffle is a permutation and depends on the seed") {
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  std::vector<int> w = v;
  Rng rng(5);
  rng.shuffle(w);
  std::vector<int> sorted = w;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == v);
  CHECK(w != v);

  std::vector<int> w2(50);
  std::iota(w2.begin(), w2.end(), 0);
  Rng rng2(5);
  rng2.shuffle(w2);
  CHECK(w == w2);
}

TEST_CASE("sample_distinct returns ascending distinct indices in range") {
  Rng rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    const std::vector<int> s = rng.sample_distinct(10, 4);
    REQUIRE(s.size() == 4);
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(s[i] >= 0);
      CHECK(s[i] < 10);
      if (i) CHECK(s[i] > s[i - 1]);
    }
  }
}

TEST_CASE("sample_distinct with k = n returns the full set") {
  Rng rng(2);
  const std::vector<int> s = rng.sample_distinct(6, 6);
  std::vector<int> want(6);
  std::iota(want.begin(), want.end(), 0);
  CHECK(s == want);
}

TEST_CASE("sample_distinct is close to uniform over pairs") {
  Rng rng(33);
  std::vector<int> counts(15, 0);  // C(6,2) pairs
  const auto pair_id = [](int a, int b) {
    int id = 0;
    for (int i = 0; i < a; ++i) id += 5 - i;
    return id + (b - a - 1);
  };
  const int trials = 150000;
  for (int t = 0; t < trials; ++t) {
    const std::vector<int> s = rng.sample_distinct(6, 2);
    ++counts[static_cast<std::size_t>(pair_id(s[0], s[1]))];
  }
  for (int c : counts) {
    CHECK(c > trials / 15 * 0.93);
    CHECK(c < trials / 15 * 1.07);
  }
}
