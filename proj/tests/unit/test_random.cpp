#include <doctest.h>

#include <cmath>
#include <set>

#include "ridgeshift/random.hpp"

using namespace ridgeshift;

TEST_SUITE("random") {
  TEST_CASE("first draw of key 0 is the SplitMix64 reference output") {
    CounterRng rng(0);
    CHECK(rng.next_u64() == 0xE220A8397B1DCDAFULL);
    CHECK(rng.next_u64() == 0x6E789E6AA1B965F4ULL);
    CHECK(rng.next_u64() == 0x06C45D188009454FULL);
  }

  TEST_CASE("streams are pure functions of the key") {
    CounterRng a(stream_key(42, 3, StreamPurpose::Noise));
    CounterRng b(stream_key(42, 3, StreamPurpose::Noise));
    for (int i = 0; i < 1000; ++i) CHECK(a.normal() == b.normal());
    CHECK(a.counter() == b.counter());
  }

  TEST_CASE("stream keys differ by seed, index and purpose") {
    std::set<std::uint64_t> keys;
    for (std::uint64_t seed = 0; seed < 8; ++seed)
      for (std::uint64_t index = 0; index < 8; ++index)
        for (auto p : {StreamPurpose::Coefficients, StreamPurpose::Covariates,
                       StreamPurpose::Noise, StreamPurpose::TestInputs})
          keys.insert(stream_key(seed, index, p));
    CHECK(keys.size() == 8 * 8 * 4);
  }

  TEST_CASE("uniforms lie in [0, 1)") {
    CounterRng rng(9);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
      const double u = rng.uniform();
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
      sum += u;
    }
    CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
  }

  TEST_CASE("normals have unit variance") {
    CounterRng rng(11);
    const int n = 400000;
    double s1 = 0.0, s2 = 0.0, s4 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double z = rng.normal();
      s1 += z;
      s2 += z * z;
      s4 += z * z * z * z;
    }
    CHECK(std::abs(s1 / n) < 5.0 / std::sqrt(n));
    CHECK(std::abs(s2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(s4 / n - 3.0) < 5.0 * std::sqrt(96.0 / n));
  }
}
