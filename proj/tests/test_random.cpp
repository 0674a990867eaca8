#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "sfm/random.hpp"

namespace rng = sfm::rng;

namespace {

// Engine that replays a fixed script, for draw-count and draw-order checks.
struct ScriptedEngine {
  std::vector<std::uint64_t> values;
  std::size_t pos = 0;

  std::uint64_t operator()() { return pos < values.size() ? values[pos++] : 0; }
  static constexpr std::uint64_t max() {
    return std::numeric_limits<std::uint64_t>::max();
  }
  static constexpr std::uint64_t min() { return 0; }
};

static_assert(rng::Engine64<ScriptedEngine>);
static_assert(rng::Engine64<rng::engine>);

// Raw engine word that uniform01 maps to the given value.
std::uint64_t raw_for_uniform(double u) {
  return static_cast<std::uint64_t>(u * 0x1.0p53) << 11;
}

}  // namespace

TEST_CASE("stream ids separate seeds and indices") {
  std::set<std::uint64_t> ids;
  for (std::uint64_t seed = 0; seed < 8; ++seed)
    for (std::uint64_t index = 0; index < 64; ++index)
      ids.insert(rng::derive_stream_id(seed, index));
  CHECK(ids.size() == 8 * 64);
  CHECK(rng::derive_stream_id(1, 2) == rng::derive_stream_id(1, 2));
}

TEST_CASE("make_stream reproduces the same sequence") {
  rng::engine a = rng::make_stream(99, 7);
  rng::engine b = rng::make_stream(99, 7);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
}

TEST_CASE("uniform01 uses one call and stays in range") {
  ScriptedEngine g{{raw_for_uniform(0.75)}};
  CHECK(rng::uniform01(g) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(g.pos == 1);

  rng::engine e(17);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  const int n = 30000;
  for (int i = 0; i < n; ++i) {
    const double u = rng::uniform01(e);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("uniform_open01 excludes both endpoints") {
  ScriptedEngine zero{{0}};
  CHECK(rng::uniform_open01(zero) > 0.0);
  ScriptedEngine top{{std::numeric_limits<std::uint64_t>::max()}};
  CHECK(rng::uniform_open01(top) < 1.0);
}

TEST_CASE("standard_normal uses two calls and has the right moments") {
  ScriptedEngine g{{raw_for_uniform(0.5), raw_for_uniform(0.5)}};
  (void)rng::standard_normal(g);
  CHECK(g.pos == 2);

  rng::engine e(29);
  const int n = 50000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng::standard_normal(e);
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("half_normal is nonnegative with mean sigma sqrt(2/pi)") {
  rng::engine e(31);
  const double sigma = 2.0;
  const int n = 40000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = rng::half_normal(sigma, e);
    REQUIRE(d >= 0.0);
    sum += d;
  }
  CHECK(sum / n == doctest::Approx(sigma * std::sqrt(2.0 / M_PI)).epsilon(0.02));

  ScriptedEngine g{{raw_for_uniform(0.3), raw_for_uniform(0.9)}};
  (void)rng::half_normal(1.0, g);
  CHECK(g.pos == 2);
}

TEST_CASE("poisson matches its moments on both paths") {
  rng::engine e(37);
  const double lambdas[] = {4.2, 120.0};  // below and above the rejection cutover
  for (const double lambda : lambdas) {
    CAPTURE(lambda);
    const int n = 60000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double k = static_cast<double>(rng::poisson(lambda, e));
      sum += k;
      sq += k * k;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(mean == doctest::Approx(lambda).epsilon(0.02));
    CHECK(var == doctest::Approx(lambda).epsilon(0.05));
  }
}
