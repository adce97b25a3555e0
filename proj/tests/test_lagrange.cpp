#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "core/error.hpp"
#include "core/lagrange.hpp"
#include "core/random.hpp"

using namespace cbo;

namespace {

std::vector<FrontierPoint> pts(std::initializer_list<std::pair<double, double>> xy) {
  std::vector<FrontierPoint> out;
  std::size_t i = 0;
  for (const auto& [b, f] : xy) out.push_back({b, f, i++});
  return out;
}

// Integer-coordinate point sets make the brute-force test exact.
std::vector<FrontierPoint> random_integer_set(Rng& rng, std::size_t n) {
  std::vector<FrontierPoint> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double bv = 20.0 + std::floor(rng.uniform() * 15.0);  // plenty of duplicate bv
    const double fom = std::floor(rng.uniform() * 400.0);
    out.push_back({bv, fom, i});
  }
  return out;
}

// O(n^3): after keeping the max-fom point of each bv, a point is a hull
// vertex iff no chord between two other points lies on or above it.
std::vector<FrontierPoint> brute_force_hull(const std::vector<FrontierPoint>& in) {
  std::map<std::int64_t, FrontierPoint> best;
  for (const auto& p : in) {
    const auto key = static_cast<std::int64_t>(p.bv);
    auto it = best.find(key);
    if (it == best.end() || p.fom > it->second.fom ||
        (p.fom == it->second.fom && p.source_index < it->second.source_index))
      best[key] = p;
  }
  std::vector<FrontierPoint> c;
  for (const auto& [k, p] : best) c.push_back(p);

  std::vector<FrontierPoint> hull;
  for (std::size_t i = 0; i < c.size(); ++i) {
    bool dominated = false;
    for (std::size_t a = 0; a < c.size() && !dominated; ++a) {
      for (std::size_t b = 0; b < c.size() && !dominated; ++b) {
        if (!(c[a].bv < c[i].bv && c[i].bv < c[b].bv)) continue;
        // chord(a,b) at c[i].bv >= c[i].fom, cross-multiplied in integers
        const std::int64_t lhs = static_cast<std::int64_t>(c[a].fom) * (c[b].bv - c[i].bv) +
                                 static_cast<std::int64_t>(c[b].fom) * (c[i].bv - c[a].bv);
        const std::int64_t rhs = static_cast<std::int64_t>(c[i].fom) * (c[b].bv - c[a].bv);
        dominated = lhs >= rhs;
      }
    }
    if (!dominated) hull.push_back(c[i]);
  }
  return hull;
}

UpperHull random_hull(Rng& rng) {
  std::vector<FrontierPoint> p;
  const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 30);
  for (std::size_t i = 0; i < n; ++i) p.push_back({rng.uniform(25, 55), rng.uniform(50, 1000), i});
  return upper_hull(p);
}

}  // namespace

TEST_CASE("upper hull examples") {
  SUBCASE("concave triple keeps every point") {
    const auto h = upper_hull(pts({{30, 300}, {40, 290}, {50, 200}}));
    CHECK(h.size() == 3);
  }
  SUBCASE("a point below the chord is dropped") {
    const auto h = upper_hull(pts({{30, 300}, {40, 200}, {50, 250}}));
    REQUIRE(h.size() == 2);
    CHECK(h.points[0].bv == 30);
    CHECK(h.points[1].bv == 50);
  }
  SUBCASE("collinear interior point is dropped") {
    const auto h = upper_hull(pts({{30, 300}, {40, 250}, {50, 200}}));
    CHECK(h.size() == 2);
  }
  SUBCASE("equal bv collapses to the larger fom") {
    const auto h = upper_hull(pts({{40, 100}, {40, 180}, {40, 120}}));
    REQUIRE(h.size() == 1);
    CHECK(h.points[0].fom == 180);
    CHECK(h.points[0].source_index == 1);
  }
  SUBCASE("equal points keep the earliest source") {
    const auto h = upper_hull(pts({{35, 10}, {40, 100}, {40, 100}}));
    CHECK(h.points.back().source_index == 1);
  }
  SUBCASE("input order does not matter") {
    const auto a = upper_hull(pts({{50, 200}, {30, 300}, {40, 290}}));
    CHECK(a.points[0].bv == 30);
    CHECK(a.points[2].bv == 50);
  }
  CHECK_THROWS_AS(upper_hull(std::vector<FrontierPoint>{}), DomainError);
  CHECK_THROWS_AS(upper_hull(pts({{NAN, 1}})), DomainError);
}

TEST_CASE("upper hull equals the brute-force vertex set") {
  Rng rng(1);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto in = random_integer_set(rng, 1 + trial % 12);
    const auto got = upper_hull(in);
    const auto want = brute_force_hull(in);
    REQUIRE(got.points == want);
  }
}

TEST_CASE("hull properties on random real-valued sets") {
  Rng rng(2);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<FrontierPoint> in;
    const std::size_t n = 1 + trial % 40;
    for (std::size_t i = 0; i < n; ++i) in.push_back({rng.uniform(25, 55), rng.uniform(0, 1000), i});
    const auto h = upper_hull(in);

    for (std::size_t i = 1; i < h.size(); ++i) CHECK(h.points[i - 1].bv < h.points[i].bv);
    for (std::size_t i = 2; i < h.size(); ++i) {
      const auto& a = h.points[i - 2];
      const auto& b = h.points[i - 1];
      const auto& c = h.points[i];
      CHECK((c.fom - b.fom) / (c.bv - b.bv) <= (b.fom - a.fom) / (b.bv - a.bv));
    }
    for (const auto& p : in) CHECK(p.fom <= h.value_at(p.bv) + 1e-9 * std::abs(p.fom));

    // Idempotent.
    CHECK(upper_hull(h.points) == h);

    // A point strictly below the interpolant changes nothing.
    if (h.size() >= 2) {
      const double bv = rng.uniform(h.points.front().bv, h.points.back().bv);
      auto more = in;
      more.push_back({bv, h.value_at(bv) - 1.0 - rng.uniform() * 100.0, n});
      CHECK(upper_hull(more) == h);
    }
  }
}

TEST_CASE("multiplier examples") {
  const auto two = upper_hull(pts({{30, 300}, {50, 200}}));
  auto s = multiplier(two, 40.0);
  CHECK(s.lambda == 5.0);
  CHECK_FALSE(s.clamped);
  REQUIRE(s.segment);
  CHECK(s.segment->first == 0);

  const auto one = upper_hull(pts({{30, 300}}));
  CHECK(multiplier(one, 45.0).lambda == 0.0);
  CHECK_FALSE(multiplier(one, 45.0).segment);

  const auto three = upper_hull(pts({{30, 250}, {40, 300}, {55, 200}}));
  s = multiplier(three, 50.0);
  CHECK(s.lambda == doctest::Approx(100.0 / 15.0).epsilon(1e-15));
  CHECK(s.segment->first == 1);

  SUBCASE("ascending segment gives a negative multiplier") {
    s = multiplier(three, 35.0);
    CHECK(s.lambda == -5.0);
  }
  SUBCASE("vertex target takes the segment to the right") {
    s = multiplier(three, 40.0);
    CHECK(s.segment->first == 1);
    CHECK_FALSE(s.clamped);
  }
  SUBCASE("targets outside the span clamp to the end segments") {
    s = multiplier(three, 20.0);
    CHECK(s.clamped);
    CHECK(s.segment->first == 0);
    CHECK(s.lambda == -5.0);
    s = multiplier(three, 60.0);
    CHECK(s.clamped);
    CHECK(s.segment->first == 1);
    s = multiplier(three, 55.0);
    CHECK_FALSE(s.clamped);
    CHECK(s.segment->first == 1);
  }
  CHECK_THROWS_AS(multiplier(UpperHull{}, 40.0), DomainError);
}

TEST_CASE("multiplier against a linear segment search") {
  Rng rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto h = random_hull(rng);
    const double t = rng.uniform(20, 60);
    const auto s = multiplier(h, t);
    const auto& p = h.points;
    CHECK(s.clamped == (t < p.front().bv || t > p.back().bv));
    if (p.size() < 2) {
      CHECK(s.lambda == 0.0);
      continue;
    }
    std::size_t j = 0;
    while (j + 2 < p.size() && p[j + 1].bv <= t) ++j;
    REQUIRE(s.segment);
    CHECK(s.segment->first == j);
    const double slope = (p[j + 1].fom - p[j].fom) / (p[j + 1].bv - p[j].bv);
    CHECK(std::abs(s.lambda + slope) <= 1e-12 * std::abs(slope));
    CHECK((s.lambda > 0) == (slope < 0));
    CHECK((s.lambda < 0) == (slope > 0));
  }
}

TEST_CASE("multiplier scales exactly with fom") {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto h = random_hull(rng);
    const double c = std::ldexp(1.0, static_cast<int>(rng.uniform() * 20) - 10);
    UpperHull scaled = h;
    for (auto& p : scaled.points) p.fom *= c;
    const double t = rng.uniform(25, 55);
    CHECK(multiplier(scaled, t).lambda == c * multiplier(h, t).lambda);
  }
}

TEST_CASE("lagrangian") {
  CHECK(lagrangian(300, 47, 0.0, 40) == 300);
  CHECK(lagrangian(200, 50, 5.0, 40) == 250);
  CHECK(lagrangian(300, 40, 123.0, 40) == 300);
  auto s = zero_multiplier(50.0);
  CHECK(s.lambda == 0.0);
  CHECK(lagrangian(17, 33, s) == 17);

  SUBCASE("differences do not depend on the target") {
    Rng rng(5);
    for (int k = 0; k < 1000; ++k) {
      // Dyadic values keep every operation exact.
      auto dy = [&](double lo, double hi) { return std::ldexp(std::floor(rng.uniform(lo, hi) * 64), -6); };
      const double fa = dy(0, 1000), fb = dy(0, 1000), ba = dy(25, 55), bb = dy(25, 55);
      const double lam = dy(-20, 20), t1 = dy(25, 55), t2 = dy(25, 55);
      const double d1 = lagrangian(fa, ba, lam, t1) - lagrangian(fb, bb, lam, t1);
      const double d2 = lagrangian(fa, ba, lam, t2) - lagrangian(fb, bb, lam, t2);
      CHECK(d1 == d2);
      CHECK(d1 == (fa - fb) + lam * (ba - bb));
    }
  }
}
