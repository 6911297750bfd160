#include <cmath>

#include <doctest.h>

#include "platoon/errors.hpp"
#include "platoon/rng.hpp"
#include "platoon/traffic.hpp"

using namespace platoon;

TEST_SUITE("traffic") {

TEST_CASE("safety distance examples") {
  CHECK(safety_distance({0.0, 3.0}, 0.0) == 0.0);
  CHECK(safety_distance({20.0, 3.0}, 0.5) == doctest::Approx(10.375).epsilon(1e-12));
  CHECK(safety_distance({10.0, 2.0}, 1.0) == doctest::Approx(11.0).epsilon(1e-12));
  CHECK_THROWS_AS(safety_distance({10.0, 2.0}, -0.1), DomainError);
  CHECK_THROWS_AS(safety_distance({10.0, 0.0}, 1.0), DomainError);
}

TEST_CASE("reaction delay examples") {
  CHECK(perception_reaction_delay(0.0, {20.0, 3.0}) == 0.0);
  CHECK(perception_reaction_delay(10.375, {20.0, 3.0}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(perception_reaction_delay(11.0, {10.0, 2.0}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(perception_reaction_delay(-1.0, {10.0, 2.0}), DomainError);
}

TEST_CASE("throughput, gap, normalized gap, dd") {
  CHECK(throughput(20.0, 0.0) == 0.0);
  CHECK(throughput(20.0, 0.05) == doctest::Approx(1.0));
  CHECK(throughput(30.0, 0.02) == doctest::Approx(0.6));

  CHECK(stability_gap(0.1, 10.0) == doctest::Approx(0.0));
  CHECK(stability_gap(0.05, 15.0) == doctest::Approx(5.0));
  CHECK(stability_gap(0.1, 12.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(stability_gap(0.0, 10.0), DomainError);

  CHECK(normalized_gap(0.0) == 0.0);
  CHECK(normalized_gap(5.0, 1e-9) == 1.0);
  CHECK(normalized_gap(0.5, 1.0) == 0.5);
  CHECK_THROWS_AS(normalized_gap(1.0, 0.0), DomainError);

  CHECK(differential_distance(10.0, 10.0) == 0.0);
  CHECK(differential_distance(12.5, 10.0) == 2.5);
  CHECK(differential_distance(10.0, 12.5) == 2.5);
}

TEST_CASE("platoon capacity") {
  CHECK(platoon_capacity(1, 100.0, 20.0) == 10);
  CHECK(platoon_capacity(2, 150.0, 10.0) == 60);
  CHECK(platoon_capacity(1, 100.0, 30.0) == 6);  // 6.67 rounds down
  CHECK_THROWS_AS(platoon_capacity(1, 100.0, 0.0), DomainError);
}

TEST_CASE("round trip and monotonicity over random draws") {
  Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    const KinematicParams p{rng.uniform(0.0, 40.0), rng.uniform(0.1, 10.0)};
    const double tau = rng.uniform(0.0, 5.0);
    const double s = safety_distance(p, tau);
    const double back = perception_reaction_delay(s, p);
    CHECK(std::abs(back - tau) <= 1e-9 * std::max(tau, 1e-12) + 1e-15);
    CHECK(safety_distance(p, tau + 0.01) > s);
    CHECK(perception_reaction_delay(s + 0.01, p) > back);

    const double gap = rng.uniform(0.0, 3.0), omega = rng.uniform(1e-6, 3.0);
    const double d = normalized_gap(gap, omega);
    CHECK(d >= 0.0);
    CHECK(d <= 1.0);
    CHECK((d == 1.0) == (gap >= omega));

    const double v = rng.uniform(0.0, 30.0), rho = rng.uniform(0.0, 0.2), c = rng.uniform(0.1, 4.0);
    CHECK(throughput(c * v, rho) == doctest::Approx(c * throughput(v, rho)));
  }
}

}  // TEST_SUITE

TEST_SUITE("rng") {

TEST_CASE("same seed and stream give the same draws") {
  Rng a(42, 3), b(42, 3), c(42, 4);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    CHECK(x == b.next());
    differs |= x != c.next();
  }
  CHECK(differs);
}

TEST_CASE("distribution ranges and moments") {
  Rng r(1);
  double sum = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / 1000 - 0.5) < 0.03);

  double esum = 0.0;
  for (int i = 0; i < 20000; ++i) esum += r.exponential(0.2);
  CHECK(esum / 20000 == doctest::Approx(5.0).epsilon(0.05));
  CHECK(std::isinf(r.exponential(0.0)));

  for (int i = 0; i < 1000; ++i) CHECK(r.below(7) < 7);
  CHECK_FALSE(r.bernoulli(0.0));
  CHECK(r.bernoulli(1.0));
}

}  // TEST_SUITE
