#include <cmath>
#include <vector>

#include <doctest.h>

#include "des_oracle.hpp"
#include "platoon/errors.hpp"
#include "platoon/netcalc.hpp"
#include "platoon/rng.hpp"

using namespace platoon;
using namespace platoon::netcalc;

namespace {

MacParams mac_default() { return {0.2, 2, 1}; }

AppProfile tagged_app() {
  AppProfile a;
  a.o = 1.0;
  a.eta = 5.0;
  a.lam = 0.5;
  return a;
}

// Independent evaluation of the bound from its four terms.
double hand_bound(double o, double eta, double theta, double R, double lambda, double hl,
                  double ho) {
  return o * eta / theta + o / (R - hl) + (lambda * hl + ho) / (R - hl) + lambda;
}

}  // namespace

TEST_SUITE("netcalc") {

TEST_CASE("backoff window sum") {
  CHECK(backoff_window_sum({0.2, 2, 1}) == doctest::Approx(1.0));
  CHECK(backoff_window_sum({0.2, 1, 1}) == doctest::Approx(0.6));
  CHECK(backoff_window_sum({1.0, 1, 1}) == doctest::Approx(3.0));
  // stage-by-stage sum of min(2^g, 2^eps) W0, g = 0..gamma
  for (int gamma = 1; gamma <= 6; ++gamma) {
    for (int eps = 1; eps <= gamma; ++eps) {
      double sum = 0.0;
      for (int g = 0; g <= gamma; ++g) sum += std::pow(2.0, std::min(g, eps)) * 0.3;
      CHECK(backoff_window_sum({0.3, gamma, eps}) == doctest::Approx(sum));
    }
  }
  CHECK_THROWS_WITH_AS(backoff_window_sum({0.2, 2, 3}), "eps exceeds gamma", DomainError);
  CHECK_THROWS_AS(backoff_window_sum({0.2, 2, 0}), DomainError);
  CHECK_THROWS_AS(backoff_window_sum({0.0, 2, 1}), DomainError);
}

TEST_CASE("cross traffic") {
  std::vector<AppProfile> one(1);
  one[0].lam = 0.7;
  one[0].o = 2.0;
  auto ct = cross_traffic(1, one, 0);
  CHECK(ct.h_lam == 0.0);
  CHECK(ct.h_o == 0.0);

  std::vector<AppProfile> two(2);
  two[0].lam = two[1].lam = 0.5;
  two[0].o = two[1].o = 1.0;
  ct = cross_traffic(2, two, 0);
  CHECK(ct.h_lam == doctest::Approx(1.5));
  CHECK(ct.h_o == doctest::Approx(3.0));

  two[0].lam = 0.4;
  two[1].lam = 0.6;
  two[0].o = 1.0;
  two[1].o = 2.0;
  ct = cross_traffic(3, two, 1);
  CHECK(ct.h_lam == doctest::Approx(2.4));
  CHECK(ct.h_o == doctest::Approx(7.0));

  CHECK_THROWS_AS(cross_traffic(3, two, 2), DomainError);
  CHECK_THROWS_AS(cross_traffic(0, two, 0), DomainError);
}

TEST_CASE("delay bound example and limits") {
  const CrossTraffic ct{1.5, 3.0};
  const auto d = delay_bound(tagged_app(), {5.0, 5.0}, 10.0, mac_default(), ct);
  CHECK(d.computing == doctest::Approx(1.0));
  CHECK(d.transmission == doctest::Approx(1.0 / 8.5));
  CHECK(d.competition == doctest::Approx(4.5 / 8.5));
  CHECK(d.protocol == doctest::Approx(1.0));
  CHECK(d.total() == doctest::Approx(2.64706).epsilon(1e-5));

  const auto big = delay_bound(tagged_app(), {1e12, 1e12}, 10.0, mac_default(), ct);
  CHECK(std::abs(big.total() - (1.0 + 5.5 / 8.5)) < 1e-9);

  const auto lim = asymptotic_bounds(tagged_app(), {5.0, 5.0}, 10.0, mac_default(), ct);
  CHECK(lim.limit_theta_inf == doctest::Approx(1.0 + 5.5 / 8.5));
  CHECK(lim.limit_R_inf == doctest::Approx(2.0));

  CHECK_THROWS_AS(delay_bound(tagged_app(), {5.0, 5.0}, 1.5, mac_default(), ct), SaturatedLink);
  CHECK_THROWS_AS(asymptotic_bounds(tagged_app(), {5.0, 5.0}, 1.0, mac_default(), ct),
                  SaturatedLink);
  CHECK_THROWS_AS(delay_bound(tagged_app(), {0.0, 5.0}, 10.0, mac_default(), ct), ZeroCompute);
}

TEST_CASE("required bandwidth") {
  const CrossTraffic ct{1.5, 3.0};
  CHECK(required_bandwidth(tagged_app(), {5.0, 5.0}, 3.0, mac_default(), ct) ==
        doctest::Approx(7.0));
  CHECK(delay_bound(tagged_app(), {5.0, 5.0}, 7.0, mac_default(), ct).total() ==
        doctest::Approx(3.0));
  CHECK_THROWS_AS(required_bandwidth(tagged_app(), {5.0, 5.0}, 2.0, mac_default(), ct),
                  InfeasibleBudget);
  const double tau = 1.0 + 1.0 / 8.5 + 4.5 / 8.5 + 1.0;
  CHECK(required_bandwidth(tagged_app(), {5.0, 5.0}, tau, mac_default(), ct) ==
        doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("random draws: formula, monotonicity, inverse") {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    AppProfile a;
    a.o = rng.uniform(0.5, 5.0);
    a.eta = rng.uniform(0.5, 6.0);
    const MacParams mac{rng.uniform(0.01, 0.3), 3, 2};
    const CrossTraffic ct{rng.uniform(0.0, 5.0), rng.uniform(0.0, 10.0)};
    const double theta = rng.uniform(1.0, 50.0), R = ct.h_lam + rng.uniform(0.5, 30.0);
    const double T = delay_bound(a, {theta, theta}, R, mac, ct).total();
    const double lambda = backoff_window_sum(mac);
    CHECK(T == doctest::Approx(hand_bound(a.o, a.eta, theta, R, lambda, ct.h_lam, ct.h_o)));

    CHECK(delay_bound(a, {theta * 1.1, theta}, R, mac, ct).total() < T);
    CHECK(delay_bound(a, {theta, theta}, R * 1.1, mac, ct).total() < T);
    AppProfile bigger = a;
    bigger.o *= 1.1;
    CHECK(delay_bound(bigger, {theta, theta}, R, mac, ct).total() > T);
    MacParams slower = mac;
    slower.w0 *= 1.1;
    CHECK(delay_bound(a, {theta, theta}, R, slower, ct).total() > T);

    const double tau0 = T * rng.uniform(0.9, 2.0);
    if (tau0 > a.o * a.eta / theta + lambda) {
      const double r = required_bandwidth(a, {theta, theta}, tau0, mac, ct);
      CHECK(std::abs(delay_bound(a, {theta, theta}, r, mac, ct).total() - tau0) <= 1e-9 * tau0);
    }
  }
}

TEST_CASE("bound grows with the number of vehicles") {
  std::vector<AppProfile> apps(3);
  for (std::size_t i = 0; i < apps.size(); ++i) {
    apps[i].o = 1.0 + static_cast<double>(i);
    apps[i].lam = 0.3;
    apps[i].eta = 2.0;
  }
  double prev = 0.0;
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto ct = cross_traffic(n, apps, 1);
    const double T = delay_bound(apps[1], {5.0, 5.0}, 20.0, mac_default(), ct).total();
    CHECK(T > prev);
    prev = T;
  }
}

TEST_CASE("discrete-event oracle stays under the bound") {
  Rng rng(2024);
  int checked = 0;
  for (int inst_i = 0; inst_i < 300; ++inst_i) {
    oracle::Instance inst;
    inst.vehicles = 1 + rng.below(5);
    const std::size_t K = 1 + rng.below(5);
    std::vector<AppProfile> profiles(K);
    for (std::size_t k = 0; k < K; ++k) {
      inst.apps.push_back({rng.uniform(0.05, 1.0), rng.uniform(0.2, 3.0)});
      profiles[k].lam = inst.apps.back().rate;
      profiles[k].o = inst.apps.back().burst;
    }
    inst.tagged = rng.below(K);
    const auto ct = cross_traffic(inst.vehicles, profiles, inst.tagged);
    const auto& tag = inst.apps[inst.tagged];
    inst.link_rate = (ct.h_lam + tag.rate) * rng.uniform(1.0, 3.0) + rng.uniform(0.0, 1.0);
    const MacParams mac{rng.uniform(0.01, 0.2), 2, 1};
    inst.access = backoff_window_sum(mac);
    AppProfile app = profiles[inst.tagged];
    app.eta = rng.uniform(0.5, 5.0);
    inst.compute_rate = tag.rate * rng.uniform(1.0, 4.0) + rng.uniform(0.0, 1.0);
    const double theta = inst.compute_rate * app.eta;
    const double T = delay_bound(app, {theta, theta}, inst.link_rate, mac, ct).total();
    const auto res = oracle::simulate(inst, 50.0, 40, 0.7, rng);
    CHECK(res.max_delay <= T * (1.0 + 1e-9));
    checked += res.tagged_packets > 0;
  }
  CHECK(checked >= 290);  // a flow may idle past the horizon
}

}  // TEST_SUITE
