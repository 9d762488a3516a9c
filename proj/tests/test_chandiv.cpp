#include "hsd/chandiv.hpp"
#include "hsd/error.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace hsd;

namespace {

ChannelPair dep_pair(double q, double p, std::size_t d, double g) {
  return ChannelPair(depolarizing_choi(q, d), depolarizing_choi(p, d), g);
}

ChoiOperator random_channel(oracle::Rng& rng, int din, int dout) {
  return choi_from_kraus(oracle::random_kraus(rng, din, dout, 2));
}

}  // namespace

TEST_CASE("channel pair validation") {
  CHECK_THROWS_AS(ChannelPair(identity_choi(2), identity_choi(3), 1.0), InputError);
  CHECK_THROWS_AS(ChannelPair(identity_choi(2), identity_choi(2), 0.5), InputError);
  CHECK_THROWS_AS(channel_hs(dep_pair(1, 0, 2, 1), MeasurementClass::lo_star_lower), InputError);
}

TEST_CASE("all-measurement channel divergence") {
  CHECK(std::abs(channel_hs_all(dep_pair(0.3, 0.3, 2, 1)).value) < 1e-7);
  const DivergenceResult r = channel_hs_all(dep_pair(1, 0, 2, 1));
  CHECK(r.value == doctest::Approx(0.75).epsilon(1e-7));
  CHECK(r.method == Method::sdp);
  CHECK(*r.gap <= 1e-7);
  CHECK(channel_hs_all(dep_pair(0, 1, 3, 1)).value == doctest::Approx(8.0 / 9.0).epsilon(1e-7));
}

TEST_CASE("PPT channel divergence") {
  CHECK(std::abs(channel_hs_ppt(dep_pair(0.6, 0.6, 2, 1)).value) < 1e-7);
  CHECK(channel_hs_ppt(dep_pair(1, 0, 2, 1)).value == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(channel_hs_ppt(dep_pair(0, 1, 2, 1)).value == doctest::Approx(0.5).epsilon(1e-7));
}

TEST_CASE("depolarizing closed forms") {
  CHECK(depolarizing_channel_all_analytic(0.4, 0.4, 2, 1) == 0.0);
  CHECK(depolarizing_channel_all_analytic(1, 0, 2, 1) == doctest::Approx(0.75));
  CHECK(depolarizing_channel_all_analytic(0.5, 0.25, 3, 1) == doctest::Approx(2.0 / 9.0));
  CHECK(depolarizing_channel_ppt_analytic(0.4, 0.4, 2, 1) == 0.0);
  CHECK(depolarizing_channel_ppt_analytic(1, 0, 2, 1) == doctest::Approx(0.5));
  CHECK(depolarizing_channel_ppt_analytic(1, 0, 3, 1) == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(depolarizing_channel_ppt_analytic(1, 0, 3, 0.5), InputError);
}

TEST_CASE("channel certificates are checked independently") {
  oracle::Rng rng(51);
  for (int k = 0; k < 4; ++k) {
    const ChannelPair pair(random_channel(rng, 2, 2), random_channel(rng, 2, 2), 1.0 + 0.3 * k);
    const ComplexMatrix delta = pair.p.matrix() - pair.gamma * pair.q.matrix();

    const DivergenceResult all = channel_hs_all(pair);
    const ComplexMatrix z = all.certificates.at("Z").matrix();
    CHECK(oracle::min_eig(z) >= -1e-7);
    CHECK(oracle::min_eig(z - delta) >= -1e-6);
    CHECK(oracle::max_eig(oracle::naive_trace_b(z, 2, 2)) <= all.value + 1e-6);
    CHECK(std::abs(*all.dual_value - all.value) < 1e-6);
    // Primal point: Tr rho_R = 1, 0 <= Omega <= rho_R (x) I.
    const ComplexMatrix omega = all.certificates.at("Omega").matrix(), rho = all.certificates.at("rho_R").matrix();
    CHECK(std::abs(oracle::trace_re(rho) - 1) < 1e-7);
    CHECK(oracle::min_eig(oracle::naive_kron(rho, ComplexMatrix::Identity(2, 2)) - omega) >= -1e-7);
    CHECK(std::abs((omega * delta).trace().real() - all.value) < 1e-6);

    const DivergenceResult ppt = channel_hs_ppt(pair);
    const ComplexMatrix zp = ppt.certificates.at("Z").matrix(), l = ppt.certificates.at("L").matrix(),
                        y = ppt.certificates.at("Y").matrix();
    for (const ComplexMatrix* m : {&zp, &l, &y}) CHECK(oracle::min_eig(*m) >= -1e-7);
    CHECK(oracle::min_eig(zp + oracle::naive_transpose_b(y - l, 2, 2) - delta) >= -1e-6);
    CHECK(oracle::max_eig(oracle::naive_trace_b(zp + y, 2, 2)) <= ppt.value + 1e-6);
    CHECK(ppt.value <= all.value + 1e-6);
  }
}

TEST_CASE("output divergence at any fixed input is below the channel divergence") {
  oracle::Rng rng(52);
  for (int k = 0; k < 5; ++k) {
    const ChannelPair pair(random_channel(rng, 2, 2), random_channel(rng, 2, 2), 1.5);
    const double all = channel_hs_all(pair).value;
    const double ppt = channel_hs_ppt(pair).value;
    for (int t = 0; t < 5; ++t) {
      const DensityMatrix in = oracle::random_state(rng, 2, 2);
      const DensityMatrix a = apply_channel_to_bipartite(pair.p, in), b = apply_channel_to_bipartite(pair.q, in);
      CHECK(hs_all({a, b, 1.5, MeasurementClass::all}).value <= all + 1e-6);
      CHECK(hs_ppt({a, b, 1.5, MeasurementClass::ppt}).value <= ppt + 1e-6);
    }
  }
}

TEST_CASE("covariance shortcut") {
  CHECK_THROWS_AS(channel_hs_via_covariance(dep_pair(1, 0, 2, 1), {true, false}, MeasurementClass::ppt), InputError);
  CHECK_THROWS_AS(channel_hs_via_covariance(dep_pair(1, 0, 2, 1), {false, true}, MeasurementClass::ppt), InputError);
  const ChannelPair id(identity_choi(2), identity_choi(2), 1.0);
  CHECK(std::abs(channel_hs_via_covariance(id, {true, true}, MeasurementClass::ppt).value) < 1e-7);

  for (double q : {0.0, 0.5, 1.0}) {
    for (double p : {0.0, 0.4, 1.0}) {
      for (double g : {1.0, 2.0}) {
        const ChannelPair pair = dep_pair(q, p, 2, g);
        const DivergenceResult cov = channel_hs_via_covariance(pair, {true, true}, MeasurementClass::ppt);
        CHECK(cov.method == Method::covariance_reduction);
        const double eta_q = 1 - q + q / 4, eta_p = 1 - p + p / 4;
        CHECK(std::abs(cov.value - oracle::isotropic_ppt(eta_p, eta_q, 2, g)) < 1e-6);
        CHECK(std::abs(cov.value - channel_hs_ppt(pair).value) < 1e-6);
        const DivergenceResult cov_all = channel_hs_via_covariance(pair, {true, true}, MeasurementClass::all);
        CHECK(std::abs(cov_all.value - channel_hs_all(pair).value) < 1e-6);
      }
    }
  }
}

TEST_CASE("quasi sub-additivity under composition") {
  const std::vector<std::pair<double, double>> params = {{0.1, 0.6}, {0.9, 0.2}, {0.5, 0.5}, {0.0, 1.0}};
  for (auto [a, b] : params) {
    for (auto [c, e] : params) {
      for (double g1 : {1.0, 1.5}) {
        for (double g2 : {1.0, 2.0}) {
          const ChoiOperator p0 = depolarizing_choi(a, 2), q0 = depolarizing_choi(b, 2);
          const ChoiOperator p1 = depolarizing_choi(c, 2), q1 = depolarizing_choi(e, 2);
          const double lhs =
              channel_hs_all(ChannelPair(compose_channels(p0, p1), compose_channels(q0, q1), g1 * g2)).value;
          const double rhs = channel_hs_all(ChannelPair(p0, q0, g1)).value +
                             g1 * channel_hs_all(ChannelPair(p1, q1, g2)).value;
          CHECK(lhs <= rhs + 1e-6);
        }
      }
    }
  }
}
