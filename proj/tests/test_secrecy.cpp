#include <doctest.h>

#include <cmath>

#include "battery.hpp"
#include "oracles.hpp"
#include "uowsec/linkstats.hpp"
#include "uowsec/secrecy.hpp"
#include "uowsec/specfun.hpp"

using namespace uowsec;

namespace {

SystemConfig base_config() {
  SystemConfig cfg;
  cfg.sr = {2.2, 2, 2, 1.0, EtaMuFormat::FormatI};
  cfg.se = {2.2, 2, 2, 1.0, EtaMuFormat::FormatI};
  cfg.rd = {0.21, 0.33, 1.43, 1.98, 0.47, Detection::HD, db_to_linear(15.0)};
  cfg.n_s = 2;
  cfg.target_rate = 0.01;
  return cfg;
}

// A configuration in the series-2 convergence regime: weak eavesdropper
// exponential rates relative to the main hop's decay.
SystemConfig series2_config() {
  SystemConfig cfg;
  cfg.sr = {1.8, 1, 1, 1.0, EtaMuFormat::FormatI};
  cfg.se = {1.5, 1, 1, db_to_linear(17.0), EtaMuFormat::FormatI};
  cfg.rd = {0.75, 0.51, 0.95, 0.70, 1.00, Detection::HD, 10.0};
  cfg.n_s = 1;
  cfg.target_rate = 0.01;
  return cfg;
}

}  // namespace

TEST_CASE("asc_direct: eavesdropper-free limit") {
  SystemConfig cfg = base_config();
  cfg.se.avg_snr = 1e-6;
  const MetricResult r = asc_direct(cfg);
  // with F_e -> 1 the ASC collapses to E[ln(1 + gamma_f)]
  TasSelectionDist tas(cfg.sr, cfg.n_s);
  MeggDist megg(cfg.rd);
  const auto q = quad_semi_infinite([&](double x) {
    return tas.survival(x) * megg.survival(x) / (1.0 + x);
  });
  CHECK(r.value == doctest::Approx(q.value).epsilon(1e-4));
}

TEST_CASE("asc_direct: no secrecy without main-channel advantage") {
  SystemConfig cfg = base_config();
  cfg.sr.avg_snr = 1e-6;
  cfg.rd.avg_snr_d = 1e-6;
  cfg.se.avg_snr = 10.0;
  CHECK(asc_direct(cfg).value <= 1e-3);
}

TEST_CASE("asc_direct increases with the transmit antenna count (MC oracle)") {
  SystemConfig cfg = base_config();
  cfg.rd.avg_snr_d = db_to_linear(15.0);
  double prev = 0.0;
  for (int n_s : {1, 2, 3}) {
    cfg.n_s = n_s;
    const MetricResult r = asc_direct(cfg);
    CHECK(r.value > prev);
    prev = r.value;
    const McEstimate mc = estimate_metric(Metric::ASC, cfg, 2'000'000,
                                          SnrForm::Min, {421, 7});
    CHECK(std::fabs(r.value - mc.mean) <=
          std::max(0.01 * r.value, 4.0 * mc.std_error));
  }
}

TEST_CASE("asc_series_1 agrees with asc_direct and is cap-stable") {
  const SystemConfig cfg = base_config();
  const MetricResult direct = asc_direct(cfg);
  const MetricResult s1 = asc_series_1(cfg);
  CHECK_FALSE(s1.cancellation_warning);
  CHECK(std::fabs(s1.value - direct.value) <=
        1e-2 * std::max(1.0, std::fabs(direct.value)));
  // doubling the cap moves the result by < 0.1%
  const MetricResult s1b = asc_series_1(cfg, 2.0 * asc_default_cap(cfg));
  CHECK(std::fabs(s1b.value - s1.value) <=
        1e-3 * std::max(1.0, std::fabs(s1.value)));
}

TEST_CASE("asc_series_1: eavesdropper-free limit matches the direct value") {
  SystemConfig cfg = base_config();
  cfg.se.avg_snr = 1e-6;
  const MetricResult direct = asc_direct(cfg);
  const MetricResult s1 = asc_series_1(cfg);
  CHECK(std::fabs(s1.value - direct.value) <=
        1e-2 * std::max(1.0, std::fabs(direct.value)));
}

TEST_CASE("asc_series_1 rejects a cap below its validity floor") {
  const SystemConfig cfg = base_config();
  CHECK_THROWS_AS(asc_series_1(cfg, 1e-3), DomainError);
}

TEST_CASE("asc_series_2 in its convergence regime matches both ASC forms") {
  const SystemConfig cfg = series2_config();
  const MetricResult direct = asc_direct(cfg);
  const MetricResult s1 = asc_series_1(cfg);
  const MetricResult s2 = asc_series_2(cfg);
  CHECK_FALSE(s2.cancellation_warning);
  CHECK(std::fabs(s2.value - direct.value) <=
        1e-2 * std::max(1.0, std::fabs(direct.value)));
  CHECK(std::fabs(s2.value - s1.value) <=
        1e-2 * std::max(1.0, std::fabs(direct.value)));
  // truncation depth matters: a 1-term assembly lands measurably elsewhere
  const MetricResult s2short = asc_series_2(cfg, 1);
  CHECK(std::fabs(s2short.value - s2.value) > 1e-9);
}

TEST_CASE("asc_series_2 refuses regimes outside its series radius") {
  // strong eavesdropper rates (phi_e small) push Omega far beyond the
  // 20-term accuracy radius; the assembly must refuse rather than return
  // garbage
  CHECK_THROWS_AS(asc_series_2(base_config()), SeriesDiverged);
  SystemConfig cfg = base_config();
  cfg.se.avg_snr = 1e-6;
  CHECK_THROWS_AS(asc_series_2(cfg), SeriesDiverged);
  CHECK_THROWS_AS(asc_series_2(series2_config(), 0), DomainError);
}

TEST_CASE("A2 term: exponential-integral identity at varsigma = 0") {
  const SystemConfig cfg = base_config();
  EavesdropperDist eav(cfg.se);
  AscTermIndex idx;
  for (int delta : {0, 1}) {
    idx.delta = delta;
    idx.varsigma = 0;
    const double omega_d = eav.mrc().psi(delta);
    const long double expected =
        std::exp(static_cast<long double>(omega_d)) *
        uowsec_tests::e1_oracle(omega_d);
    CHECK(asc_term(AscTermKind::A2, idx, cfg) ==
          doctest::Approx(static_cast<double>(expected)).epsilon(1e-9));
  }
}

TEST_CASE("A3 equals A2 when the decay rates coincide (sr == se)") {
  SystemConfig cfg = base_config();
  cfg.se = cfg.sr;  // Omega_1 == psi_1
  AscTermIndex a2idx;
  a2idx.delta = 0;
  a2idx.varsigma = 2;
  AscTermIndex a3idx;
  a3idx.m = 1;
  a3idx.n = 0;  // phi_exp = psi_1
  a3idx.u = 2;
  a3idx.v = 0;  // u + v = 2
  CHECK(asc_term(AscTermKind::A3, a3idx, cfg) ==
        doctest::Approx(asc_term(AscTermKind::A2, a2idx, cfg)).epsilon(1e-12));
}

TEST_CASE("A6 with the exponential branch reduces to A2 minus a plain integral") {
  const SystemConfig cfg = base_config();
  MeggDist megg(cfg.rd);
  EavesdropperDist eav(cfg.se);
  const auto& k1 = megg.kernels().branch[0];
  AscTermIndex idx;
  idx.delta = 0;
  idx.varsigma = 1;
  idx.branch = 0;
  const double cap = asc_default_cap(cfg);
  const double a6 = asc_term(AscTermKind::A6, idx, cfg, cap);
  const double a2 = asc_term(AscTermKind::A2, idx, cfg, cap);
  const double omega_d = eav.mrc().psi(0);
  // the remaining integrand decays at rate omega_d + N1; its support ends
  // well before x = 80/rate
  const double rate = omega_d + k1.n;
  QuadOptions o;
  o.tol_abs = 1e-13;
  o.tol_rel = 1e-10;
  o.breakpoints = {1.0 / rate, 1.0, 30.0 / rate};
  const auto rest = quad_finite(
      [&](double x) {
        return x * std::exp(-omega_d * x) *
               std::exp(-k1.n * std::pow(x, k1.v)) / (1.0 + x);
      },
      0.0, 80.0 / rate, o);
  CHECK(a6 == doctest::Approx(a2 - rest.value).epsilon(1e-9));
}

TEST_CASE("B1 term: capped integral against the alternating closed form") {
  const SystemConfig cfg = base_config();
  const double cap = 35.0;
  for (int z1 : {0, 1, 3}) {
    AscTermIndex idx;
    idx.theta = 1;  // w_z = N_e mu_e - theta + z1 = 3 + z1
    idx.z1 = z1;
    const int w = 3 + z1;
    // int_0^Z x^w/(1+x) dx = (-1)^w [ln(1+Z) + sum_{k=1..w} (-Z)^k / k]
    long double closed = std::log1p(static_cast<long double>(cap));
    long double zk = 1.0L;
    for (int k = 1; k <= w; ++k) {
      zk *= -cap;
      closed += zk / k;
    }
    if (w % 2 == 1) closed = -closed;
    CHECK(asc_b_term(BTermKind::B1, idx, cfg, cap) ==
          doctest::Approx(static_cast<double>(closed)).epsilon(1e-10));
  }
}

TEST_CASE("sop_lower: degenerate limits") {
  SystemConfig cfg = base_config();
  cfg.se.avg_snr = 1e-9;
  CHECK(sop_lower(cfg).value <= 1e-6);

  cfg = base_config();
  cfg.target_rate = 0.0;
  cfg.se.avg_snr = 1e6;
  CHECK(sop_lower(cfg).value >= 1.0 - 1e-3);
}

TEST_CASE("sop_lower: integral and closed routes agree on the battery head") {
  const auto battery = uowsec_tests::test_battery();
  for (int i : {0, 1, 2, 3, 4, 5}) {
    const SystemConfig& cfg = battery[static_cast<std::size_t>(i)];
    const double closed = sop_lower_closed_path(cfg);
    const double integral = sop_lower_integral_path(cfg);
    CHECK(std::fabs(closed - integral) <=
          std::max(1e-6, 1e-4 * std::fabs(closed)));
  }
}

TEST_CASE("sop_lower vs Monte Carlo on a selected scenario") {
  SystemConfig cfg;
  cfg.sr = {2.2, 2, 2, db_to_linear(10.0), EtaMuFormat::FormatI};
  cfg.se = {2.2, 2, 1, 1.0, EtaMuFormat::FormatI};
  cfg.rd = {0.21, 0.33, 1.43, 1.98, 0.47, Detection::HD, db_to_linear(15.0)};
  cfg.n_s = 1;
  cfg.target_rate = 0.01;
  const MetricResult r = sop_lower(cfg);
  const McEstimate mc =
      estimate_metric(Metric::SOP_L, cfg, 1'000'000, SnrForm::Min, {99, 3});
  CHECK(std::fabs(r.value - mc.mean) <=
        std::max(0.01 * r.value, 4.0 * mc.std_error));
}

TEST_CASE("sop_lower is nondecreasing in the target rate") {
  const auto battery = uowsec_tests::test_battery();
  for (int i : {0, 7, 13}) {
    SystemConfig cfg = battery[static_cast<std::size_t>(i)];
    double prev = -1.0;
    for (int k = 0; k < 10; ++k) {
      cfg.target_rate = 0.1 * k;
      const double v = sop_lower(cfg).value;
      CHECK(v >= prev - 1e-12);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      prev = v;
    }
  }
}

TEST_CASE("sop_exact_mc_reference dominates the lower bound") {
  const SystemConfig cfg = base_config();
  const MetricResult exact = sop_exact_mc_reference(cfg, 500'000, {5, 0});
  CHECK(exact.method == MetricMethod::MonteCarlo);
  const MetricResult lower = sop_lower(cfg);
  CHECK(exact.value >= lower.value - 4.0 * exact.error_estimate);
}

TEST_CASE("zero target rate: exact and lower-bound indicators coincide") {
  SystemConfig cfg = base_config();
  cfg.target_rate = 0.0;
  const McMetrics m = estimate_all(cfg, 200'000, SnrForm::Exact, {17, 2});
  CHECK(m.sop_exact.mean == m.sop_l.mean);  // same samples, same threshold
}

TEST_CASE("spsc: limits, exchangeability, and the defining identity") {
  SystemConfig cfg = base_config();
  cfg.sr.avg_snr = 1e6;
  cfg.rd.avg_snr_d = 1e6;
  CHECK(spsc(cfg).value >= 1.0 - 1e-3);

  // identical main/eavesdropper fading with a transparent optical hop:
  // Pr(gamma_r > gamma_e) = 1/2 by exchangeability
  cfg = base_config();
  cfg.se = cfg.sr;
  cfg.n_s = 1;
  cfg.rd.avg_snr_d = 1e6;
  CHECK(spsc(cfg).value == doctest::Approx(0.5).epsilon(2e-3));

  cfg = base_config();
  SystemConfig zero = cfg;
  zero.target_rate = 0.0;
  CHECK(spsc(cfg).value + sop_lower(zero).value ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spsc increases with the main-hop eta (MC-backed trend)") {
  SystemConfig cfg;
  cfg.sr = {1.5, 2, 2, db_to_linear(10.0), EtaMuFormat::FormatI};
  cfg.se = {2.2, 2, 2, db_to_linear(12.0), EtaMuFormat::FormatI};
  cfg.rd = {0.21, 0.33, 1.43, 1.98, 0.47, Detection::IMDD, db_to_linear(20.0)};
  cfg.n_s = 2;
  cfg.target_rate = 0.0;
  double prev = 0.0;
  for (double eta_r : {1.5, 2.2, 3.0}) {
    cfg.sr.eta = eta_r;
    const double v = spsc(cfg).value;
    CHECK(v > prev);
    prev = v;
    const McEstimate mc =
        estimate_metric(Metric::SPSC, cfg, 400'000, SnrForm::Min, {31, 8});
    CHECK(std::fabs(v - mc.mean) <= std::max(0.01 * v, 4.0 * mc.std_error));
  }
}

TEST_CASE("asc_direct monotone trends in the three average SNRs") {
  const SystemConfig base = base_config();
  double prev = -1.0;
  for (double db : {-5.0, 0.0, 5.0}) {
    SystemConfig cfg = base;
    cfg.sr.avg_snr = db_to_linear(db);
    const double v = asc_direct(cfg).value;
    CHECK(v > prev);
    prev = v;
  }
  prev = -1.0;
  for (double db : {5.0, 10.0, 15.0}) {
    SystemConfig cfg = base;
    cfg.rd.avg_snr_d = db_to_linear(db);
    const double v = asc_direct(cfg).value;
    CHECK(v > prev);
    prev = v;
  }
  prev = 1e9;
  for (double db : {-5.0, 0.0, 5.0}) {
    SystemConfig cfg = base;
    cfg.se.avg_snr = db_to_linear(db);
    const double v = asc_direct(cfg).value;
    CHECK(v < prev);
    prev = v;
  }
}
