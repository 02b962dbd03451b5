#include "uowsec/secrecy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "uowsec/linkstats.hpp"
#include "uowsec/specfun.hpp"

namespace uowsec {

namespace {

double poly_eval(const std::vector<double>& c, double x) {
  double r = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) r = r * x + c[i];
  return r;
}

struct Context {
  SystemConfig cfg;
  TasSelectionDist tas;
  MeggDist megg;
  EavesdropperDist eav;
  double sigma;

  explicit Context(const SystemConfig& c)
      : cfg(c), tas(c.sr, c.n_s), megg(c.rd), eav(c.se), sigma(c.sigma()) {
    cfg.validate();
  }

  // The term assemblies need the multinomial tables, which are capped at
  // total degree 64.
  void require_expansion() const {
    if (tas.terms().empty()) {
      throw DomainError(
          "selection expansion unavailable (n_s*(N mu - 1) > 64); only the "
          "direct-quadrature metrics apply");
    }
  }

  // L_e = E_{delta,theta} Omega_delta^varsigma / varsigma!
  double coeff_le(int delta, int theta, int varsigma) const {
    double fac = 1.0;
    for (int j = 2; j <= varsigma; ++j) fac *= j;
    const double omega_d = eav.mrc().psi(delta);
    return eav.mrc().coeff_c(delta, theta) *
           std::pow(omega_d, static_cast<double>(varsigma)) / fac;
  }
};

QuadOptions term_quad_options() {
  QuadOptions o;
  o.tol_abs = 1e-13;
  o.tol_rel = 1e-10;
  o.max_evaluations = 500'000;
  return o;
}

// int_0^cap poly(x) x^s e^(-rho x) / (1+x) [gamma(U_i, N_i x^{V_i})] dx.
// Every assembly term is an instance of this kernel; identical arguments
// produce bit-identical values, which the shared-cap cancellations rely on.
double block_integral(const Context& ctx, const std::vector<double>& poly,
                      int s, double rho, int g_branch, double cap) {
  const double sd = static_cast<double>(s);
  const auto f = [&](double x) {
    double val = poly_eval(poly, x) * std::exp(-rho * x) / (1.0 + x);
    if (s != 0) val *= std::pow(x, sd);
    if (g_branch >= 0) val *= ctx.megg.g_term(g_branch, x);
    return val;
  };
  QuadOptions o = term_quad_options();
  const double deg = sd + static_cast<double>(poly.size()) - 1.0;
  o.breakpoints.push_back(1.0);
  o.breakpoints.push_back(cap / 2.0);
  o.breakpoints.push_back(cap / 16.0);
  if (rho > 0.0) {
    o.breakpoints.push_back(1.0 / rho);
    o.breakpoints.push_back((deg + 1.0) / rho);
    // chained decay margins: leave no unsampled decade ahead of the tail
    o.breakpoints.push_back(2.0 * (deg + 12.0) / rho);
    o.breakpoints.push_back(4.0 * (deg + 12.0) / rho);
  }
  if (g_branch >= 0) {
    for (double k : ctx.megg.scale_knees()) o.breakpoints.push_back(k);
  }
  return quad_finite(f, 0.0, cap, o).value;
}

std::vector<double> asc_breakpoints(const Context& ctx) {
  // One knee per decay rate plus a deep-margin point per rate: a panel whose
  // nodes all land past a fast exponential would otherwise report zero and
  // never get refined.
  std::vector<double> bp = {1.0};
  for (int a = 0; a < 2; ++a) {
    for (double rate : {ctx.tas.mrc().psi(a), ctx.eav.mrc().psi(a)}) {
      bp.push_back(1.0 / rate);
      bp.push_back(30.0 / rate);
    }
  }
  for (double k : ctx.megg.scale_knees()) {
    bp.push_back(k);
    bp.push_back(1e2 * k);
    bp.push_back(1e4 * k);
    bp.push_back(1e6 * k);
  }
  return bp;
}

double default_cap(const Context& ctx) {
  double knee = 0.0;
  for (int a = 0; a < 2; ++a) {
    knee = std::max(knee, 1.0 / ctx.tas.mrc().psi(a));
    knee = std::max(knee, 1.0 / ctx.eav.mrc().psi(a));
  }
  for (double k : ctx.megg.scale_knees()) knee = std::max(knee, k);
  return 1e6 * knee;
}

// Effective end of the support of the capped series-2 residual: beyond this
// point the slowest-decaying remaining integrand x^d e^(-psi_min x) has
// dropped ~16 orders below its peak.
double series2_support_knee(const Context& ctx, int terms) {
  int maxdeg = 0;
  for (const auto& t : ctx.tas.terms()) {
    if (t.m >= 1) maxdeg = std::max(maxdeg, static_cast<int>(t.poly.size()) - 1);
  }
  const double d = maxdeg + ctx.eav.mrc().nm() + terms - 1;
  const double psi_min = ctx.tas.min_positive_decay();
  const double xp = std::max(d, 1.0) / psi_min;
  const double target = d * std::log(xp) - d - 37.0;
  double lo = xp, hi = xp;
  const auto g = [&](double x) { return d * std::log(x) - psi_min * x; };
  while (g(hi) > target) hi *= 2.0;
  for (int it = 0; it < 200 && (hi - lo) > 1e-9 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > target ? lo : hi) = mid;
  }
  return hi;
}

// The truncated eavesdropper series is usable while Omega * x stays inside
// a fixed radius over the residual support; at the default depth of 20
// terms the radius-5 gate corresponds to a ~1e-4 truncation tail.
constexpr double kSeries2Radius = 5.0;

MetricResult check_against_direct(double assembled, MetricMethod method,
                                  const SystemConfig& cfg) {
  const MetricResult direct = asc_direct(cfg);
  MetricResult out;
  out.value = assembled;
  out.method = method;
  out.error_estimate = std::fabs(assembled - direct.value) + direct.error_estimate;
  out.cancellation_warning = std::fabs(assembled - direct.value) >
                             1e-2 * std::max(1.0, std::fabs(direct.value));
  return out;
}

}  // namespace

MetricResult asc_direct(const SystemConfig& cfg) {
  Context ctx(cfg);
  const auto f = [&](double x) {
    return ctx.eav.cdf(x) * ctx.tas.survival(x) * ctx.megg.survival(x) /
           (1.0 + x);
  };
  QuadOptions o;
  o.breakpoints = asc_breakpoints(ctx);
  o.max_evaluations = 4'000'000;
  const QuadResult q = quad_semi_infinite(f, o);
  return {q.value, q.abs_error_estimate, MetricMethod::DirectQuadrature, false};
}

double asc_default_cap(const SystemConfig& cfg) {
  Context ctx(cfg);
  return default_cap(ctx);
}

MetricResult asc_series_1(const SystemConfig& cfg, double cap_z) {
  Context ctx(cfg);
  ctx.require_expansion();
  const double cap = (cap_z > 0.0) ? cap_z : default_cap(ctx);
  const double min_cap = 1e3 * std::max(1.0 / ctx.tas.mrc().psi(0),
                                        1.0 / ctx.eav.mrc().psi(0));
  if (cap < min_cap) {
    std::ostringstream os;
    os << "asc_series_1: cap_z = " << cap << " below required " << min_cap;
    throw DomainError(os.str());
  }

  const double k_e = ctx.eav.mrc().prefactor();
  const int nm_e = ctx.eav.mrc().nm();
  const auto& kern = ctx.megg.kernels();
  const std::vector<double> one = {1.0};

  // Group without TAS factors: A1 - sum K_e L_e (A2 - sum S_i A6) - sum S_i A5.
  double total = std::log1p(cap);
  for (int delta = 0; delta < 2; ++delta) {
    const double omega_d = ctx.eav.mrc().psi(delta);
    for (int theta = 0; theta < nm_e; ++theta) {
      for (int vs = 0; vs <= nm_e - theta - 1; ++vs) {
        double inner = block_integral(ctx, one, vs, omega_d, -1, cap);
        for (int i = 0; i < 2; ++i) {
          const double si = kern.branch[static_cast<std::size_t>(i)].s;
          if (si == 0.0) continue;
          inner -= si * block_integral(ctx, one, vs, omega_d, i, cap);
        }
        total -= k_e * ctx.coeff_le(delta, theta, vs) * inner;
      }
    }
  }
  for (int i = 0; i < 2; ++i) {
    const double si = kern.branch[static_cast<std::size_t>(i)].s;
    if (si == 0.0) continue;
    total -= si * block_integral(ctx, one, 0, 0.0, i, cap);
  }

  // TAS blocks: - sum R [A3 - sum K_e L_e (A4 - sum S_i A8) - sum S_i A7].
  // The m = 0 block reproduces the group above and cancels it.
  for (const auto& t : ctx.tas.terms()) {
    double bracket = block_integral(ctx, t.poly, 0, t.phi_exp, -1, cap);
    for (int delta = 0; delta < 2; ++delta) {
      const double omega_d = ctx.eav.mrc().psi(delta);
      for (int theta = 0; theta < nm_e; ++theta) {
        for (int vs = 0; vs <= nm_e - theta - 1; ++vs) {
          double inner =
              block_integral(ctx, t.poly, vs, omega_d + t.phi_exp, -1, cap);
          for (int i = 0; i < 2; ++i) {
            const double si = kern.branch[static_cast<std::size_t>(i)].s;
            if (si == 0.0) continue;
            inner -= si * block_integral(ctx, t.poly, vs,
                                         omega_d + t.phi_exp, i, cap);
          }
          bracket -= k_e * ctx.coeff_le(delta, theta, vs) * inner;
        }
      }
    }
    for (int i = 0; i < 2; ++i) {
      const double si = kern.branch[static_cast<std::size_t>(i)].s;
      if (si == 0.0) continue;
      bracket -= si * block_integral(ctx, t.poly, 0, t.phi_exp, i, cap);
    }
    total -= bracket;
  }

  return check_against_direct(total, MetricMethod::SeriesAssembly1, cfg);
}

MetricResult asc_series_2(const SystemConfig& cfg, int terms, double cap_z) {
  if (terms < 1) throw DomainError("asc_series_2: terms must be >= 1");
  Context ctx(cfg);
  ctx.require_expansion();
  const double cap = (cap_z > 0.0) ? cap_z : series2_support_knee(ctx, terms);
  const double omega_max =
      std::max(ctx.eav.mrc().psi(0), ctx.eav.mrc().psi(1));
  if (omega_max * cap > kSeries2Radius) {
    std::ostringstream os;
    os << "asc_series_2: Omega_max * cap = " << omega_max * cap
       << " exceeds the series radius " << kSeries2Radius;
    throw SeriesDiverged(os.str());
  }

  const double k_e = ctx.eav.mrc().prefactor();
  const int nm_e = ctx.eav.mrc().nm();
  const auto& kern = ctx.megg.kernels();
  const std::vector<double> one = {1.0};

  // Bracket = B1 - sum R (B2 - sum S_i B3) - sum S_i B4 depends on (theta, z1)
  // only through w_z; the m = 0 block cancels B1 and B4 exactly.
  std::map<int, double> brackets;
  const auto bracket_for = [&](int w) {
    const auto it = brackets.find(w);
    if (it != brackets.end()) return it->second;
    double val = block_integral(ctx, one, w, 0.0, -1, cap);
    for (int i = 0; i < 2; ++i) {
      const double si = kern.branch[static_cast<std::size_t>(i)].s;
      if (si == 0.0) continue;
      val -= si * block_integral(ctx, one, w, 0.0, i, cap);
    }
    for (const auto& t : ctx.tas.terms()) {
      double inner = block_integral(ctx, t.poly, w, t.phi_exp, -1, cap);
      for (int i = 0; i < 2; ++i) {
        const double si = kern.branch[static_cast<std::size_t>(i)].s;
        if (si == 0.0) continue;
        inner -= si * block_integral(ctx, t.poly, w, t.phi_exp, i, cap);
      }
      val -= inner;
    }
    brackets.emplace(w, val);
    return val;
  };

  double total = 0.0;
  for (int delta = 0; delta < 2; ++delta) {
    const double omega_d = ctx.eav.mrc().psi(delta);
    for (int theta = 0; theta < nm_e; ++theta) {
      const double d_coeff = ctx.eav.mrc().coeff_b(delta, theta);
      double fac = 1.0;  // (-1)^z1 Omega^z1 / z1!
      for (int z1 = 0; z1 < terms; ++z1) {
        const int wz = nm_e - theta + z1;
        total += d_coeff * fac / wz * bracket_for(wz);
        fac *= -omega_d / (z1 + 1.0);
      }
    }
  }
  total *= k_e;

  return check_against_direct(total, MetricMethod::SeriesAssembly2, cfg);
}

namespace {

double term_dispatch(const Context& ctx, AscTermKind kind,
                     const AscTermIndex& idx, double cap) {
  const std::vector<double> one = {1.0};
  const double omega_d = ctx.eav.mrc().psi(idx.delta);
  const double phi_exp = ctx.tas.decay_rate(idx.m, idx.n);
  const int uv = idx.u + idx.v;
  switch (kind) {
    case AscTermKind::A2:
      return block_integral(ctx, one, idx.varsigma, omega_d, -1, cap);
    case AscTermKind::A3:
      return block_integral(ctx, one, uv, phi_exp, -1, cap);
    case AscTermKind::A4:
      return block_integral(ctx, one, uv + idx.varsigma, omega_d + phi_exp,
                            -1, cap);
    case AscTermKind::A5:
      return block_integral(ctx, one, 0, 0.0, idx.branch, cap);
    case AscTermKind::A6:
      return block_integral(ctx, one, idx.varsigma, omega_d, idx.branch, cap);
    case AscTermKind::A7:
      return block_integral(ctx, one, uv, phi_exp, idx.branch, cap);
    case AscTermKind::A8:
      return block_integral(ctx, one, uv + idx.varsigma, omega_d + phi_exp,
                            idx.branch, cap);
  }
  throw DomainError("unknown ASC term kind");
}

}  // namespace

double asc_term(AscTermKind kind, const AscTermIndex& idx,
                const SystemConfig& cfg, double cap_z) {
  Context ctx(cfg);
  const double cap = (cap_z > 0.0) ? cap_z : default_cap(ctx);
  return term_dispatch(ctx, kind, idx, cap);
}

double asc_b_term(BTermKind kind, const AscTermIndex& idx,
                  const SystemConfig& cfg, double cap_z) {
  Context ctx(cfg);
  const double cap = (cap_z > 0.0) ? cap_z : series2_support_knee(ctx, 20);
  const std::vector<double> one = {1.0};
  const int wz = ctx.eav.mrc().nm() - idx.theta + idx.z1;
  const double phi_exp = ctx.tas.decay_rate(idx.m, idx.n);
  const int uv = idx.u + idx.v;
  switch (kind) {
    case BTermKind::B1:
      return block_integral(ctx, one, wz, 0.0, -1, cap);
    case BTermKind::B2:
      return block_integral(ctx, one, uv + wz, phi_exp, -1, cap);
    case BTermKind::B3:
      return block_integral(ctx, one, uv + wz, phi_exp, idx.branch, cap);
    case BTermKind::B4:
      return block_integral(ctx, one, wz, 0.0, idx.branch, cap);
  }
  throw DomainError("unknown B term kind");
}

double sop_lower_integral_path(const SystemConfig& cfg) {
  Context ctx(cfg);
  const double sigma = ctx.sigma;
  const auto f = [&](double x) {
    const double z = sigma * x;
    const double f1 = ctx.tas.cdf(z);
    const double f2 = ctx.megg.cdf(z);
    return (f1 + f2 - f1 * f2) * ctx.eav.pdf(x);
  };
  QuadOptions o;
  o.tol_abs = 1e-12;
  o.tol_rel = 1e-9;
  o.max_evaluations = 4'000'000;
  for (int a = 0; a < 2; ++a) {
    o.breakpoints.push_back(1.0 / ctx.eav.mrc().psi(a));
    o.breakpoints.push_back(1.0 / (sigma * ctx.tas.mrc().psi(a)));
  }
  for (double k : ctx.megg.scale_knees()) {
    o.breakpoints.push_back(k / sigma);
    o.breakpoints.push_back(1e3 * k / sigma);
  }
  const double v = quad_semi_infinite(f, o).value;
  return std::clamp(v, 0.0, 1.0);
}

double sop_lower_closed_path(const SystemConfig& cfg) {
  Context ctx(cfg);
  ctx.require_expansion();
  const double sigma = ctx.sigma;
  const long double k_e = ctx.eav.mrc().prefactor();
  const int nm_e = ctx.eav.mrc().nm();
  const auto& kern = ctx.megg.kernels();

  // The pure-exponential family has the exact Gamma form; it cancels across
  // the (delta, theta) tables by up to ~1e7, so it runs in long double. The
  // G-kernel families are integrated against the full eavesdropper density
  // instead of per (delta, theta): one quadrature per block and branch, with
  // no table amplification outside the integrand.
  QuadOptions tight = term_quad_options();
  tight.tol_abs = 1e-11;
  tight.tol_rel = 1e-11;
  tight.max_evaluations = 2'000'000;

  // Per-block polynomials with sigma^w folded in: poly_sigma(x) = poly(sigma x).
  std::vector<std::vector<double>> scaled;
  scaled.reserve(ctx.tas.terms().size());
  for (const auto& t : ctx.tas.terms()) {
    std::vector<double> q = t.poly;
    double sw = 1.0;
    for (double& c : q) {
      c *= sw;
      sw *= sigma;
    }
    scaled.push_back(std::move(q));
  }

  long double total = 0.0L;
  for (std::size_t bi = 0; bi < scaled.size(); ++bi) {
    const auto& q = scaled[bi];
    const double phi_exp = ctx.tas.terms()[bi].phi_exp;

    // Exact family: sum_{delta,theta} D Gamma(w + me_t) / w_B2^(w + me_t).
    long double s1 = 0.0L;
    for (int delta = 0; delta < 2; ++delta) {
      const long double omega_d = ctx.eav.mrc().psi(delta);
      const long double log_wb2 = std::log(omega_d + sigma * phi_exp);
      for (int theta = 0; theta < nm_e; ++theta) {
        const long double d_coeff = ctx.eav.mrc().coeff_b(delta, theta);
        long double inner = 0.0L;
        for (std::size_t w = 0; w < q.size(); ++w) {
          const long double wb1 = static_cast<long double>(w) + (nm_e - theta);
          inner += q[w] * std::exp(std::lgamma(wb1) - wb1 * log_wb2);
        }
        s1 += d_coeff * inner;
      }
    }
    total += k_e * s1;

    // G-kernel family: - sum_i S_i int f_e(x) e^(-sigma phi_exp x)
    //                              poly_sigma(x) gamma(U_i, N_i (sigma x)^V_i) dx.
    // The m = 0 block reproduces (and cancels) the +S2 family added below.
    for (int i = 0; i < 2; ++i) {
      const double si = kern.branch[static_cast<std::size_t>(i)].s;
      if (si == 0.0) continue;
      const auto f = [&](double x) {
        return ctx.eav.pdf(x) * std::exp(-sigma * phi_exp * x) *
               poly_eval(q, x) * ctx.megg.g_term(i, sigma * x);
      };
      QuadOptions o = tight;
      const double deg = static_cast<double>(q.size()) - 1.0 + nm_e;
      for (int delta = 0; delta < 2; ++delta) {
        const double rate = ctx.eav.mrc().psi(delta) + sigma * phi_exp;
        o.breakpoints.push_back(1.0 / rate);
        o.breakpoints.push_back((deg + 1.0) / rate);
        o.breakpoints.push_back(2.0 * (deg + 12.0) / rate);
        o.breakpoints.push_back(4.0 * (deg + 12.0) / rate);
      }
      for (double kx : ctx.megg.scale_knees()) {
        o.breakpoints.push_back(kx / sigma);
      }
      total -= si * quad_semi_infinite(f, o).value;
    }
  }

  // + sum_i S_i int f_e(x) gamma(U_i, N_i (sigma x)^V_i) dx.
  for (int i = 0; i < 2; ++i) {
    const double si = kern.branch[static_cast<std::size_t>(i)].s;
    if (si == 0.0) continue;
    const auto f = [&](double x) {
      return ctx.eav.pdf(x) * ctx.megg.g_term(i, sigma * x);
    };
    QuadOptions o = tight;
    for (int delta = 0; delta < 2; ++delta) {
      const double rate = ctx.eav.mrc().psi(delta);
      o.breakpoints.push_back(1.0 / rate);
      o.breakpoints.push_back((nm_e + 1.0) / rate);
      o.breakpoints.push_back(2.0 * (nm_e + 12.0) / rate);
      o.breakpoints.push_back(4.0 * (nm_e + 12.0) / rate);
    }
    for (double kx : ctx.megg.scale_knees()) {
      o.breakpoints.push_back(kx / sigma);
    }
    total += si * quad_semi_infinite(f, o).value;
  }

  return std::clamp(static_cast<double>(total), 0.0, 1.0);
}

MetricResult sop_lower(const SystemConfig& cfg) {
  const double closed = sop_lower_closed_path(cfg);
  const double integral = sop_lower_integral_path(cfg);
  const double diff = std::fabs(closed - integral);
  const double tol = std::max(1e-6, 1e-4 * std::fabs(closed));
  if (diff > tol) {
    std::ostringstream os;
    os << "sop_lower: route disagreement " << diff << " exceeds " << tol
       << " (closed " << closed << ", integral " << integral << ")";
    throw NonConvergent(os.str());
  }
  return {closed, std::max(diff, 1e-12), MetricMethod::ClosedForm, false};
}

MetricResult sop_exact_mc_reference(const SystemConfig& cfg,
                                    std::size_t n_samples,
                                    const RngStream& stream) {
  const McEstimate e =
      estimate_metric(Metric::SOP_EXACT, cfg, n_samples, SnrForm::Exact, stream);
  return {e.mean, e.std_error, MetricMethod::MonteCarlo, false};
}

MetricResult spsc(const SystemConfig& cfg) {
  SystemConfig zero_rate = cfg;
  zero_rate.target_rate = 0.0;
  const MetricResult s = sop_lower(zero_rate);
  return {1.0 - s.value, s.error_estimate, MetricMethod::ClosedForm, false};
}

}  // namespace uowsec
