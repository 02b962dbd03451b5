#include "uowsec/linkstats.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

namespace uowsec {

namespace {

// Signed integer power; exponent may be negative.
double ipow(double base, int e) {
  if (e < 0) return 1.0 / ipow(base, -e);
  double r = 1.0, b = base;
  for (int k = e; k > 0; k >>= 1) {
    if (k & 1) r *= b;
    b *= b;
  }
  return r;
}

double sign_pow(double s, int k) {
  return (s < 0.0 && (k & 1)) ? -1.0 : 1.0;
}

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

double poly_eval(const std::vector<double>& c, double x) {
  double r = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) r = r * x + c[i];
  return r;
}

std::vector<double> poly_mul(const std::vector<double>& a,
                             const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

}  // namespace

EtaMuMrcDist::EtaMuMrcDist(const RfLinkParams& p) : p_(p) {
  p_.validate();
  hh_ = p_.hh();
  nm_ = p_.n_antennas * p_.mu;
  const double h = hh_.h, bh = hh_.big_h, phi = p_.avg_snr;
  const double abs_h = std::fabs(bh);
  const double nm = nm_;

  psi_ld_[0] = 2.0L * static_cast<long double>(nm) * (static_cast<long double>(h) - bh) / phi;
  psi_ld_[1] = 2.0L * static_cast<long double>(nm) * (static_cast<long double>(h) + bh) / phi;
  psi_[0] = static_cast<double>(psi_ld_[0]);
  psi_[1] = static_cast<double>(psi_ld_[1]);
  k_ = sign_pow(bh, nm_) *
       std::exp(nm * std::log(h) - nm * std::log(abs_h) - std::lgamma(nm));

  // Coefficient tables are formed in long double: the alternating sums
  // they feed cancel heavily for large N mu, and double-precision table
  // formation alone would cost ~1e-9 absolute CDF accuracy.
  const auto sz = static_cast<std::size_t>(nm_);
  const long double nml = nm_, hl = h, bhl = bh, phil = phi;
  const long double abs_hl = std::fabs(bhl);
  std::vector<long double> bl[2], cl[2];
  for (int alpha = 0; alpha < 2; ++alpha) {
    b_[alpha].resize(sz);
    c_[alpha].resize(sz);
    bl[alpha].resize(sz);
    cl[alpha].resize(sz);
  }
  for (int beta = 0; beta < nm_; ++beta) {
    const auto ib = static_cast<std::size_t>(beta);
    const long double lg_common = std::lgamma(nml + beta) -
                                  std::lgamma(beta + 1.0L) -
                                  beta * std::log(abs_hl);
    const long double b_mag =
        std::exp(lg_common + (nml - beta) * std::log(nml) -
                 std::lgamma(nml - beta) - beta * std::log(4.0L) -
                 (nml - beta) * std::log(phil));
    const long double c1_mag =
        std::exp(lg_common - (nml + beta) * std::log(2.0L) -
                 (nml - beta) * std::log(hl - bhl));
    const long double c2_mag =
        std::exp(lg_common - (nml + beta) * std::log(2.0L) -
                 (nml - beta) * std::log(hl + bhl));
    const long double s_h = sign_pow(bh, beta);  // sign of 1/H^beta
    const long double s1 = ((beta & 1) ? -1.0L : 1.0L) * s_h;
    const long double s2 = ((nm_ & 1) ? -1.0L : 1.0L) * s_h;
    bl[0][ib] = s1 * b_mag;
    bl[1][ib] = s2 * b_mag;
    cl[0][ib] = s1 * c1_mag;
    cl[1][ib] = s2 * c2_mag;
    for (int alpha = 0; alpha < 2; ++alpha) {
      b_[alpha][ib] = static_cast<double>(bl[alpha][ib]);
      c_[alpha][ib] = static_cast<double>(cl[alpha][ib]);
    }
  }

  // survival(x) = K sum_alpha e^(-psi x) sum_k [psi^k/k! sum_{beta<=NM-1-k} C] x^k
  long double s0l = 0.0L;
  for (int alpha = 0; alpha < 2; ++alpha) {
    std::vector<long double> cum(sz);
    long double acc = 0.0L;
    for (int beta = 0; beta < nm_; ++beta) {
      acc += cl[alpha][static_cast<std::size_t>(beta)];
      cum[static_cast<std::size_t>(beta)] = acc;
    }
    spoly_[alpha].resize(sz);
    spoly_ld_[alpha].resize(sz);
    long double pk = 1.0L;  // psi^k / k!
    for (int k = 0; k < nm_; ++k) {
      const long double coeff = pk * cum[static_cast<std::size_t>(nm_ - 1 - k)];
      spoly_ld_[alpha][static_cast<std::size_t>(k)] = coeff;
      spoly_[alpha][static_cast<std::size_t>(k)] = static_cast<double>(coeff);
      pk *= psi_ld_[alpha] / (k + 1.0L);
    }
    s0l += cum[sz - 1];
    pdfpoly_[alpha].resize(sz);
    pdfpoly_ld_[alpha].resize(sz);
    for (int k = 0; k < nm_; ++k) {
      pdfpoly_[alpha][static_cast<std::size_t>(k)] =
          b_[alpha][static_cast<std::size_t>(nm_ - 1 - k)];
      pdfpoly_ld_[alpha][static_cast<std::size_t>(k)] =
          bl[alpha][static_cast<std::size_t>(nm_ - 1 - k)];
    }
  }

  // Anchor the survival normalization: K sum_{alpha,beta} C = 1 holds
  // analytically but the coefficient sum misses it by the residual
  // cancellation noise. Scale so survival(0) = 1 exactly.
  const double s0 =
      static_cast<double>(k_ * (spoly_ld_[0][0] + spoly_ld_[1][0]));
  ks_ = k_ / s0;
}

double EtaMuMrcDist::pdf(double x) const {
  if (x < 0.0) throw DomainError("etamu_mrc_pdf: x must be >= 0");
  long double s = 0.0L;
  for (int alpha = 0; alpha < 2; ++alpha) {
    long double poly = 0.0L;
    for (std::size_t i = pdfpoly_ld_[alpha].size(); i-- > 0;) {
      poly = poly * x + pdfpoly_ld_[alpha][i];
    }
    s += std::exp(-psi_ld_[alpha] * x) * poly;
  }
  return static_cast<double>(k_ * s);
}

double EtaMuMrcDist::pdf_bessel(double x) const {
  if (x < 0.0) throw DomainError("etamu_mrc_pdf: x must be >= 0");
  if (x == 0.0) return 0.0;
  const double nm = nm_, h = hh_.h, abs_h = std::fabs(hh_.big_h);
  const double nu = nm - 0.5;
  const double phi = p_.avg_snr;
  const double t = 2.0 * nm * abs_h * x / phi;
  // I_nu(Hz)/H^nu is even in H, so |H| may replace H throughout.
  const double logpart = std::log(2.0) + 0.5 * std::log(M_PI) +
                         (nm + 0.5) * std::log(nm) + nm * std::log(h) +
                         nu * std::log(x) - std::lgamma(nm) -
                         nu * std::log(abs_h) - (nm + 0.5) * std::log(phi) -
                         2.0 * nm * (h - abs_h) * x / phi;
  return std::exp(logpart) * bessel_i_scaled(nu, t);
}

double EtaMuMrcDist::survival(double x) const {
  if (x < 0.0) throw DomainError("etamu_mrc_cdf: x must be >= 0");
  long double s = 0.0L;
  for (int alpha = 0; alpha < 2; ++alpha) {
    long double poly = 0.0L;
    for (std::size_t i = spoly_ld_[alpha].size(); i-- > 0;) {
      poly = poly * x + spoly_ld_[alpha][i];
    }
    s += std::exp(-psi_ld_[alpha] * x) * poly;
  }
  return static_cast<double>(ks_ * s);
}

TasSelectionDist::TasSelectionDist(const RfLinkParams& p, int n_s)
    : mrc_(p), n_s_(n_s) {
  if (n_s_ < 1) throw ValidationError("TAS: n_s must be >= 1");
  v_ = -mrc_.survival_prefactor();
  // Expansion polynomials are kept up to total degree 64; past that only
  // the direct-power path is available.
  if (n_s_ * (mrc_.nm() - 1) > 64) return;
  pow1_.resize(static_cast<std::size_t>(n_s_) + 1);
  pow2_.resize(static_cast<std::size_t>(n_s_) + 1);
  pow1_[0] = {1.0};
  pow2_[0] = {1.0};
  for (int j = 1; j <= n_s_; ++j) {
    pow1_[static_cast<std::size_t>(j)] =
        poly_mul(pow1_[static_cast<std::size_t>(j - 1)], mrc_.survival_poly(0));
    pow2_[static_cast<std::size_t>(j)] =
        poly_mul(pow2_[static_cast<std::size_t>(j - 1)], mrc_.survival_poly(1));
  }
  for (int m = 0; m <= n_s_; ++m) {
    for (int n = 0; n <= m; ++n) {
      Term t;
      t.m = m;
      t.n = n;
      t.phi_exp = (m - n) * mrc_.psi(0) + n * mrc_.psi(1);
      t.poly = poly_mul(pow1_[static_cast<std::size_t>(m - n)],
                        pow2_[static_cast<std::size_t>(n)]);
      const double scale = binom(n_s_, m) * binom(m, n) * ipow(v_, m);
      for (double& c : t.poly) c *= scale;
      terms_.push_back(std::move(t));
    }
  }
}

double TasSelectionDist::cdf(double x) const {
  const double f = mrc_.cdf(x);
  double r = f;
  for (int k = 1; k < n_s_; ++k) r *= f;
  return r;
}

double TasSelectionDist::cdf_expanded(double x) const {
  if (terms_.empty()) return cdf(x);  // expansion unavailable past degree 64
  double s = 0.0;
  for (const Term& t : terms_) {
    s += std::exp(-t.phi_exp * x) * poly_eval(t.poly, x);
  }
  return s;
}

double TasSelectionDist::survival(double x) const {
  // 1 - (1 - s)^n expanded binomially: accurate when s is tiny.
  const double s = mrc_.survival(x);
  double out = 0.0, sk = 1.0;
  for (int k = 1; k <= n_s_; ++k) {
    sk *= s;
    out += binom(n_s_, k) * ((k & 1) ? sk : -sk);
  }
  return out;
}

double TasSelectionDist::coefficient_r(int m, int n, int u, int v) const {
  if (pow1_.empty()) {
    throw DomainError("TAS expansion tables unavailable: n_s*(N mu - 1) > 64");
  }
  if (m < 0 || m > n_s_ || n < 0 || n > m) return 0.0;
  const auto& p1 = pow1_[static_cast<std::size_t>(m - n)];
  const auto& p2 = pow2_[static_cast<std::size_t>(n)];
  if (u < 0 || static_cast<std::size_t>(u) >= p1.size()) return 0.0;
  if (v < 0 || static_cast<std::size_t>(v) >= p2.size()) return 0.0;
  return ipow(v_, m) * p1[static_cast<std::size_t>(u)] *
         p2[static_cast<std::size_t>(v)];
}

double TasSelectionDist::decay_rate(int m, int n) const {
  return (m - n) * mrc_.psi(0) + n * mrc_.psi(1);
}

double TasSelectionDist::min_positive_decay() const {
  return std::min(mrc_.psi(0), mrc_.psi(1));
}

MeggDist::MeggDist(const MeggParams& p) : p_(p) {
  p_.validate();
  k_ = megg_kernel_constants(p_);
}

double MeggDist::pdf(double x) const {
  if (!(x > 0.0)) throw DomainError("megg_pdf: x must be > 0");
  double f = 0.0;
  for (int i = 0; i < 2; ++i) {
    const auto& br = k_.branch[static_cast<std::size_t>(i)];
    if (br.m == 0.0) continue;  // omega = 1 kills the GG branch
    const double z = br.n * std::pow(x, br.v);
    f += br.m / x * meijer_g_1012(z, br.u);
  }
  return f;
}

double MeggDist::cdf(double x) const {
  if (x < 0.0) throw DomainError("megg_cdf: x must be >= 0");
  if (x == 0.0) return 0.0;
  const auto& b1 = k_.branch[0];
  const auto& b2 = k_.branch[1];
  double f = p_.omega * (-std::expm1(-b1.n * std::pow(x, b1.v)));
  if (p_.omega < 1.0) {
    f += (1.0 - p_.omega) *
         reg_lower_incomplete_gamma(b2.u, b2.n * std::pow(x, b2.v));
  }
  return f;
}

double MeggDist::cdf_via_gterms(double x) const {
  if (x < 0.0) throw DomainError("megg_cdf: x must be >= 0");
  if (x == 0.0) return 0.0;
  double f = 0.0;
  for (int i = 0; i < 2; ++i) {
    const auto& br = k_.branch[static_cast<std::size_t>(i)];
    if (br.s == 0.0) continue;
    f += br.s * meijer_g_1112(br.n * std::pow(x, br.v), br.u);
  }
  return f;
}

double MeggDist::survival(double x) const {
  if (x <= 0.0) return 1.0;
  const auto& b1 = k_.branch[0];
  const auto& b2 = k_.branch[1];
  double s = p_.omega * std::exp(-b1.n * std::pow(x, b1.v));
  if (p_.omega < 1.0) {
    s += (1.0 - p_.omega) *
         reg_upper_incomplete_gamma(b2.u, b2.n * std::pow(x, b2.v));
  }
  return s;
}

double MeggDist::g_term(int branch, double x) const {
  const auto& br = k_.branch[static_cast<std::size_t>(branch)];
  return lower_incomplete_gamma(br.u, br.n * std::pow(x, br.v));
}

std::vector<double> MeggDist::scale_knees() const {
  std::vector<double> knees;
  for (const auto& br : k_.branch) {
    knees.push_back(std::pow(br.n, -1.0 / br.v));
  }
  return knees;
}

EavesdropperDist::SeriesResult EavesdropperDist::cdf_series(double x,
                                                            int terms) const {
  if (terms < 1) throw DomainError("eav_cdf_series: terms must be >= 1");
  if (x < 0.0) throw DomainError("eav_cdf_series: x must be >= 0");
  if (x == 0.0) return {0.0, 0.0};

  const int nm = mrc_.nm();
  // Running (-Omega x)^z / z! factors per delta branch.
  double fac[2] = {1.0, 1.0};
  double value = 0.0;
  int growth_streak = 0;
  double prev_mag = -1.0;
  double layer = 0.0;
  for (int z = 0; z <= terms; ++z) {
    layer = 0.0;
    for (int delta = 0; delta < 2; ++delta) {
      double xp = std::pow(x, nm + z);  // x^{w_z} at theta = 0
      for (int theta = 0; theta < nm; ++theta) {
        const double wz = nm - theta + z;
        layer += mrc_.coeff_b(delta, theta) * fac[delta] * xp / wz;
        xp /= x;
      }
      fac[delta] *= -mrc_.psi(delta) / (z + 1.0);
    }
    if (z == terms) break;  // this layer is the first omitted one
    value += layer;
    const double mag = std::fabs(layer);
    growth_streak = (mag > prev_mag) ? growth_streak + 1 : 0;
    prev_mag = mag;
  }
  if (terms >= 5 && growth_streak >= 5) {
    std::ostringstream os;
    os << "eav_cdf_series: terms still growing after " << terms
       << " terms at x = " << x;
    throw SeriesDiverged(os.str());
  }
  const double k = mrc_.prefactor();
  return {k * value, std::fabs(k * layer)};
}

DualHopDist::DualHopDist(const SystemConfig& cfg)
    : tas_(cfg.sr, cfg.n_s), megg_(cfg.rd) {
  cfg.validate();
}

double DualHopDist::cdf(double x) const {
  const double f1 = tas_.cdf(x);
  const double f2 = megg_.cdf(x);
  return f1 + f2 - f1 * f2;
}

double DualHopDist::cdf_expanded(double x) const {
  const double fd = megg_.cdf_via_gterms(x);
  return tas_.cdf_expanded(x) * (1.0 - fd) + fd;
}

double etamu_mrc_pdf(double x, const RfLinkParams& p) {
  return EtaMuMrcDist(p).pdf(x);
}
double etamu_mrc_cdf(double x, const RfLinkParams& p) {
  return EtaMuMrcDist(p).cdf(x);
}
double tas_cdf(double x, const RfLinkParams& p, int n_s) {
  return TasSelectionDist(p, n_s).cdf(x);
}
double megg_pdf(double x, const MeggParams& p) { return MeggDist(p).pdf(x); }
double megg_cdf(double x, const MeggParams& p) { return MeggDist(p).cdf(x); }
double eav_pdf(double x, const RfLinkParams& p) {
  return EavesdropperDist(p).pdf(x);
}
double eav_cdf(double x, const RfLinkParams& p) {
  return EavesdropperDist(p).cdf(x);
}
double eav_cdf_series(double x, const RfLinkParams& p, int terms) {
  return EavesdropperDist(p).cdf_series(x, terms).value;
}
double dualhop_cdf(double x, const SystemConfig& cfg) {
  return DualHopDist(cfg).cdf(x);
}

}  // namespace uowsec
