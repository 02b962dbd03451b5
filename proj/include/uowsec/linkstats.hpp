// Exact PDFs/CDFs of the three per-hop SNRs and the dual-hop end-to-end CDF.
// Coefficient tables are precomputed at construction; evaluation is pure.
#ifndef UOWSEC_LINKSTATS_HPP_
#define UOWSEC_LINKSTATS_HPP_

#include <vector>

#include "uowsec/params.hpp"
#include "uowsec/specfun.hpp"

namespace uowsec {

// SNR distribution of one eta-mu faded MRC hop with integer mu.
//
// Two evaluation paths exist for the PDF: the finite-sum rewrite (the primary
// path, also the source of the CDF coefficients) and the Bessel-I form used
// as a cross-check. Both describe the same density.
class EtaMuMrcDist {
 public:
  explicit EtaMuMrcDist(const RfLinkParams& p);

  double pdf(double x) const;         // finite-sum path
  double pdf_bessel(double x) const;  // Bessel-I path
  double cdf(double x) const { return 1.0 - survival(x); }
  double survival(double x) const;    // evaluated directly, no cancellation

  const RfLinkParams& params() const { return p_; }
  int nm() const { return nm_; }  // N * mu
  double h() const { return hh_.h; }
  double big_h() const { return hh_.big_h; }
  double psi(int alpha) const { return psi_[alpha]; }  // alpha in {0, 1}
  double prefactor() const { return k_; }  // h^NM / (H^NM Gamma(NM)), signed
  // prefactor rescaled so that survival(0) evaluates to exactly 1.
  double survival_prefactor() const { return ks_; }
  double coeff_b(int alpha, int beta) const { return b_[alpha][static_cast<std::size_t>(beta)]; }
  double coeff_c(int alpha, int beta) const { return c_[alpha][static_cast<std::size_t>(beta)]; }
  // Survival polynomial of branch alpha (degree NM-1):
  //   survival(x) = prefactor * sum_alpha e^(-psi_alpha x) * poly_alpha(x).
  const std::vector<double>& survival_poly(int alpha) const { return spoly_[alpha]; }

 private:
  RfLinkParams p_;
  HhPair hh_;
  int nm_ = 0;
  double psi_[2] = {0.0, 0.0};
  double k_ = 0.0;
  double ks_ = 0.0;
  std::vector<double> b_[2];      // PDF coefficients, index beta
  std::vector<double> c_[2];      // CDF coefficients, index beta
  std::vector<double> spoly_[2];  // survival polynomial, index = power of x
  std::vector<double> pdfpoly_[2];
  // Long-double copy of the survival polynomial: the alternating Horner sum
  // cancels by up to ~7 orders for large N mu, and double evaluation would
  // put a ~1e-9 absolute noise floor on the CDF.
  std::vector<long double> spoly_ld_[2];
  std::vector<long double> pdfpoly_ld_[2];
  long double psi_ld_[2] = {0.0L, 0.0L};
};

// Best-of-n_s transmit antenna selection over an eta-mu MRC hop.
// cdf() exponentiates the per-antenna CDF; the multinomial expansion is kept
// as coefficient tables so the metric assemblies can address each
// (m, n, u, v) term.
class TasSelectionDist {
 public:
  TasSelectionDist(const RfLinkParams& p, int n_s);

  double cdf(double x) const;           // [F(x)]^n_s
  double cdf_expanded(double x) const;  // multinomial-expansion path
  double survival(double x) const;      // binomial form, tail-accurate

  // One (m, n) block of the expansion: the combinatorial and V^m factors are
  // folded into poly, so cdf_expanded = sum over terms of
  // e^(-phi_exp x) * poly(x).
  struct Term {
    int m = 0, n = 0;
    double phi_exp = 0.0;  // (m-n) psi_1 + n psi_2
    std::vector<double> poly;
  };
  // Empty when n_s * (N mu - 1) > 64 (only the direct-power path applies).
  const std::vector<Term>& terms() const { return terms_; }

  // Raw expansion coefficient R = V^m psi_u psi_v (no binomial factors),
  // zero when (u, v) exceeds the block's polynomial degrees.
  double coefficient_r(int m, int n, int u, int v) const;
  double decay_rate(int m, int n) const;  // phi_exp of a block
  double min_positive_decay() const;      // smallest phi_exp over m >= 1

  const EtaMuMrcDist& mrc() const { return mrc_; }
  int n_s() const { return n_s_; }

 private:
  EtaMuMrcDist mrc_;
  int n_s_ = 1;
  double v_ = 0.0;  // -prefactor
  std::vector<std::vector<double>> pow1_, pow2_;  // survival-poly powers
  std::vector<Term> terms_;
};

// SNR distribution of the mEGG underwater optical hop.
class MeggDist {
 public:
  explicit MeggDist(const MeggParams& p);

  double pdf(double x) const;  // throws DomainError at x <= 0
  double cdf(double x) const;
  double cdf_via_gterms(double x) const;  // sum_i S_i G^{1,1}_{1,2} route
  double survival(double x) const;

  double electrical_snr() const { return k_.psi_r; }
  const MeggKernelConstants& kernels() const { return k_; }
  const MeggParams& params() const { return p_; }

  // gamma(U_i, N_i z^{V_i}): the G-function factor of branch i in {0, 1}.
  double g_term(int branch, double z) const;
  // x where N_i x^{V_i} = 1, per branch: the kernel scale knees that callers
  // must hand to the quadrature engine.
  std::vector<double> scale_knees() const;

 private:
  MeggParams p_;
  MeggKernelConstants k_;
};

// Eavesdropper hop: the same eta-mu MRC family plus the ascending-series CDF.
class EavesdropperDist {
 public:
  explicit EavesdropperDist(const RfLinkParams& p) : mrc_(p) {}

  double pdf(double x) const { return mrc_.pdf(x); }
  double cdf(double x) const { return mrc_.cdf(x); }
  double survival(double x) const { return mrc_.survival(x); }

  struct SeriesResult {
    double value = 0.0;
    double truncation_bound = 0.0;  // magnitude of the first omitted layer
  };
  // Ascending-series CDF truncated after `terms` powers. Throws
  // SeriesDiverged when the layer magnitudes are still growing at the end of
  // the budget (x too large for the requested term count).
  SeriesResult cdf_series(double x, int terms = 20) const;

  const EtaMuMrcDist& mrc() const { return mrc_; }

 private:
  EtaMuMrcDist mrc_;
};

// End-to-end SNR CDF of the dual-hop link under the min approximation:
// F = F_tas + F_megg - F_tas * F_megg.
class DualHopDist {
 public:
  explicit DualHopDist(const SystemConfig& cfg);

  double cdf(double x) const;
  double cdf_expanded(double x) const;  // expansion x G-term route
  double survival(double x) const { return tas_.survival(x) * megg_.survival(x); }

  const TasSelectionDist& tas() const { return tas_; }
  const MeggDist& megg() const { return megg_; }

 private:
  TasSelectionDist tas_;
  MeggDist megg_;
};

// Convenience one-shot wrappers over the distribution classes.
double etamu_mrc_pdf(double x, const RfLinkParams& p);
double etamu_mrc_cdf(double x, const RfLinkParams& p);
double tas_cdf(double x, const RfLinkParams& p, int n_s);
double megg_pdf(double x, const MeggParams& p);
double megg_cdf(double x, const MeggParams& p);
double eav_pdf(double x, const RfLinkParams& p);
double eav_cdf(double x, const RfLinkParams& p);
double eav_cdf_series(double x, const RfLinkParams& p, int terms = 20);
double dualhop_cdf(double x, const SystemConfig& cfg);

}  // namespace uowsec

#endif  // UOWSEC_LINKSTATS_HPP_
