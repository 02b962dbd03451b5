// The three secrecy metrics (ASC, lower-bound SOP, SPSC) evaluated from the
// defining integrals and from the term-by-term series assemblies, with every
// A-, B- and S-term individually addressable.
//
// The term-wise ASC assemblies integrate every term on a shared cap [0, Z]:
// the leading term and the G-term tails diverge individually and only cancel
// jointly. asc_direct integrates the defining expression and is the
// reference the assemblies are checked against.
#ifndef UOWSEC_SECRECY_HPP_
#define UOWSEC_SECRECY_HPP_

#include "uowsec/montecarlo.hpp"
#include "uowsec/params.hpp"

namespace uowsec {

enum class MetricMethod {
  DirectQuadrature,
  SeriesAssembly1,
  SeriesAssembly2,
  ClosedForm,
  MonteCarlo,
};

struct MetricResult {
  double value = 0.0;
  double error_estimate = 0.0;
  MetricMethod method = MetricMethod::DirectQuadrature;
  // Set when a series assembly differs from asc_direct by more than
  // 1e-2 * max(1, |value|): the cancellation structure did not hold.
  bool cancellation_warning = false;
};

// Average secrecy capacity (nats per channel use) by direct quadrature of
// int_0^inf F_e(x) (1 - F_f(x)) / (1+x) dx. The module's reference ASC.
MetricResult asc_direct(const SystemConfig& cfg);

// Shared integration cap used by the term-wise assemblies when none is given:
// 1e6 times the largest scale knee of the integrands.
double asc_default_cap(const SystemConfig& cfg);

// First series assembly: the leading term is ln(1 + cap_z), every other term
// is integrated on [0, cap_z]. Requires cap_z >= 1e3 * max(1/psi_1, 1/Omega_1)
// (pass 0 to use asc_default_cap).
MetricResult asc_series_1(const SystemConfig& cfg, double cap_z = 0.0);

// Second series assembly, built on the ascending-series eavesdropper CDF
// truncated at `terms`. Usable only where the truncated series stays accurate
// over the effective support of the remaining integrand; outside that regime
// throws SeriesDiverged. cap_z = 0 selects the support knee automatically.
MetricResult asc_series_2(const SystemConfig& cfg, int terms = 20,
                          double cap_z = 0.0);

// Individually addressable assembly terms, each computed by quadrature of
// its defining integral on [0, cap_z] (0 = asc_default_cap). Index fields
// irrelevant to a kind are ignored.
enum class AscTermKind { A2, A3, A4, A5, A6, A7, A8 };
enum class BTermKind { B1, B2, B3, B4 };

struct AscTermIndex {
  int delta = 0;     // eavesdropper branch (0-based)
  int theta = 0;     // eavesdropper coefficient index
  int varsigma = 0;  // power index of the L_e sum
  int m = 0, n = 0, u = 0, v = 0;  // TAS-expansion indices
  int branch = 0;    // mEGG branch i (0-based)
  int z1 = 0;        // series index (B-terms); w_z = N_e mu_e - theta + z1
};

double asc_term(AscTermKind kind, const AscTermIndex& idx,
                const SystemConfig& cfg, double cap_z = 0.0);
double asc_b_term(BTermKind kind, const AscTermIndex& idx,
                  const SystemConfig& cfg, double cap_z = 0.0);

// Lower-bound secrecy outage probability. Both routes are computed: the
// defining integral int F_f(sigma x) f_e(x) dx and the closed assembly
// (exact Gamma form for the pure-exponential term, quadrature for the
// G-kernel terms). Returns the closed-path value; error_estimate covers the
// route disagreement. Throws NonConvergent if the routes disagree beyond
// max(1e-6, 1e-4 * value).
MetricResult sop_lower(const SystemConfig& cfg);
double sop_lower_integral_path(const SystemConfig& cfg);
double sop_lower_closed_path(const SystemConfig& cfg);

// Exact-definition SOP (threshold sigma*gamma_e + sigma - 1, exact relay
// SNR). No analytic route exists; delegates to the Monte-Carlo engine so the
// bound gap SOP >= SOP_L is observable.
MetricResult sop_exact_mc_reference(const SystemConfig& cfg,
                                    std::size_t n_samples,
                                    const RngStream& stream);

// Strictly positive secrecy capacity: 1 - SOP_L at zero target rate.
MetricResult spsc(const SystemConfig& cfg);

}  // namespace uowsec

#endif  // UOWSEC_SECRECY_HPP_
