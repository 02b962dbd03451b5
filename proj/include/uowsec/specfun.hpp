// Special-function and quadrature substrate: incomplete gamma, Beta, the
// low-order Meijer-G reductions with elementary closed forms, the Delta(k, a)
// parameter-sequence helper, and an adaptive semi-infinite quadrature engine
// with an explicit error contract.
#ifndef UOWSEC_SPECFUN_HPP_
#define UOWSEC_SPECFUN_HPP_

#include <cstddef>
#include <functional>
#include <vector>

#include "uowsec/errors.hpp"

namespace uowsec {

struct QuadResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;  // <= max(tol_abs, tol_rel*|value|) on success
  std::size_t evaluations = 0;
};

struct QuadOptions {
  double tol_abs = 1e-10;
  double tol_rel = 1e-8;
  std::size_t max_evaluations = 1'000'000;
  // Interior points where the integrand changes scale (exponential knees,
  // mixture-kernel knees). The subdivision heuristic cannot see a boundary
  // layer hidden inside one panel of the transformed interval.
  std::vector<double> breakpoints;
};

using Integrand = std::function<double(double)>;

// Adaptive Gauss-Kronrod (7/15) on a finite interval [a, b].
QuadResult quad_finite(const Integrand& f, double a, double b,
                       const QuadOptions& opts = {});

// Adaptive quadrature of f over (0, inf) after the change of variable
// x = t/(1-t); breakpoints are given in x-space. The caller guarantees f
// is finite on (0, inf) and decays fast enough to be integrable.
// Throws NonConvergent when the error target is unmet within the budget.
QuadResult quad_semi_infinite(const Integrand& f, const QuadOptions& opts = {});

// Unregularized lower incomplete gamma: gamma(a, x) = int_0^x t^(a-1) e^-t dt.
// Power series for x < a+1, continued fraction of the upper function
// otherwise. Relative accuracy <= 1e-12 over the stated domain.
double lower_incomplete_gamma(double a, double x);

// Regularized forms P(a,x) = gamma(a,x)/Gamma(a) and Q(a,x) = 1 - P(a,x).
double reg_lower_incomplete_gamma(double a, double x);
double reg_upper_incomplete_gamma(double a, double x);

// G^{1,0}_{0,1}[z | -; b] = z^b e^-z.
double meijer_g_1012(double z, double b);

// G^{1,1}_{1,2}[z | 1; u, 0] = gamma(u, z)  (lower incomplete gamma).
double meijer_g_1112(double z, double u);

// Beta function via log-Gamma, with sign tracking for negative non-integer
// arguments. Throws PoleError at nonpositive-integer x or y.
double beta_fn(double x, double y);

// Scaled modified Bessel function of the first kind: I_v(x) * e^-x, v >= 0.
// Series for moderate x, Hankel asymptotic expansion beyond. Never overflows.
double bessel_i_scaled(double v, double x);

// Delta(k, a) = {a/k, (a+1)/k, ..., (a+k-1)/k}: the parameter-sequence
// shorthand used in G-function parameter lists.
struct DeltaSeq {
  int k = 1;
  double a = 0.0;
  std::vector<double> values() const;
};

}  // namespace uowsec

#endif  // UOWSEC_SPECFUN_HPP_
