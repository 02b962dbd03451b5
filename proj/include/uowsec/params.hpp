// Parameter types for the two eta-mu RF hops and the mEGG underwater-optical
// hop, their validation, and the derived constants (Format I/II h and H,
// electrical SNR, mixture kernel constants) every other module consumes.
#ifndef UOWSEC_PARAMS_HPP_
#define UOWSEC_PARAMS_HPP_

#include <array>
#include <cmath>
#include <string>

#include "uowsec/errors.hpp"

namespace uowsec {

enum class EtaMuFormat { FormatI, FormatII };

// r = 1: heterodyne detection; r = 2: intensity modulation / direct detection.
enum class Detection { HD = 1, IMDD = 2 };

struct HhPair {
  double h = 0.0;
  double big_h = 0.0;  // H; may be negative
};

// Format I: h = (2 + 1/eta + eta)/4, H = (1/eta - eta)/4, 0 < eta < inf.
// Format II: h = 1/(1 - eta^2), H = eta/(1 - eta^2), -1 < eta < 1.
// Throws DegenerateEta when |H| < 1e-9 * h (eta ~ 1 in Format I, eta ~ 0 in
// Format II): the integer-mu expansion coefficients carry H^-beta and blow up.
HhPair derive_h_H(double eta, EtaMuFormat format);

// One eta-mu MRC hop (serves both S-R and S-E links).
struct RfLinkParams {
  double eta = 2.0;
  int mu = 1;          // multipath clusters per antenna; integer by assumption
  int n_antennas = 1;  // N_r for S-R, N_e for S-E
  double avg_snr = 1.0;  // linear
  EtaMuFormat format = EtaMuFormat::FormatI;

  // Throws ValidationError (or DegenerateEta) naming the violated invariant.
  void validate() const;
  HhPair hh() const { return derive_h_H(eta, format); }
};

// The mEGG mixture for the R-D underwater optical hop: exponential component
// of weight omega and scale lambda, generalized-Gamma component (a, b, c).
struct MeggParams {
  double omega = 0.5;  // in (0, 1]; omega = 1 degenerates to pure exponential
  double lambda = 0.5;
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  Detection detection = Detection::HD;
  double avg_snr_d = 1.0;  // phi_d, linear

  void validate() const;
};

// Electrical SNR Psi_r: Psi_1 = phi_d for HD;
// Psi_2 = phi_d / (2 w lam^2 + b^2 (1-w) Gamma(a + 2/c)/Gamma(a)) for IM/DD.
double electrical_snr(const MeggParams& p);

// The five per-branch constants of the mEGG SNR kernel:
//   branch 1 (exponential): N = 1/(lam Psi^(1/r)), V = 1/r, U = 1,
//                           M = w/r, S = w
//   branch 2 (gen. Gamma):  N = 1/(b^c Psi^(c/r)), V = c/r, U = a,
//                           M = c(1-w)/(r Gamma(a)), S = (1-w)/Gamma(a)
struct MeggKernelConstants {
  struct Branch {
    double n = 0.0, v = 0.0, u = 0.0, m = 0.0, s = 0.0;
  };
  std::array<Branch, 2> branch;
  double psi_r = 0.0;  // the electrical SNR the constants were derived from
};

MeggKernelConstants megg_kernel_constants(const MeggParams& p);

// Full four-node scenario: S-R and S-E RF hops, R-D optical hop, the number
// of transmit antennas at S, and the target secrecy rate.
struct SystemConfig {
  RfLinkParams sr;
  RfLinkParams se;
  MeggParams rd;
  int n_s = 1;
  double target_rate = 0.0;  // varpi_0, bits/s/Hz
  std::string name;

  void validate() const;
  double sigma() const { return std::exp2(target_rate); }  // 2^varpi_0 >= 1
};

}  // namespace uowsec

#endif  // UOWSEC_PARAMS_HPP_
