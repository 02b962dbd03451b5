#include "uowsec/params.hpp"

#include <cmath>
#include <sstream>

namespace uowsec {

HhPair derive_h_H(double eta, EtaMuFormat format) {
  HhPair out;
  if (format == EtaMuFormat::FormatI) {
    if (!(eta > 0.0) || !std::isfinite(eta)) {
      throw DomainError("Format I requires 0 < eta < inf");
    }
    out.h = (2.0 + 1.0 / eta + eta) / 4.0;
    out.big_h = (1.0 / eta - eta) / 4.0;
  } else {
    if (!(eta > -1.0 && eta < 1.0)) {
      throw DomainError("Format II requires -1 < eta < 1");
    }
    const double d = 1.0 - eta * eta;
    out.h = 1.0 / d;
    out.big_h = eta / d;
  }
  if (std::fabs(out.big_h) < 1e-9 * out.h) {
    std::ostringstream os;
    os << "eta = " << eta << " is degenerate (H ~ 0): the expansion "
       << "coefficients carry H^-beta";
    throw DegenerateEta(os.str());
  }
  return out;
}

void RfLinkParams::validate() const {
  if (mu < 1) throw ValidationError("RfLinkParams.mu: must be an integer >= 1");
  if (n_antennas < 1) throw ValidationError("RfLinkParams.n_antennas: must be >= 1");
  if (!(avg_snr > 0.0) || !std::isfinite(avg_snr)) {
    throw ValidationError("RfLinkParams.avg_snr: must be > 0 and finite");
  }
  derive_h_H(eta, format);  // throws DomainError/DegenerateEta if illegal
}

void MeggParams::validate() const {
  if (!(omega > 0.0 && omega <= 1.0)) {
    throw ValidationError("MeggParams.omega: must be in (0, 1]");
  }
  if (!(lambda > 0.0)) throw ValidationError("MeggParams.lambda: must be > 0");
  if (!(a > 0.0)) throw ValidationError("MeggParams.a: must be > 0");
  if (!(b > 0.0)) throw ValidationError("MeggParams.b: must be > 0");
  if (!(c > 0.0)) throw ValidationError("MeggParams.c: must be > 0");
  if (!(avg_snr_d > 0.0) || !std::isfinite(avg_snr_d)) {
    throw ValidationError("MeggParams.avg_snr_d: must be > 0 and finite");
  }
  if (!(electrical_snr(*this) > 0.0)) {
    throw ValidationError("MeggParams: derived electrical SNR must be > 0");
  }
}

double electrical_snr(const MeggParams& p) {
  if (p.detection == Detection::HD) return p.avg_snr_d;
  // E[I^2] of the mixture: exponential contributes 2 lam^2, the generalized
  // Gamma component contributes b^2 Gamma(a + 2/c)/Gamma(a).
  const double gg_second_moment =
      p.b * p.b * std::exp(std::lgamma(p.a + 2.0 / p.c) - std::lgamma(p.a));
  const double denom =
      2.0 * p.omega * p.lambda * p.lambda + (1.0 - p.omega) * gg_second_moment;
  return p.avg_snr_d / denom;
}

MeggKernelConstants megg_kernel_constants(const MeggParams& p) {
  MeggKernelConstants k;
  k.psi_r = electrical_snr(p);
  const double r = static_cast<double>(p.detection);
  const double gamma_a = std::tgamma(p.a);

  k.branch[0].n = 1.0 / (p.lambda * std::pow(k.psi_r, 1.0 / r));
  k.branch[0].v = 1.0 / r;
  k.branch[0].u = 1.0;
  k.branch[0].m = p.omega / r;
  k.branch[0].s = p.omega;

  k.branch[1].n = 1.0 / (std::pow(p.b, p.c) * std::pow(k.psi_r, p.c / r));
  k.branch[1].v = p.c / r;
  k.branch[1].u = p.a;
  k.branch[1].m = p.c * (1.0 - p.omega) / (r * gamma_a);
  k.branch[1].s = (1.0 - p.omega) / gamma_a;
  return k;
}

void SystemConfig::validate() const {
  sr.validate();
  se.validate();
  rd.validate();
  if (n_s < 1) throw ValidationError("SystemConfig.n_s: must be >= 1");
  if (!(target_rate >= 0.0) || !std::isfinite(target_rate)) {
    throw ValidationError("SystemConfig.target_rate: must be >= 0 and finite");
  }
}

}  // namespace uowsec
