// Independent stochastic oracle. Samples every link at the Gaussian /
// mixture-construction level (never through the analytic PDFs), forms the
// end-to-end SNRs, and estimates each secrecy metric with a standard error.
#ifndef UOWSEC_MONTECARLO_HPP_
#define UOWSEC_MONTECARLO_HPP_

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "uowsec/params.hpp"

namespace uowsec {

// Identifies one reproducible random stream. Identical (seed, stream_id)
// reproduce identical sample sequences; distinct stream_ids are independent.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

// Deterministic engine construction from a stream identity.
std::mt19937_64 make_engine(const RngStream& stream);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample std / sqrt(n)
  std::size_t n_samples = 0;
};

enum class Metric { ASC, SOP_L, SOP_EXACT, SPSC };

// Which end-to-end SNR enters the estimator: the exact variable-gain relay
// form gr*gd/(gr+gd+1) or its min(gr, gd) upper bound (the analytic engine's
// definition).
enum class SnrForm { Exact, Min };

// One eta-mu MRC SNR draw built from 2*N*mu Gaussian in-phase/quadrature
// pairs with power ratio eta, scaled so the mean equals avg_snr (Format I).
double sample_etamu_mrc(const RfLinkParams& p, std::mt19937_64& eng);

// Best of n_s independent MRC draws (selection on the S-R link only).
double sample_tas_snr(const RfLinkParams& p, int n_s, std::mt19937_64& eng);

// mEGG SNR draw: irradiance from the exponential/generalized-Gamma mixture,
// mapped through gamma = Psi_r * I^r.
double sample_megg(const MeggParams& p, std::mt19937_64& eng);

struct EndToEndSample {
  double gamma_f_exact = 0.0;
  double gamma_f_min = 0.0;
  double gamma_e = 0.0;
};

// Caches derived constants so per-trial work is pure sampling.
class EndToEndSampler {
 public:
  explicit EndToEndSampler(const SystemConfig& cfg);
  EndToEndSample draw(std::mt19937_64& eng) const;
  const SystemConfig& config() const { return cfg_; }

 private:
  SystemConfig cfg_;
  double sr_sigma_x_ = 0.0;  // sqrt(eta/(1+eta)) scaling, S-R link
  double sr_scale_ = 0.0;
  double se_sigma_x_ = 0.0;
  double se_scale_ = 0.0;
  double psi_r_ = 0.0;
  double inv_c_ = 0.0;
};

// n >= 1000 required. Deterministic for a fixed stream.
McEstimate estimate_metric(Metric metric, const SystemConfig& cfg,
                           std::size_t n, SnrForm form,
                           const RngStream& stream);

// All four metrics from one pass over a shared sample set.
struct McMetrics {
  McEstimate asc, sop_l, sop_exact, spsc;
};
McMetrics estimate_all(const SystemConfig& cfg, std::size_t n, SnrForm form,
                       const RngStream& stream);

// Fan-out across k worker streams (stream_id * k + j), merged by
// sample-weighted pooling. Deterministic given (stream, k).
McMetrics estimate_all_parallel(const SystemConfig& cfg, std::size_t n,
                                SnrForm form, const RngStream& stream, int k);

// Two-sided Kolmogorov-Smirnov distance between a sample set and a
// reference CDF.
double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf);

// Asymptotic KS critical value c(alpha)/sqrt(n), c = sqrt(-ln(alpha/2)/2).
double ks_critical_value(std::size_t n, double alpha = 0.05);

}  // namespace uowsec

#endif  // UOWSEC_MONTECARLO_HPP_
