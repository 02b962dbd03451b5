#include "uowsec/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace uowsec {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct Accumulator {
  double sum = 0.0, sumsq = 0.0;
  void add(double x) {
    sum += x;
    sumsq += x * x;
  }
  McEstimate finish(std::size_t n) const {
    const double mean = sum / static_cast<double>(n);
    const double var =
        std::max(0.0, sumsq / static_cast<double>(n) - mean * mean);
    return {mean, std::sqrt(var / static_cast<double>(n)), n};
  }
};

}  // namespace

std::mt19937_64 make_engine(const RngStream& stream) {
  std::uint64_t state = stream.seed ^ (stream.stream_id * 0x9e3779b97f4a7c15ULL +
                                       0xd1b54a32d192ed03ULL);
  std::seed_seq seq{
      static_cast<std::uint32_t>(splitmix64(state)),
      static_cast<std::uint32_t>(splitmix64(state)),
      static_cast<std::uint32_t>(splitmix64(state)),
      static_cast<std::uint32_t>(splitmix64(state)),
      static_cast<std::uint32_t>(splitmix64(state)),
      static_cast<std::uint32_t>(splitmix64(state)),
      static_cast<std::uint32_t>(splitmix64(state)),
      static_cast<std::uint32_t>(splitmix64(state)),
  };
  return std::mt19937_64(seq);
}

double sample_etamu_mrc(const RfLinkParams& p, std::mt19937_64& eng) {
  p.validate();
  if (p.format != EtaMuFormat::FormatI) {
    throw DomainError("sample_etamu_mrc: sampler is defined for Format I");
  }
  const int pairs = 2 * p.n_antennas * p.mu;
  const double eta = p.eta;
  std::normal_distribution<double> nd(0.0, 1.0);
  double w = 0.0;
  for (int i = 0; i < pairs; ++i) {
    const double zx = nd(eng);
    const double zy = nd(eng);
    w += eta * zx * zx + zy * zy;
  }
  return p.avg_snr * w / (static_cast<double>(pairs) * (1.0 + eta));
}

double sample_tas_snr(const RfLinkParams& p, int n_s, std::mt19937_64& eng) {
  if (n_s < 1) throw DomainError("sample_tas_snr: n_s must be >= 1");
  double best = sample_etamu_mrc(p, eng);
  for (int i = 1; i < n_s; ++i) {
    best = std::max(best, sample_etamu_mrc(p, eng));
  }
  return best;
}

double sample_megg(const MeggParams& p, std::mt19937_64& eng) {
  p.validate();
  const double psi_r = electrical_snr(p);
  const double r = static_cast<double>(p.detection);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double irradiance;
  if (u01(eng) < p.omega) {
    std::exponential_distribution<double> ed(1.0 / p.lambda);
    irradiance = ed(eng);
  } else {
    std::gamma_distribution<double> gd(p.a, 1.0);
    irradiance = p.b * std::pow(gd(eng), 1.0 / p.c);
  }
  return psi_r * std::pow(irradiance, r);
}

EndToEndSampler::EndToEndSampler(const SystemConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  if (cfg_.sr.format != EtaMuFormat::FormatI ||
      cfg_.se.format != EtaMuFormat::FormatI) {
    throw DomainError("EndToEndSampler: sampler is defined for Format I");
  }
  sr_sigma_x_ = std::sqrt(cfg_.sr.eta);
  sr_scale_ = cfg_.sr.avg_snr /
              (2.0 * cfg_.sr.n_antennas * cfg_.sr.mu * (1.0 + cfg_.sr.eta));
  se_sigma_x_ = std::sqrt(cfg_.se.eta);
  se_scale_ = cfg_.se.avg_snr /
              (2.0 * cfg_.se.n_antennas * cfg_.se.mu * (1.0 + cfg_.se.eta));
  psi_r_ = electrical_snr(cfg_.rd);
  inv_c_ = 1.0 / cfg_.rd.c;
}

EndToEndSample EndToEndSampler::draw(std::mt19937_64& eng) const {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  const auto mrc_draw = [&](int pairs, double sigma_x, double scale) {
    double w = 0.0;
    for (int i = 0; i < pairs; ++i) {
      const double zx = sigma_x * nd(eng);
      const double zy = nd(eng);
      w += zx * zx + zy * zy;
    }
    return scale * w;
  };

  const int sr_pairs = 2 * cfg_.sr.n_antennas * cfg_.sr.mu;
  double gamma_r = mrc_draw(sr_pairs, sr_sigma_x_, sr_scale_);
  for (int i = 1; i < cfg_.n_s; ++i) {
    gamma_r = std::max(gamma_r, mrc_draw(sr_pairs, sr_sigma_x_, sr_scale_));
  }

  double irradiance;
  if (u01(eng) < cfg_.rd.omega) {
    std::exponential_distribution<double> ed(1.0 / cfg_.rd.lambda);
    irradiance = ed(eng);
  } else {
    std::gamma_distribution<double> gd(cfg_.rd.a, 1.0);
    irradiance = cfg_.rd.b * std::pow(gd(eng), inv_c_);
  }
  const double r = static_cast<double>(cfg_.rd.detection);
  const double gamma_d = psi_r_ * std::pow(irradiance, r);

  const int se_pairs = 2 * cfg_.se.n_antennas * cfg_.se.mu;
  const double gamma_e = mrc_draw(se_pairs, se_sigma_x_, se_scale_);

  EndToEndSample out;
  out.gamma_f_exact = gamma_r * gamma_d / (gamma_r + gamma_d + 1.0);
  out.gamma_f_min = std::min(gamma_r, gamma_d);
  out.gamma_e = gamma_e;
  return out;
}

namespace {

struct AllAccumulators {
  Accumulator asc, sop_l, sop_exact, spsc;
  std::size_t n = 0;

  void run(const EndToEndSampler& sampler, std::size_t count, SnrForm form,
           std::mt19937_64& eng, double sigma) {
    for (std::size_t i = 0; i < count; ++i) {
      const EndToEndSample s = sampler.draw(eng);
      const double gf =
          (form == SnrForm::Min) ? s.gamma_f_min : s.gamma_f_exact;
      asc.add(std::max(0.0, std::log1p(gf) - std::log1p(s.gamma_e)));
      sop_l.add(gf <= sigma * s.gamma_e ? 1.0 : 0.0);
      sop_exact.add(gf <= sigma * s.gamma_e + sigma - 1.0 ? 1.0 : 0.0);
      spsc.add(gf > s.gamma_e ? 1.0 : 0.0);
    }
    n += count;
  }

  McMetrics finish() const {
    return {asc.finish(n), sop_l.finish(n), sop_exact.finish(n),
            spsc.finish(n)};
  }
};

void require_sample_count(std::size_t n) {
  if (n < 1000) {
    throw DomainError("MC estimate requires n >= 1000 samples");
  }
}

}  // namespace

McMetrics estimate_all(const SystemConfig& cfg, std::size_t n, SnrForm form,
                       const RngStream& stream) {
  require_sample_count(n);
  EndToEndSampler sampler(cfg);
  std::mt19937_64 eng = make_engine(stream);
  AllAccumulators acc;
  acc.run(sampler, n, form, eng, cfg.sigma());
  return acc.finish();
}

McEstimate estimate_metric(Metric metric, const SystemConfig& cfg,
                           std::size_t n, SnrForm form,
                           const RngStream& stream) {
  const McMetrics m = estimate_all(cfg, n, form, stream);
  switch (metric) {
    case Metric::ASC:
      return m.asc;
    case Metric::SOP_L:
      return m.sop_l;
    case Metric::SOP_EXACT:
      return m.sop_exact;
    case Metric::SPSC:
      return m.spsc;
  }
  throw DomainError("unknown metric");
}

McMetrics estimate_all_parallel(const SystemConfig& cfg, std::size_t n,
                                SnrForm form, const RngStream& stream, int k) {
  require_sample_count(n);
  if (k < 1) throw DomainError("estimate_all_parallel: k must be >= 1");
  if (k == 1) return estimate_all(cfg, n, form, stream);

  const std::size_t uk = static_cast<std::size_t>(k);
  std::vector<McMetrics> parts(uk);
  std::vector<std::size_t> counts(uk, n / uk);
  counts[0] += n % uk;

  EndToEndSampler sampler(cfg);
  const double sigma = cfg.sigma();
  std::vector<std::thread> workers;
  workers.reserve(uk);
  for (std::size_t j = 0; j < uk; ++j) {
    workers.emplace_back([&, j] {
      RngStream sub{stream.seed, stream.stream_id * uk + j};
      std::mt19937_64 eng = make_engine(sub);
      AllAccumulators acc;
      acc.run(sampler, counts[j], form, eng, sigma);
      parts[j] = acc.finish();
    });
  }
  for (auto& w : workers) w.join();

  const auto pool = [&](auto select) {
    McEstimate out;
    double mean = 0.0, var = 0.0;
    for (std::size_t j = 0; j < uk; ++j) {
      const McEstimate& e = select(parts[j]);
      const double wj = static_cast<double>(e.n_samples) / static_cast<double>(n);
      mean += wj * e.mean;
      var += wj * wj * e.std_error * e.std_error;
      out.n_samples += e.n_samples;
    }
    out.mean = mean;
    out.std_error = std::sqrt(var);
    return out;
  };
  McMetrics merged;
  merged.asc = pool([](const McMetrics& m) { return m.asc; });
  merged.sop_l = pool([](const McMetrics& m) { return m.sop_l; });
  merged.sop_exact = pool([](const McMetrics& m) { return m.sop_exact; });
  merged.spsc = pool([](const McMetrics& m) { return m.spsc; });
  return merged;
}

double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf) {
  if (samples.empty()) throw DomainError("ks_statistic: empty sample set");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double fx = cdf(samples[i]);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max(d, std::max(fx - lo, hi - fx));
  }
  return d;
}

double ks_critical_value(std::size_t n, double alpha) {
  if (n == 0 || !(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("ks_critical_value: need n > 0 and alpha in (0,1)");
  }
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) /
         std::sqrt(static_cast<double>(n));
}

}  // namespace uowsec
