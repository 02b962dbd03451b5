// Configuration ingestion (JSON), parameter sweeps over one independent
// variable with analytic and Monte-Carlo engines, and analytic-vs-MC
// comparison reports. CSV output is byte-stable for a fixed seed and config.
#ifndef UOWSEC_SWEEP_HPP_
#define UOWSEC_SWEEP_HPP_

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uowsec/montecarlo.hpp"
#include "uowsec/params.hpp"

namespace uowsec {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

enum class SweepVariable {
  PhiRDb,
  PhiEDb,
  PhiDDb,
  PsiRDb,
  NS,
  NR,
  NE,
  EtaR,
  EtaE,
  MuR,
  MuE,
  TargetRate,
};

enum class MetricKind { ASC, SOP_L, SPSC };
enum class EngineKind { Analytic, Mc };

std::string to_string(SweepVariable v);
std::string to_string(MetricKind m);
std::string to_string(EngineKind e);

struct SweepSpec {
  SystemConfig base;
  SweepVariable variable = SweepVariable::PhiRDb;
  std::vector<double> grid;  // nonempty, strictly monotone
  std::vector<MetricKind> metrics = {MetricKind::ASC, MetricKind::SOP_L,
                                     MetricKind::SPSC};
  std::vector<EngineKind> engines = {EngineKind::Analytic};
  std::size_t mc_samples = 1'000'000;
  SnrForm mc_snr_form = SnrForm::Min;

  void validate() const;
};

// Returns base with the swept variable applied; integer-valued variables
// reject non-integer grid values.
SystemConfig apply_variable(const SystemConfig& base, SweepVariable v,
                            double value);

struct SweepRow {
  std::string variable;
  double value = 0.0;
  std::string metric;
  std::string engine;
  double result = 0.0;  // NaN when status != "ok"
  double error = 0.0;
  std::string status = "ok";
  double ms = 0.0;  // 0 unless timing was requested
};

struct SweepTable {
  std::vector<SweepRow> rows;
};

// Evaluates every (grid point, metric, engine) cell on a worker pool.
// MC streams derive deterministically from (seed, grid index). Per-point
// failures are recorded in the row's status column and never abort the
// sweep. Worker count: UOWSEC_WORKERS env var, else hardware concurrency.
SweepTable run_sweep(const SweepSpec& spec, std::uint64_t seed,
                     bool timing = false);

struct CompareFlagged {
  double value = 0.0;
  std::string metric;
  double analytic = 0.0;
  double mc = 0.0;
  double mc_std_error = 0.0;
  double delta = 0.0;
};

struct CompareReport {
  std::size_t points_compared = 0;
  std::vector<CompareFlagged> flags;
  bool pass() const { return flags.empty(); }
  std::string human() const;
  std::string machine_json() const;
};

// Per-point |analytic - mc| check at max(0.01*|analytic|, 4*mc std error).
// Throws MissingEngine when no (value, metric) pair carries both engines.
CompareReport compare_report(const SweepTable& table);

// Fixed column order; floats at 17 significant digits.
std::string to_csv(const SweepTable& table);
std::string to_jsonl(const SweepTable& table);

// mEGG mixture parameters keyed by a water-condition label.
struct MeggPreset {
  double omega = 0.0, lambda = 0.0, a = 0.0, b = 0.0, c = 0.0;
};
using PresetTable = std::map<std::string, MeggPreset>;

PresetTable load_presets(const std::string& path);

struct LoadedConfig {
  SystemConfig config;
  std::optional<SweepSpec> sweep;
};

// Parses and validates a JSON scenario file (schema documented in the
// repo README). dB fields are converted to linear exactly once, here.
LoadedConfig load_config(const std::string& path);
LoadedConfig parse_config_text(const std::string& text,
                               const std::string& origin = "<string>");

}  // namespace uowsec

#endif  // UOWSEC_SWEEP_HPP_
