#include "uowsec/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "uowsec/secrecy.hpp"

namespace uowsec {

using nlohmann::json;

std::string to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::PhiRDb: return "phi_r_db";
    case SweepVariable::PhiEDb: return "phi_e_db";
    case SweepVariable::PhiDDb: return "phi_d_db";
    case SweepVariable::PsiRDb: return "psi_r_db";
    case SweepVariable::NS: return "n_s";
    case SweepVariable::NR: return "n_r";
    case SweepVariable::NE: return "n_e";
    case SweepVariable::EtaR: return "eta_r";
    case SweepVariable::EtaE: return "eta_e";
    case SweepVariable::MuR: return "mu_r";
    case SweepVariable::MuE: return "mu_e";
    case SweepVariable::TargetRate: return "target_rate";
  }
  return "?";
}

std::string to_string(MetricKind m) {
  switch (m) {
    case MetricKind::ASC: return "ASC";
    case MetricKind::SOP_L: return "SOP_L";
    case MetricKind::SPSC: return "SPSC";
  }
  return "?";
}

std::string to_string(EngineKind e) {
  return e == EngineKind::Analytic ? "analytic" : "mc";
}

void SweepSpec::validate() const {
  base.validate();
  if (grid.empty()) throw ValidationError("sweep.grid: must be nonempty");
  if (grid.size() > 1) {
    const bool increasing = grid[1] > grid[0];
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const bool ok = increasing ? grid[i] > grid[i - 1] : grid[i] < grid[i - 1];
      if (!ok) throw ValidationError("sweep.grid: must be strictly monotone");
    }
  }
  if (metrics.empty()) throw ValidationError("sweep.metrics: must be nonempty");
  if (engines.empty()) throw ValidationError("sweep.engines: must be nonempty");
  const bool has_mc =
      std::find(engines.begin(), engines.end(), EngineKind::Mc) != engines.end();
  if (has_mc && mc_samples < 1000) {
    throw ValidationError("sweep.mc_samples: must be >= 1000 with the mc engine");
  }
}

namespace {

int as_exact_int(double value, const char* what) {
  const double r = std::round(value);
  if (std::fabs(value - r) > 1e-9) {
    throw ValidationError(std::string(what) + ": grid value must be an integer");
  }
  return static_cast<int>(r);
}

}  // namespace

SystemConfig apply_variable(const SystemConfig& base, SweepVariable v,
                            double value) {
  SystemConfig cfg = base;
  switch (v) {
    case SweepVariable::PhiRDb:
      cfg.sr.avg_snr = db_to_linear(value);
      break;
    case SweepVariable::PhiEDb:
      cfg.se.avg_snr = db_to_linear(value);
      break;
    case SweepVariable::PhiDDb:
      cfg.rd.avg_snr_d = db_to_linear(value);
      break;
    case SweepVariable::PsiRDb: {
      // electrical_snr is proportional to avg_snr_d; rescale so the derived
      // electrical SNR lands on the grid value.
      const double ratio = cfg.rd.avg_snr_d / electrical_snr(cfg.rd);
      cfg.rd.avg_snr_d = db_to_linear(value) * ratio;
      break;
    }
    case SweepVariable::NS:
      cfg.n_s = as_exact_int(value, "n_s");
      break;
    case SweepVariable::NR:
      cfg.sr.n_antennas = as_exact_int(value, "n_r");
      break;
    case SweepVariable::NE:
      cfg.se.n_antennas = as_exact_int(value, "n_e");
      break;
    case SweepVariable::EtaR:
      cfg.sr.eta = value;
      break;
    case SweepVariable::EtaE:
      cfg.se.eta = value;
      break;
    case SweepVariable::MuR:
      cfg.sr.mu = as_exact_int(value, "mu_r");
      break;
    case SweepVariable::MuE:
      cfg.se.mu = as_exact_int(value, "mu_e");
      break;
    case SweepVariable::TargetRate:
      cfg.target_rate = value;
      break;
  }
  cfg.validate();
  return cfg;
}

namespace {

std::string error_token(const Error& e) {
  if (dynamic_cast<const DegenerateEta*>(&e)) return "DegenerateEta";
  if (dynamic_cast<const PoleError*>(&e)) return "PoleError";
  if (dynamic_cast<const SeriesDiverged*>(&e)) return "SeriesDiverged";
  if (dynamic_cast<const NonConvergent*>(&e)) return "NonConvergent";
  if (dynamic_cast<const ValidationError*>(&e)) return "ValidationError";
  if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
  if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
  return "Error";
}

int worker_count(std::size_t points) {
  unsigned n = std::thread::hardware_concurrency();
  if (const char* env = std::getenv("UOWSEC_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) n = static_cast<unsigned>(v);
  }
  if (n == 0) n = 1;
  return static_cast<int>(std::min<std::size_t>(n, std::max<std::size_t>(points, 1)));
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

SweepTable run_sweep(const SweepSpec& spec, std::uint64_t seed, bool timing) {
  spec.validate();
  const std::string var_name = to_string(spec.variable);
  const std::size_t n_points = spec.grid.size();
  const std::size_t rows_per_point = spec.metrics.size() * spec.engines.size();

  SweepTable table;
  table.rows.resize(n_points * rows_per_point);

  const auto row_slot = [&](std::size_t point, std::size_t mi, std::size_t ei)
      -> SweepRow& {
    return table.rows[point * rows_per_point + mi * spec.engines.size() + ei];
  };

  const auto eval_point = [&](std::size_t pi) {
    const double value = spec.grid[pi];
    for (std::size_t mi = 0; mi < spec.metrics.size(); ++mi) {
      for (std::size_t ei = 0; ei < spec.engines.size(); ++ei) {
        SweepRow& row = row_slot(pi, mi, ei);
        row.variable = var_name;
        row.value = value;
        row.metric = to_string(spec.metrics[mi]);
        row.engine = to_string(spec.engines[ei]);
        row.result = std::numeric_limits<double>::quiet_NaN();
      }
    }

    SystemConfig cfg;
    try {
      cfg = apply_variable(spec.base, spec.variable, value);
    } catch (const Error& e) {
      for (std::size_t mi = 0; mi < spec.metrics.size(); ++mi) {
        for (std::size_t ei = 0; ei < spec.engines.size(); ++ei) {
          row_slot(pi, mi, ei).status = error_token(e);
        }
      }
      return;
    }

    for (std::size_t ei = 0; ei < spec.engines.size(); ++ei) {
      if (spec.engines[ei] == EngineKind::Analytic) {
        for (std::size_t mi = 0; mi < spec.metrics.size(); ++mi) {
          SweepRow& row = row_slot(pi, mi, ei);
          const auto t0 = std::chrono::steady_clock::now();
          try {
            MetricResult r;
            switch (spec.metrics[mi]) {
              case MetricKind::ASC: r = asc_direct(cfg); break;
              case MetricKind::SOP_L: r = sop_lower(cfg); break;
              case MetricKind::SPSC: r = spsc(cfg); break;
            }
            row.result = r.value;
            row.error = r.error_estimate;
            row.status = "ok";
          } catch (const Error& e) {
            row.status = error_token(e);
          }
          if (timing) row.ms = elapsed_ms(t0);
        }
      } else {
        const auto t0 = std::chrono::steady_clock::now();
        try {
          const McMetrics mc = estimate_all(cfg, spec.mc_samples,
                                            spec.mc_snr_form,
                                            RngStream{seed, pi});
          const double ms = timing ? elapsed_ms(t0) : 0.0;
          for (std::size_t mi = 0; mi < spec.metrics.size(); ++mi) {
            SweepRow& row = row_slot(pi, mi, ei);
            McEstimate e;
            switch (spec.metrics[mi]) {
              case MetricKind::ASC: e = mc.asc; break;
              case MetricKind::SOP_L: e = mc.sop_l; break;
              case MetricKind::SPSC: e = mc.spsc; break;
            }
            row.result = e.mean;
            row.error = e.std_error;
            row.status = "ok";
            row.ms = ms;
          }
        } catch (const Error& e) {
          for (std::size_t mi = 0; mi < spec.metrics.size(); ++mi) {
            row_slot(pi, mi, ei).status = error_token(e);
          }
        }
      }
    }
  };

  const int n_workers = worker_count(n_points);
  if (n_workers <= 1 || n_points <= 1) {
    for (std::size_t pi = 0; pi < n_points; ++pi) eval_point(pi);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t pi = next.fetch_add(1); pi < n_points;
             pi = next.fetch_add(1)) {
          eval_point(pi);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  return table;
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string to_csv(const SweepTable& table) {
  std::ostringstream os;
  os << "variable,value,metric,engine,result,error,status,ms\n";
  for (const SweepRow& r : table.rows) {
    os << r.variable << ',' << fmt_double(r.value) << ',' << r.metric << ','
       << r.engine << ',' << fmt_double(r.result) << ',' << fmt_double(r.error)
       << ',' << r.status << ',' << fmt_double(r.ms) << '\n';
  }
  return os.str();
}

std::string to_jsonl(const SweepTable& table) {
  std::ostringstream os;
  for (const SweepRow& r : table.rows) {
    json j;
    j["variable"] = r.variable;
    j["value"] = r.value;
    j["metric"] = r.metric;
    j["engine"] = r.engine;
    if (std::isnan(r.result)) {
      j["result"] = nullptr;
    } else {
      j["result"] = r.result;
    }
    j["error"] = r.error;
    j["status"] = r.status;
    j["ms"] = r.ms;
    os << j.dump() << '\n';
  }
  return os.str();
}

CompareReport compare_report(const SweepTable& table) {
  struct Cell {
    const SweepRow* analytic = nullptr;
    const SweepRow* mc = nullptr;
  };
  std::map<std::pair<double, std::string>, Cell> cells;
  for (const SweepRow& r : table.rows) {
    if (r.status != "ok") continue;
    Cell& c = cells[{r.value, r.metric}];
    if (r.engine == "analytic") c.analytic = &r;
    if (r.engine == "mc") c.mc = &r;
  }

  CompareReport rep;
  for (const auto& [key, cell] : cells) {
    if (!cell.analytic || !cell.mc) continue;
    ++rep.points_compared;
    const double a = cell.analytic->result;
    const double m = cell.mc->result;
    const double delta = std::fabs(a - m);
    const double tol = std::max(0.01 * std::fabs(a), 4.0 * cell.mc->error);
    if (delta > tol) {
      rep.flags.push_back({key.first, key.second, a, m, cell.mc->error, delta});
    }
  }
  if (rep.points_compared == 0) {
    throw MissingEngine(
        "compare_report: no (value, metric) pair carries both engines");
  }
  return rep;
}

std::string CompareReport::human() const {
  std::ostringstream os;
  os << "analytic vs mc: " << points_compared << " points compared, "
     << flags.size() << " flagged\n";
  for (const auto& f : flags) {
    os << "  FLAG " << f.metric << " @ " << f.value << ": analytic "
       << f.analytic << " vs mc " << f.mc << " (se " << f.mc_std_error
       << "), delta " << f.delta << "\n";
  }
  os << (flags.empty() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

std::string CompareReport::machine_json() const {
  json j;
  j["points_compared"] = points_compared;
  j["n_flagged"] = flags.size();
  j["pass"] = flags.empty();
  j["flags"] = json::array();
  for (const auto& f : flags) {
    json e;
    e["value"] = f.value;
    e["metric"] = f.metric;
    e["analytic"] = f.analytic;
    e["mc"] = f.mc;
    e["mc_std_error"] = f.mc_std_error;
    e["delta"] = f.delta;
    j["flags"].push_back(e);
  }
  return j.dump(2);
}

namespace {

[[noreturn]] void parse_fail(const std::string& origin, const std::string& what) {
  throw ParseError(origin + ": " + what);
}

double get_number(const json& j, const std::string& origin,
                  const std::string& field) {
  if (!j.contains(field)) parse_fail(origin, "missing field '" + field + "'");
  if (!j[field].is_number()) parse_fail(origin, "field '" + field + "' must be a number");
  return j[field].get<double>();
}

int get_integer(const json& j, const std::string& origin,
                const std::string& field) {
  if (!j.contains(field)) parse_fail(origin, "missing field '" + field + "'");
  if (!j[field].is_number_integer()) {
    throw ValidationError(origin + ": field '" + field +
                          "' must be an integer");
  }
  return j[field].get<int>();
}

// avg_snr may be given linear ("avg_snr") or in dB ("avg_snr_db"), not both.
double read_snr(const json& j, const std::string& origin) {
  const bool lin = j.contains("avg_snr");
  const bool db = j.contains("avg_snr_db");
  if (lin && db) parse_fail(origin, "give avg_snr or avg_snr_db, not both");
  if (!lin && !db) parse_fail(origin, "missing avg_snr or avg_snr_db");
  return lin ? get_number(j, origin, "avg_snr")
             : db_to_linear(get_number(j, origin, "avg_snr_db"));
}

RfLinkParams parse_rf(const json& j, const std::string& origin) {
  if (!j.is_object()) parse_fail(origin, "must be an object");
  RfLinkParams p;
  p.eta = get_number(j, origin, "eta");
  p.mu = get_integer(j, origin, "mu");
  p.n_antennas = get_integer(j, origin, "n_antennas");
  p.avg_snr = read_snr(j, origin);
  if (j.contains("format")) {
    const std::string f = j["format"].get<std::string>();
    if (f == "I") {
      p.format = EtaMuFormat::FormatI;
    } else if (f == "II") {
      p.format = EtaMuFormat::FormatII;
    } else {
      parse_fail(origin, "format must be \"I\" or \"II\"");
    }
  }
  return p;
}

MeggParams parse_rd(const json& j, const std::string& origin,
                    const std::string& config_dir) {
  if (!j.is_object()) parse_fail(origin, "must be an object");
  MeggParams p;
  if (j.contains("preset")) {
    if (!j.contains("presets_file")) {
      parse_fail(origin, "preset requires presets_file");
    }
    std::string path = j["presets_file"].get<std::string>();
    if (!path.empty() && path.front() != '/' && !config_dir.empty()) {
      path = config_dir + "/" + path;
    }
    const PresetTable presets = load_presets(path);
    const std::string label = j["preset"].get<std::string>();
    const auto it = presets.find(label);
    if (it == presets.end()) {
      parse_fail(origin, "preset '" + label + "' not found in " + path);
    }
    p.omega = it->second.omega;
    p.lambda = it->second.lambda;
    p.a = it->second.a;
    p.b = it->second.b;
    p.c = it->second.c;
  }
  // Explicit fields override preset values.
  if (j.contains("omega") || !j.contains("preset")) p.omega = get_number(j, origin, "omega");
  if (j.contains("lambda") || !j.contains("preset")) p.lambda = get_number(j, origin, "lambda");
  if (j.contains("a") || !j.contains("preset")) p.a = get_number(j, origin, "a");
  if (j.contains("b") || !j.contains("preset")) p.b = get_number(j, origin, "b");
  if (j.contains("c") || !j.contains("preset")) p.c = get_number(j, origin, "c");
  if (!j.contains("detection")) parse_fail(origin, "missing field 'detection'");
  const std::string det = j["detection"].get<std::string>();
  if (det == "hd") {
    p.detection = Detection::HD;
  } else if (det == "imdd") {
    p.detection = Detection::IMDD;
  } else {
    parse_fail(origin, "detection must be \"hd\" or \"imdd\"");
  }
  p.avg_snr_d = read_snr(j, origin);
  return p;
}

SweepVariable parse_variable(const std::string& s, const std::string& origin) {
  for (SweepVariable v :
       {SweepVariable::PhiRDb, SweepVariable::PhiEDb, SweepVariable::PhiDDb,
        SweepVariable::PsiRDb, SweepVariable::NS, SweepVariable::NR,
        SweepVariable::NE, SweepVariable::EtaR, SweepVariable::EtaE,
        SweepVariable::MuR, SweepVariable::MuE, SweepVariable::TargetRate}) {
    if (to_string(v) == s) return v;
  }
  parse_fail(origin, "unknown sweep variable '" + s + "'");
}

MetricKind parse_metric(const std::string& s, const std::string& origin) {
  if (s == "asc" || s == "ASC") return MetricKind::ASC;
  if (s == "sop_l" || s == "SOP_L") return MetricKind::SOP_L;
  if (s == "spsc" || s == "SPSC") return MetricKind::SPSC;
  parse_fail(origin, "unknown metric '" + s + "'");
}

}  // namespace

PresetTable load_presets(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("presets file not found: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (!j.is_object()) throw ParseError(path + ": top level must be an object");
  PresetTable out;
  for (const auto& [label, rec] : j.items()) {
    MeggPreset p;
    p.omega = get_number(rec, path + ":" + label, "omega");
    p.lambda = get_number(rec, path + ":" + label, "lambda");
    p.a = get_number(rec, path + ":" + label, "a");
    p.b = get_number(rec, path + ":" + label, "b");
    p.c = get_number(rec, path + ":" + label, "c");
    out[label] = p;
  }
  return out;
}

LoadedConfig parse_config_text(const std::string& text,
                               const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(origin + ": " + e.what());
  }
  if (!j.is_object()) parse_fail(origin, "top level must be an object");

  std::string dir;
  const auto slash = origin.find_last_of('/');
  if (slash != std::string::npos) dir = origin.substr(0, slash);

  LoadedConfig out;
  if (!j.contains("sr")) parse_fail(origin, "missing object 'sr'");
  if (!j.contains("se")) parse_fail(origin, "missing object 'se'");
  if (!j.contains("rd")) parse_fail(origin, "missing object 'rd'");
  out.config.sr = parse_rf(j["sr"], origin + ":sr");
  out.config.se = parse_rf(j["se"], origin + ":se");
  out.config.rd = parse_rd(j["rd"], origin + ":rd", dir);
  out.config.n_s = get_integer(j, origin, "n_s");
  out.config.target_rate =
      j.contains("target_rate_bits") ? get_number(j, origin, "target_rate_bits") : 0.0;
  if (j.contains("name")) out.config.name = j["name"].get<std::string>();
  out.config.validate();

  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    const std::string so = origin + ":sweep";
    SweepSpec spec;
    spec.base = out.config;
    if (!s.contains("variable")) parse_fail(so, "missing field 'variable'");
    spec.variable = parse_variable(s["variable"].get<std::string>(), so);
    if (!s.contains("grid") || !s["grid"].is_array() || s["grid"].empty()) {
      parse_fail(so, "grid must be a nonempty array");
    }
    spec.grid = s["grid"].get<std::vector<double>>();
    if (s.contains("metrics")) {
      spec.metrics.clear();
      for (const auto& m : s["metrics"]) {
        spec.metrics.push_back(parse_metric(m.get<std::string>(), so));
      }
    }
    if (s.contains("engines")) {
      spec.engines.clear();
      for (const auto& e : s["engines"]) {
        const std::string es = e.get<std::string>();
        if (es == "analytic") {
          spec.engines.push_back(EngineKind::Analytic);
        } else if (es == "mc") {
          spec.engines.push_back(EngineKind::Mc);
        } else {
          parse_fail(so, "unknown engine '" + es + "'");
        }
      }
    }
    if (s.contains("mc_samples")) {
      spec.mc_samples = static_cast<std::size_t>(get_integer(s, so, "mc_samples"));
    }
    if (s.contains("mc_snr_form")) {
      const std::string f = s["mc_snr_form"].get<std::string>();
      if (f == "min") {
        spec.mc_snr_form = SnrForm::Min;
      } else if (f == "exact") {
        spec.mc_snr_form = SnrForm::Exact;
      } else {
        parse_fail(so, "mc_snr_form must be \"min\" or \"exact\"");
      }
    }
    spec.validate();
    out.sweep = std::move(spec);
  }
  return out;
}

LoadedConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("config file not found: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

}  // namespace uowsec
