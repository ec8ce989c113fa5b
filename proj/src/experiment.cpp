#include "qdmd/experiment.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "qdmd/observables.hpp"

namespace qdmd {
namespace {

namespace pt = boost::property_tree;

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string unquote(std::string s) {
  s = trim(std::move(s));
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) s = s.substr(1, s.size() - 2);
  return s;
}

/// Drops `#` comments outside quotes and unquotes scalar values so the INI
/// reader accepts TOML-flavoured files.
std::string normalize(std::istream& is) {
  std::ostringstream out;
  std::string line;
  while (std::getline(is, line)) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    const auto eq = line.find('=');
    if (eq != std::string::npos && trim(line).front() != '[') {
      line = trim(line.substr(0, eq)) + " = " + unquote(line.substr(eq + 1));
    }
    out << line << '\n';
  }
  return out.str();
}

std::vector<std::string> split_list(const std::string& raw) {
  std::string s = trim(raw);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') throw ConfigError("unterminated list: " + raw);
    s = s.substr(1, s.size() - 2);
  }
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = unquote(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_value(const std::string& key, const std::string& raw) {
  std::istringstream ss(raw);
  T v{};
  ss >> v;
  if (ss.fail() || !(ss >> std::ws).eof()) throw ConfigError(fmt::format("{}: cannot parse '{}'", key, raw));
  return v;
}

std::size_t parse_count(const std::string& key, const std::string& raw) {
  if (!raw.empty() && raw.front() == '-') throw ConfigError(fmt::format("{}: must be nonnegative, got {}", key, raw));
  return parse_value<std::size_t>(key, raw);
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"run", {"name", "seed", "threads"}},
      {"model", {"type", "L", "U", "tau0", "tau1", "mu", "h"}},
      {"simulation", {"dt", "steps", "shots"}},
      {"dmd", {"window", "n_s", "n_g", "tau", "rank", "threshold", "readout"}},
      {"observables", {"rows"}},
      {"sweep", {"m_values"}},
  };
  return keys;
}

bool parse_label(const std::string& label, const char* prefix, int count, int* out) {
  const std::string p(prefix);
  if (label.rfind(p, 0) != 0) return false;
  std::stringstream ss(label.substr(p.size()));
  for (int i = 0; i < count; ++i) {
    if (i > 0 && ss.get() != '_') return false;
    if (!(ss >> out[i]) || out[i] < 0) return false;
  }
  return ss.peek() == std::char_traits<char>::eof();
}

Eigen::VectorXcd standardized_window(const SnapshotSeries& series, std::size_t row, const IHODMDRow& fit,
                                     std::size_t m) {
  Eigen::VectorXcd v = series.values.row(static_cast<Eigen::Index>(row)).head(static_cast<Eigen::Index>(m)).transpose();
  return (v.array() - fit.mean) / fit.std;
}

}  // namespace

std::size_t ExperimentConfig::n_qubits() const {
  return model == ModelKind::Hubbard ? hubbard.n_qubits() : xxz.n_qubits();
}

void ExperimentConfig::validate() const {
  try {
    if (model == ModelKind::Hubbard) {
      hubbard.validate();
      if (hubbard.L % 2 != 0) throw ConfigError("model.L must be even for the half-filled Hubbard quench");
    } else {
      xxz.validate();
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("simulation.dt must be positive");
  if (threads < 1) throw ConfigError("run.threads must be >= 1");
  if (fit_window > total_steps + 1) {
    throw ConfigError(fmt::format("dmd.window = {} exceeds the {} snapshots of a {}-step run", fit_window,
                                  total_steps + 1, total_steps));
  }
  try {
    embedding.columns(fit_window);
    policy.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json model_json;
  if (model == ModelKind::Hubbard) {
    model_json = {{"type", "hubbard"}, {"L", hubbard.L}, {"tau0", hubbard.tau0}, {"tau1", hubbard.tau1},
                  {"U", hubbard.U},     {"mu", hubbard.mu}};
  } else {
    model_json = {{"type", "xxz"}, {"L", xxz.L}, {"U", xxz.U}, {"h", xxz.h}};
  }
  return {
      {"name", name},
      {"model", model_json},
      {"simulation", {{"dt", dt}, {"steps", total_steps}, {"shots", shots}}},
      {"dmd",
       {{"window", fit_window},
        {"n_s", embedding.n_s},
        {"n_g", embedding.n_g},
        {"tau", embedding.tau},
        {"policy", policy.describe()},
        {"readout", readout == Readout::First ? "first" : "average"}}},
      {"observables", {{"rows", rows}}},
      {"sweep", {{"m_values", sweep_m}}},
      {"seed", seed},
      {"threads", threads},
  };
}

std::string ExperimentConfig::to_text() const {
  std::string out;
  auto line = [&out](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
  auto quoted = [](const std::string& s) { return "\"" + s + "\""; };
  auto list = [](const auto& items, auto fmt_item) {
    std::string s = "[";
    for (std::size_t i = 0; i < items.size(); ++i) s += (i ? ", " : "") + fmt_item(items[i]);
    return s + "]";
  };
  out += "[run]\n";
  line("name", quoted(name));
  line("seed", std::to_string(seed));
  line("threads", std::to_string(threads));
  out += "\n[model]\n";
  if (model == ModelKind::Hubbard) {
    line("type", quoted("hubbard"));
    line("L", std::to_string(hubbard.L));
    line("tau0", format_double(hubbard.tau0));
    line("tau1", format_double(hubbard.tau1));
    line("U", format_double(hubbard.U));
    line("mu", format_double(hubbard.mu));
  } else {
    line("type", quoted("xxz"));
    line("L", std::to_string(xxz.L));
    line("U", format_double(xxz.U));
    line("h", format_double(xxz.h));
  }
  out += "\n[simulation]\n";
  line("dt", format_double(dt));
  line("steps", std::to_string(total_steps));
  line("shots", std::to_string(shots));
  out += "\n[dmd]\n";
  line("window", std::to_string(fit_window));
  line("n_s", std::to_string(embedding.n_s));
  line("n_g", std::to_string(embedding.n_g));
  line("tau", std::to_string(embedding.tau));
  if (policy.mode == RankPolicy::Mode::Fixed) {
    line("rank", std::to_string(policy.rank));
  } else {
    line("threshold", format_double(policy.threshold));
  }
  line("readout", quoted(readout == Readout::First ? "first" : "average"));
  out += "\n[observables]\n";
  line("rows", list(rows, [&](const std::string& s) { return quoted(s); }));
  out += "\n[sweep]\n";
  line("m_values", list(sweep_m, [](std::size_t v) { return std::to_string(v); }));
  return out;
}

ExperimentConfig parse_config(std::istream& is) {
  std::istringstream normalized(normalize(is));
  pt::ptree tree;
  try {
    pt::read_ini(normalized, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  const auto& known = known_keys();
  for (const auto& [section, body] : tree) {
    const auto it = known.find(section);
    if (it == known.end()) throw ConfigError("config: unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError(fmt::format("config: unknown key {}.{}", section, key));
    }
  }
  auto get = [&tree](const std::string& path) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) return trim(*v);
    return std::nullopt;
  };

  ExperimentConfig cfg;
  if (auto v = get("run.name")) cfg.name = *v;
  if (auto v = get("run.seed")) cfg.seed = parse_value<std::uint64_t>("run.seed", *v);
  if (auto v = get("run.threads")) cfg.threads = parse_count("run.threads", *v);

  const std::string type = get("model.type").value_or("hubbard");
  if (type == "hubbard") {
    cfg.model = ModelKind::Hubbard;
    if (get("model.h")) throw ConfigError("model.h applies to the xxz model only");
    if (auto v = get("model.L")) cfg.hubbard.L = parse_value<int>("model.L", *v);
    if (auto v = get("model.tau0")) cfg.hubbard.tau0 = parse_value<double>("model.tau0", *v);
    if (auto v = get("model.tau1")) cfg.hubbard.tau1 = parse_value<double>("model.tau1", *v);
    if (auto v = get("model.U")) cfg.hubbard.U = parse_value<double>("model.U", *v);
    cfg.hubbard.mu = cfg.hubbard.U / 2.0;
    if (auto v = get("model.mu")) cfg.hubbard.mu = parse_value<double>("model.mu", *v);
  } else if (type == "xxz") {
    cfg.model = ModelKind::XXZ;
    for (const char* k : {"model.tau0", "model.tau1", "model.mu"}) {
      if (get(k)) throw ConfigError(std::string(k) + " applies to the hubbard model only");
    }
    if (auto v = get("model.L")) cfg.xxz.L = parse_value<int>("model.L", *v);
    if (auto v = get("model.U")) cfg.xxz.U = parse_value<double>("model.U", *v);
    if (auto v = get("model.h")) cfg.xxz.h = parse_value<double>("model.h", *v);
  } else {
    throw ConfigError("model.type must be 'hubbard' or 'xxz', got '" + type + "'");
  }

  if (auto v = get("simulation.dt")) cfg.dt = parse_value<double>("simulation.dt", *v);
  if (auto v = get("simulation.steps")) cfg.total_steps = parse_count("simulation.steps", *v);
  if (auto v = get("simulation.shots")) cfg.shots = parse_count("simulation.shots", *v);

  if (auto v = get("dmd.window")) cfg.fit_window = parse_count("dmd.window", *v);
  if (auto v = get("dmd.n_s")) cfg.embedding.n_s = parse_count("dmd.n_s", *v);
  if (auto v = get("dmd.n_g")) cfg.embedding.n_g = parse_count("dmd.n_g", *v);
  if (auto v = get("dmd.tau")) cfg.embedding.tau = parse_count("dmd.tau", *v);
  const auto rank = get("dmd.rank");
  const auto threshold = get("dmd.threshold");
  if (rank && threshold) throw ConfigError("dmd.rank and dmd.threshold are mutually exclusive");
  if (rank) cfg.policy = RankPolicy::fixed(parse_count("dmd.rank", *rank));
  if (threshold) cfg.policy = RankPolicy::relative(parse_value<double>("dmd.threshold", *threshold));
  if (auto v = get("dmd.readout")) {
    if (*v == "first") {
      cfg.readout = Readout::First;
    } else if (*v == "average") {
      cfg.readout = Readout::DelayAverage;
    } else {
      throw ConfigError("dmd.readout must be 'first' or 'average'");
    }
  }

  if (auto v = get("observables.rows")) cfg.rows = split_list(*v);
  if (auto v = get("sweep.m_values")) {
    for (const auto& item : split_list(*v)) cfg.sweep_m.push_back(parse_count("sweep.m_values", item));
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse_config(in);
}

QubitHamiltonian evolution_hamiltonian(const ExperimentConfig& cfg) {
  return cfg.model == ModelKind::Hubbard ? build_hubbard_h1(cfg.hubbard) : build_xxz(cfg.xxz);
}

StateVector initial_state(const ExperimentConfig& cfg) {
  if (cfg.model == ModelKind::Hubbard) return prepare_hubbard_ground_state(cfg.hubbard).state;
  return prepare_domain_wall(cfg.xxz.L);
}

Recorder experiment_recorder(const ExperimentConfig& cfg) {
  return cfg.model == ModelKind::Hubbard ? hubbard_recorder(cfg.hubbard.L) : xxz_recorder(cfg.xxz.L);
}

PauliOperator observable_for_label(const ExperimentConfig& cfg, const std::string& label) {
  int idx[2] = {0, 0};
  if (cfg.model == ModelKind::Hubbard) {
    const int L = cfg.hubbard.L;
    if (parse_label(label, "rho_", 2, idx) && idx[0] < L && idx[1] < L) {
      return density_operator(idx[0], idx[1], Spin::Up, L);
    }
    if (parse_label(label, "nk_", 1, idx) && idx[0] < L) {
      return momentum_operator(momentum_grid_point(idx[0], L), Spin::Up, L);
    }
  } else {
    const int L = cfg.xxz.L;
    std::string letters(static_cast<std::size_t>(L), 'I');
    if (parse_label(label, "zz_", 2, idx) && idx[0] < L && idx[1] < L && idx[0] != idx[1]) {
      letters[static_cast<std::size_t>(idx[0])] = 'Z';
      letters[static_cast<std::size_t>(idx[1])] = 'Z';
      return PauliOperator::from_string(letters);
    }
    if (parse_label(label, "z_", 1, idx) && idx[0] < L) {
      letters[static_cast<std::size_t>(idx[0])] = 'Z';
      return PauliOperator::from_string(letters);
    }
  }
  throw ConfigError("no observable named '" + label + "' for this model");
}

SnapshotSeries simulate(const ExperimentConfig& cfg) {
  const std::size_t n = cfg.n_qubits();
  if (n > kMaxSimulationQubits) {
    const double gib = std::ldexp(16.0, static_cast<int>(n)) / (1024.0 * 1024.0 * 1024.0);
    throw ResourceLimitError(fmt::format("{} qubits requested; the statevector alone needs {:.1f} GiB (limit {} qubits)",
                                         n, gib, kMaxSimulationQubits));
  }
  const TrotterPlan plan = TrotterPlan::canonical(evolution_hamiltonian(cfg), cfg.dt);
  SnapshotSeries series = evolve_and_record(initial_state(cfg), plan, cfg.total_steps, experiment_recorder(cfg));
  if (cfg.shots > 0) series = shot_noise_inject(series, cfg.shots, cfg.seed);
  return series;
}

Extrapolation extrapolate(const ExperimentConfig& cfg, const SnapshotSeries& trajectory) {
  cfg.validate();
  const std::size_t m = cfg.fit_window;
  if (trajectory.columns() < m) {
    throw ConfigError(fmt::format("trajectory has {} snapshots, dmd.window = {}", trajectory.columns(), m));
  }
  try {
    cfg.embedding.columns(m);
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }

  Extrapolation run;
  run.truth = cfg.rows.empty() ? trajectory : trajectory.select(cfg.rows);
  run.model = fit_ihodmd(run.truth, m, cfg.embedding, cfg.policy, cfg.threads);
  run.prediction = predict_series(run.model, run.truth.columns() - 1, cfg.readout);
  run.curve = empirical_error_curve(run.truth, run.prediction);
  run.curve.m = m;
  run.curve.params = cfg.embedding.describe();
  run.curve.model_id = cfg.name;
  run.envelope = t32_envelope_check(run.curve, run.truth.time(m - 1));
  return run;
}

bool BoundReport::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const RowBound& r) { return r.dominated; });
}

nlohmann::json BoundReport::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j = {{"label", r.label},
                        {"inputs", qdmd::to_json(r.inputs)},
                        {"global_bound_at_end", std::isfinite(r.inputs.phi_cond) ? global_bound(r.inputs) : -1.0},
                        {"worst_error_to_bound_ratio", r.worst_ratio},
                        {"dominated", r.dominated},
                        {"phi_rank_deficient", r.phi_rank_deficient}};
    j["first_violation"] = r.first_violation ? nlohmann::json(*r.first_violation) : nlohmann::json(nullptr);
    out.push_back(std::move(j));
  }
  return {{"rows", std::move(out)}, {"pass", pass()}};
}

BoundReport bound_report(const ExperimentConfig& cfg, const Extrapolation& run) {
  const QubitHamiltonian h = evolution_hamiltonian(cfg);
  const double h_frobenius = frobenius_norm(h);
  const std::size_t m = run.model.window;
  const std::size_t last = run.truth.columns();  // snapshot number of t_M
  const auto n_s = static_cast<double>(run.model.params.n_s);

  BoundReport report;
  for (std::size_t j = 0; j < run.model.rows.size(); ++j) {
    const IHODMDRow& fit = run.model.rows[j];
    if (!fit.model) continue;  // constant or failed rows carry no modes
    RowBound row;
    row.label = fit.label;

    PauliOperator centered = observable_for_label(cfg, fit.label);
    centered += -fit.mean * PauliOperator::identity(centered.n_qubits());

    const Eigen::VectorXcd window = standardized_window(run.truth, j, fit, m);
    const DataMatrices embedded = build_delay_matrices({window.data(), m}, run.model.params, m, run.model.dt);
    const ConditionNumber cond = condition_number(fit.model->modes);

    BoundInputs in;
    in.h_frobenius = h_frobenius;
    in.o_frobenius = std::sqrt(n_s) * centered.frobenius_norm();
    in.c_m = surrogate_cm(*fit.model, embedded);
    in.delta_m = run.curve.errors(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(m - 1));
    in.phi_cond = cond.value;
    in.dt = run.model.dt;
    in.m = m;
    row.phi_rank_deficient = cond.infinite;

    for (std::size_t n = m + 1; n <= last; ++n) {
      in.n = n;
      const double bound = global_bound(in);
      const double err = run.curve.errors(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(n - 1));
      const double ratio = bound > 0.0 ? err / bound : (err > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      row.worst_ratio = std::max(row.worst_ratio, ratio);
      if (!(err <= bound) && !row.first_violation) {
        row.first_violation = n;
        row.dominated = false;
      }
    }
    in.n = std::max(last, m);
    row.inputs = in;
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::vector<SweepPoint> sweep(const ExperimentConfig& cfg, const SnapshotSeries& trajectory) {
  if (cfg.rows.size() != 1) throw ConfigError("sweep-m needs exactly one entry in observables.rows");
  if (cfg.sweep_m.empty()) throw ConfigError("sweep.m_values is empty");
  SweepRequest req;
  req.row = cfg.rows.front();
  req.m_values = cfg.sweep_m;
  req.params = cfg.embedding;
  req.policy = cfg.policy;
  req.final_column = trajectory.columns() - 1;
  req.readout = cfg.readout;
  return error_vs_m_sweep(trajectory, req, cfg.threads);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

void write_error_csv(const std::filesystem::path& path, const ErrorCurve& curve) {
  std::string out = "t";
  for (const auto& l : curve.labels) out += "," + l;
  out += "\n";
  for (std::size_t n = 0; n < curve.times.size(); ++n) {
    out += format_double(curve.times[n]);
    for (Eigen::Index r = 0; r < curve.errors.rows(); ++r) {
      out += "," + format_double(curve.errors(r, static_cast<Eigen::Index>(n)));
    }
    out += "\n";
  }
  write_text(path, out);
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepPoint>& points) {
  std::string out = "m,error_at_T\n";
  for (const auto& p : points) {
    if (p.skipped) continue;
    out += std::to_string(p.m) + "," + format_double(p.error) + "\n";
  }
  write_text(path, out);
}

void write_provenance(const std::filesystem::path& dir, const ExperimentConfig& cfg) {
  write_text(dir / "config.toml", cfg.to_text());
  nlohmann::json j = {
      {"version", version()},
      {"config", cfg.to_json()},
      {"n_qubits", cfg.n_qubits()},
      {"initial_state", cfg.model == ModelKind::Hubbard ? "half-filled ground state of H0" : "domain wall"},
      {"hamiltonian", to_json(evolution_hamiltonian(cfg))},
  };
  if (cfg.model == ModelKind::Hubbard) j["initial_hamiltonian"] = to_json(build_hubbard_h0(cfg.hubbard));
  write_json(dir / "provenance.json", j);
}

std::string gnuplot_script(const Extrapolation& run) {
  const std::string col = run.truth.complex_rows.front() ? run.truth.labels.front() + ".re" : run.truth.labels.front();
  return fmt::format(
      "set datafile separator ','\n"
      "set xlabel 't'\n"
      "set ylabel '{0}'\n"
      "set object 1 rect from 0, graph 0 to {1}, graph 1 fc rgb '#d0f0f0' behind\n"
      "plot 'trajectory.csv' using 't':'{0}' with points pt 4 title 'simulation', \\\n"
      "     'prediction.csv' using 't':'{0}' with lines lw 2 title 'iHODMD'\n",
      col, format_double(run.truth.time(run.model.window - 1)));
}

std::string version() { return QDMD_VERSION; }

}  // namespace qdmd
