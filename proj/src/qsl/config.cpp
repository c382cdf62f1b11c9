#include "qsl/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "qsl/io.hpp"
#include "qsl/steadystate.hpp"

namespace qsl {

namespace {

constexpr std::pair<ExperimentKind, const char*> kKindNames[] = {
    {ExperimentKind::steady_tiles, "steady_tiles"},
    {ExperimentKind::wigner_cuts, "wigner_cuts"},
    {ExperimentKind::evolution_snapshots, "evolution_snapshots"},
    {ExperimentKind::coherence_tiles, "coherence_tiles"},
    {ExperimentKind::negativity_traces, "negativity_traces"},
    {ExperimentKind::gap_tiles, "gap_tiles"},
    {ExperimentKind::tss_tiles, "tss_tiles"},
    {ExperimentKind::tss_slices, "tss_slices"},
    {ExperimentKind::derive_eom, "derive_eom"},
};

std::string where(const YAML::Node& node) {
  const YAML::Mark m = node.Mark();
  if (m.is_null()) return "";
  return " (line " + std::to_string(m.line + 1) + ", column " + std::to_string(m.column + 1) + ")";
}

[[noreturn]] void field_error(const std::string& path, const YAML::Node& node,
                              const std::string& msg) {
  throw Error(ErrorCode::ConfigError, path + where(node) + ": " + msg);
}

template <class T>
T scalar(const YAML::Node& node, const std::string& path, const char* expected) {
  if (!node.IsScalar()) field_error(path, node, std::string("expected ") + expected);
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    field_error(path, node, std::string("expected ") + expected);
  }
}

double real(const YAML::Node& n, const std::string& path) {
  return scalar<double>(n, path, "a number");
}
int integer(const YAML::Node& n, const std::string& path) {
  return scalar<int>(n, path, "an integer");
}
bool boolean(const YAML::Node& n, const std::string& path) {
  return scalar<bool>(n, path, "true or false");
}
std::string text(const YAML::Node& n, const std::string& path) {
  return scalar<std::string>(n, path, "a string");
}

void require_map(const YAML::Node& node, const std::string& path,
                 const std::set<std::string>& allowed) {
  if (!node.IsMap()) field_error(path, node, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.contains(key)) {
      field_error(path.empty() ? key : path + "." + key, kv.first, "unknown field");
    }
  }
}

void require_seq(const YAML::Node& node, const std::string& path) {
  if (!node.IsSequence()) field_error(path, node, "expected a list");
}

AxisConfig parse_axis(const YAML::Node& n, const std::string& path) {
  require_map(n, path, {"min", "max", "count", "log"});
  AxisConfig a;
  if (n["min"]) a.min = real(n["min"], path + ".min");
  if (n["max"]) a.max = real(n["max"], path + ".max");
  if (n["count"]) a.count = integer(n["count"], path + ".count");
  if (n["log"]) a.log = boolean(n["log"], path + ".log");
  return a;
}

SLParams parse_params(const YAML::Node& n, const std::string& path) {
  require_map(n, path, {"kappa1", "gamma1", "gamma2"});
  SLParams p;
  if (n["kappa1"]) p.kappa1 = real(n["kappa1"], path + ".kappa1");
  if (n["gamma1"]) p.gamma1 = real(n["gamma1"], path + ".gamma1");
  if (n["gamma2"]) p.gamma2 = real(n["gamma2"], path + ".gamma2");
  return p;
}

StateConfig parse_state(const YAML::Node& n, const std::string& path) {
  require_map(n, path, {"kind", "n", "mean", "beta", "phi", "terms"});
  StateConfig s;
  if (!n["kind"]) field_error(path + ".kind", n, "missing");
  s.kind = text(n["kind"], path + ".kind");
  if (n["n"]) s.n = integer(n["n"], path + ".n");
  if (n["mean"]) s.mean = real(n["mean"], path + ".mean");
  if (n["beta"]) {
    const auto& b = n["beta"];
    if (b.IsSequence()) {
      if (b.size() != 2) field_error(path + ".beta", b, "expected [re, im]");
      s.beta_re = real(b[0], path + ".beta[0]");
      s.beta_im = real(b[1], path + ".beta[1]");
    } else {
      s.beta_re = real(b, path + ".beta");
    }
  }
  if (n["phi"]) s.phi = real(n["phi"], path + ".phi");
  if (n["terms"]) {
    require_seq(n["terms"], path + ".terms");
    for (std::size_t i = 0; i < n["terms"].size(); ++i) {
      const auto& t = n["terms"][i];
      const std::string tp = path + ".terms[" + std::to_string(i) + "]";
      if (!t.IsSequence() || t.size() < 2 || t.size() > 3) field_error(tp, t, "expected [level, re, im]");
      s.terms.emplace_back(integer(t[0], tp + "[0]"), real(t[1], tp + "[1]"),
                           t.size() == 3 ? real(t[2], tp + "[2]") : 0.0);
    }
  }
  return s;
}

template <class T, class F>
std::vector<T> parse_list(const YAML::Node& n, const std::string& path, F&& item) {
  require_seq(n, path);
  std::vector<T> out;
  for (std::size_t i = 0; i < n.size(); ++i) out.push_back(item(n[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

ExperimentConfig from_node(const YAML::Node& root) {
  require_map(root, "",
              {"experiment", "output_dir", "workers", "basis_kappa1", "grid", "dims", "params",
               "states", "cases", "state_kinds", "energies", "evolution", "steady_state_time",
               "wigner", "slice", "latex"});
  ExperimentConfig c;
  if (!root["experiment"]) field_error("experiment", root, "missing");
  {
    const std::string name = text(root["experiment"], "experiment");
    const auto kind = parse_experiment_kind(name);
    if (!kind) field_error("experiment", root["experiment"], "unknown experiment '" + name + "'");
    c.kind = *kind;
  }
  if (root["output_dir"]) c.output_dir = text(root["output_dir"], "output_dir");
  if (root["workers"]) c.workers = integer(root["workers"], "workers");
  if (root["basis_kappa1"]) c.basis_kappa1 = real(root["basis_kappa1"], "basis_kappa1");
  if (const auto g = root["grid"]) {
    require_map(g, "grid", {"A", "B"});
    if (g["A"]) c.grid_a = parse_axis(g["A"], "grid.A");
    if (g["B"]) c.grid_b = parse_axis(g["B"], "grid.B");
  }
  if (root["dims"]) c.dims = parse_list<int>(root["dims"], "dims", integer);
  if (root["params"]) c.params = parse_list<SLParams>(root["params"], "params", parse_params);
  if (root["states"]) c.states = parse_list<StateConfig>(root["states"], "states", parse_state);
  if (root["cases"]) {
    c.cases = parse_list<CaseConfig>(root["cases"], "cases", [](const YAML::Node& n, const std::string& p) {
      require_map(n, p, {"label", "params", "state", "times"});
      CaseConfig cc;
      if (n["label"]) cc.label = text(n["label"], p + ".label");
      if (!n["params"]) field_error(p + ".params", n, "missing");
      cc.params = parse_params(n["params"], p + ".params");
      if (!n["state"]) field_error(p + ".state", n, "missing");
      cc.state = parse_state(n["state"], p + ".state");
      if (n["times"]) cc.times = parse_list<double>(n["times"], p + ".times", real);
      return cc;
    });
  }
  if (root["state_kinds"]) {
    c.state_kinds = parse_list<std::string>(root["state_kinds"], "state_kinds", text);
  }
  if (root["energies"]) c.energies = parse_list<double>(root["energies"], "energies", real);
  if (const auto e = root["evolution"]) {
    require_map(e, "evolution", {"t_end", "sample_every", "atol", "rtol"});
    if (e["t_end"]) c.t_end = real(e["t_end"], "evolution.t_end");
    if (e["sample_every"]) c.sample_every = real(e["sample_every"], "evolution.sample_every");
    if (e["atol"]) c.atol = real(e["atol"], "evolution.atol");
    if (e["rtol"]) c.rtol = real(e["rtol"], "evolution.rtol");
  }
  if (const auto s = root["steady_state_time"]) {
    require_map(s, "steady_state_time", {"epsilon", "t_cap"});
    if (s["epsilon"]) c.epsilon = real(s["epsilon"], "steady_state_time.epsilon");
    if (s["t_cap"]) c.t_cap = real(s["t_cap"], "steady_state_time.t_cap");
  }
  if (const auto w = root["wigner"]) {
    require_map(w, "wigner", {"points", "half_width"});
    if (w["points"]) c.wigner_points = integer(w["points"], "wigner.points");
    if (w["half_width"]) c.wigner_half_width = real(w["half_width"], "wigner.half_width");
  }
  if (const auto s = root["slice"]) {
    require_map(s, "slice", {"vary", "fixed", "axis"});
    if (s["vary"]) c.slice.vary = text(s["vary"], "slice.vary");
    if (s["fixed"]) c.slice.fixed = real(s["fixed"], "slice.fixed");
    if (s["axis"]) c.slice.axis = parse_axis(s["axis"], "slice.axis");
  }
  if (root["latex"]) c.latex = boolean(root["latex"], "latex");
  return c;
}

void emit_axis(YAML::Emitter& e, const AxisConfig& a) {
  e << YAML::Flow << YAML::BeginMap;
  e << YAML::Key << "min" << YAML::Value << io::format_double(a.min);
  e << YAML::Key << "max" << YAML::Value << io::format_double(a.max);
  e << YAML::Key << "count" << YAML::Value << a.count;
  e << YAML::Key << "log" << YAML::Value << a.log;
  e << YAML::EndMap;
}

void emit_params(YAML::Emitter& e, const SLParams& p) {
  e << YAML::Flow << YAML::BeginMap;
  e << YAML::Key << "kappa1" << YAML::Value << io::format_double(p.kappa1);
  e << YAML::Key << "gamma1" << YAML::Value << io::format_double(p.gamma1);
  e << YAML::Key << "gamma2" << YAML::Value << io::format_double(p.gamma2);
  e << YAML::EndMap;
}

void emit_state(YAML::Emitter& e, const StateConfig& s) {
  e << YAML::Flow << YAML::BeginMap;
  e << YAML::Key << "kind" << YAML::Value << s.kind;
  e << YAML::Key << "n" << YAML::Value << s.n;
  e << YAML::Key << "mean" << YAML::Value << io::format_double(s.mean);
  e << YAML::Key << "beta" << YAML::Value << YAML::Flow << YAML::BeginSeq
    << io::format_double(s.beta_re) << io::format_double(s.beta_im) << YAML::EndSeq;
  e << YAML::Key << "phi" << YAML::Value << io::format_double(s.phi);
  e << YAML::Key << "terms" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (const auto& [level, re, im] : s.terms) {
    e << YAML::Flow << YAML::BeginSeq << level << io::format_double(re) << io::format_double(im)
      << YAML::EndSeq;
  }
  e << YAML::EndSeq << YAML::EndMap;
}

void emit_doubles(YAML::Emitter& e, const std::vector<double>& v) {
  e << YAML::Flow << YAML::BeginSeq;
  for (const double d : v) e << io::format_double(d);
  e << YAML::EndSeq;
}

bool is_regime_experiment(ExperimentKind k) {
  return k == ExperimentKind::steady_tiles || k == ExperimentKind::gap_tiles ||
         k == ExperimentKind::tss_tiles;
}

void check_axis(const AxisConfig& a, const std::string& path, std::vector<std::string>& errs) {
  if (a.count < 1) errs.push_back(path + ".count: must be >= 1");
  if (!(a.max >= a.min)) errs.push_back(path + ": max must be >= min");
  if (a.log && !(a.min > 0.0)) errs.push_back(path + ".min: log axis needs min > 0");
}

void check_state(const StateConfig& s, const std::string& path, std::vector<std::string>& errs) {
  static const std::set<std::string> kinds{"fock", "thermal", "coherent", "cat", "superposition"};
  if (!kinds.contains(s.kind)) {
    errs.push_back(path + ".kind: unknown state kind '" + s.kind + "'");
    return;
  }
  if (s.kind == "fock" && s.n < 0) errs.push_back(path + ".n: must be >= 0");
  if (s.kind == "thermal" && !(s.mean >= 0.0)) errs.push_back(path + ".mean: must be >= 0");
  if (s.kind == "superposition" && s.terms.empty()) errs.push_back(path + ".terms: must not be empty");
  if (s.kind == "cat") {
    try {
      (void)cat_normalization_squared({s.beta_re, s.beta_im}, s.phi);
    } catch (const Error& e) {
      errs.push_back(path + ": " + e.what());
    }
  }
}

void check_params(const SLParams& p, const std::string& path, bool steady,
                  std::vector<std::string>& errs) {
  try {
    p.validate();
  } catch (const Error& e) {
    errs.push_back(path + ": " + e.what());
    return;
  }
  if (steady && !(p.gamma2 > 0.0)) {
    errs.push_back(path + ".gamma2: this experiment needs the steady state, which requires gamma2 > 0");
  }
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<ExperimentKind> parse_experiment_kind(const std::string& name) {
  for (const auto& [k, n] : kKindNames) {
    if (name == n) return k;
  }
  return std::nullopt;
}

bool needs_steady_state(ExperimentKind kind) {
  return kind != ExperimentKind::negativity_traces && kind != ExperimentKind::derive_eom;
}

std::vector<double> AxisConfig::values() const {
  std::vector<double> v;
  if (count == 1) return {min};
  for (int i = 0; i < count; ++i) {
    const double f = static_cast<double>(i) / (count - 1);
    v.push_back(log ? min * std::pow(max / min, f) : min + (max - min) * f);
  }
  if (count > 1) v.back() = max;
  return v;
}

StateSpec StateConfig::spec() const {
  if (kind == "fock") return state::Fock{n};
  if (kind == "thermal") return state::Thermal{mean};
  if (kind == "coherent") return state::Coherent{{beta_re, beta_im}};
  if (kind == "cat") return state::Cat{{beta_re, beta_im}, phi};
  if (kind == "superposition") {
    state::FockSuperposition s;
    for (const auto& [level, re, im] : terms) s.terms.emplace_back(level, Complex(re, im));
    return s;
  }
  throw Error(ErrorCode::InvalidSpec, "unknown state kind '" + kind + "'");
}

std::string StateConfig::label() const {
  using io::format_double;
  if (kind == "fock") return "fock_" + std::to_string(n);
  if (kind == "thermal") return "thermal_" + format_double(mean);
  if (kind == "coherent") return "coherent_" + format_double(beta_re) + "_" + format_double(beta_im);
  if (kind == "cat") {
    return "cat_" + format_double(beta_re) + "_" + format_double(beta_im) + "_" + format_double(phi);
  }
  return "superposition_" + std::to_string(terms.size());
}

StateConfig state_with_energy(const std::string& kind, double energy) {
  StateConfig s;
  s.kind = kind;
  if (kind == "coherent") {
    s.beta_re = std::sqrt(energy);
  } else if (kind == "fock") {
    s.n = static_cast<int>(std::lround(energy));
  } else if (kind == "thermal") {
    s.mean = energy;
  } else {
    throw Error(ErrorCode::ConfigError, "no energy parameterization for state kind '" + kind + "'");
  }
  return s;
}

ExperimentConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(e.mark.line + 1) + ", column " +
                                           std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
  if (!root || root.IsNull()) throw Error(ErrorCode::ConfigError, "empty configuration");
  return from_node(root);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::IoError, "cannot read config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string to_yaml(const ExperimentConfig& c) {
  YAML::Emitter e;
  e << YAML::BeginMap;
  e << YAML::Key << "experiment" << YAML::Value << to_string(c.kind);
  e << YAML::Key << "output_dir" << YAML::Value << YAML::DoubleQuoted << c.output_dir;
  e << YAML::Key << "workers" << YAML::Value << c.workers;
  e << YAML::Key << "basis_kappa1" << YAML::Value << io::format_double(c.basis_kappa1);
  e << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "A" << YAML::Value;
  emit_axis(e, c.grid_a);
  e << YAML::Key << "B" << YAML::Value;
  emit_axis(e, c.grid_b);
  e << YAML::EndMap;
  e << YAML::Key << "dims" << YAML::Value << YAML::Flow << c.dims;
  e << YAML::Key << "params" << YAML::Value << YAML::BeginSeq;
  for (const auto& p : c.params) emit_params(e, p);
  e << YAML::EndSeq;
  e << YAML::Key << "states" << YAML::Value << YAML::BeginSeq;
  for (const auto& s : c.states) emit_state(e, s);
  e << YAML::EndSeq;
  e << YAML::Key << "cases" << YAML::Value << YAML::BeginSeq;
  for (const auto& cc : c.cases) {
    e << YAML::BeginMap;
    e << YAML::Key << "label" << YAML::Value << YAML::DoubleQuoted << cc.label;
    e << YAML::Key << "params" << YAML::Value;
    emit_params(e, cc.params);
    e << YAML::Key << "state" << YAML::Value;
    emit_state(e, cc.state);
    e << YAML::Key << "times" << YAML::Value;
    emit_doubles(e, cc.times);
    e << YAML::EndMap;
  }
  e << YAML::EndSeq;
  e << YAML::Key << "state_kinds" << YAML::Value << YAML::Flow << c.state_kinds;
  e << YAML::Key << "energies" << YAML::Value;
  emit_doubles(e, c.energies);
  e << YAML::Key << "evolution" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "t_end" << YAML::Value << io::format_double(c.t_end);
  e << YAML::Key << "sample_every" << YAML::Value << io::format_double(c.sample_every);
  e << YAML::Key << "atol" << YAML::Value << io::format_double(c.atol);
  e << YAML::Key << "rtol" << YAML::Value << io::format_double(c.rtol);
  e << YAML::EndMap;
  e << YAML::Key << "steady_state_time" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "epsilon" << YAML::Value << io::format_double(c.epsilon);
  e << YAML::Key << "t_cap" << YAML::Value << io::format_double(c.t_cap);
  e << YAML::EndMap;
  e << YAML::Key << "wigner" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "points" << YAML::Value << c.wigner_points;
  e << YAML::Key << "half_width" << YAML::Value << io::format_double(c.wigner_half_width);
  e << YAML::EndMap;
  e << YAML::Key << "slice" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "vary" << YAML::Value << c.slice.vary;
  e << YAML::Key << "fixed" << YAML::Value << io::format_double(c.slice.fixed);
  e << YAML::Key << "axis" << YAML::Value;
  emit_axis(e, c.slice.axis);
  e << YAML::EndMap;
  e << YAML::Key << "latex" << YAML::Value << c.latex;
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

void check_config(const ExperimentConfig& c) {
  std::vector<std::string> errs;
  const bool steady = needs_steady_state(c.kind);
  if (c.output_dir.empty()) errs.push_back("output_dir: must not be empty");
  if (c.workers < 1) errs.push_back("workers: must be >= 1");
  if (c.kind != ExperimentKind::derive_eom) {
    if (c.dims.empty()) errs.push_back("dims: must not be empty");
    for (std::size_t i = 0; i < c.dims.size(); ++i) {
      if (c.dims[i] < 2) errs.push_back("dims[" + std::to_string(i) + "]: must be >= 2");
    }
  }
  if (!(c.atol > 0.0)) errs.push_back("evolution.atol: must be > 0");
  if (!(c.rtol >= 0.0)) errs.push_back("evolution.rtol: must be >= 0");
  if (!(c.t_end >= 0.0)) errs.push_back("evolution.t_end: must be >= 0");
  if (!(c.sample_every >= 0.0)) errs.push_back("evolution.sample_every: must be >= 0");
  if (!(c.epsilon > 0.0)) errs.push_back("steady_state_time.epsilon: must be > 0");
  if (!(c.t_cap > 0.0)) errs.push_back("steady_state_time.t_cap: must be > 0");
  if (c.wigner_points < 11) errs.push_back("wigner.points: must be >= 11");
  if (!(c.wigner_half_width >= 0.0)) errs.push_back("wigner.half_width: must be >= 0");

  if (is_regime_experiment(c.kind) || c.kind == ExperimentKind::tss_slices) {
    if (!(c.basis_kappa1 > 0.0)) errs.push_back("basis_kappa1: must be > 0");
  }
  if (is_regime_experiment(c.kind)) {
    check_axis(c.grid_a, "grid.A", errs);
    check_axis(c.grid_b, "grid.B", errs);
    if (!c.grid_a.log && !(c.grid_a.min > 0.0)) errs.push_back("grid.A.min: A must be > 0");
    if (!c.grid_b.log && !(c.grid_b.min >= 0.0)) errs.push_back("grid.B.min: B must be >= 0");
  }
  for (std::size_t i = 0; i < c.params.size(); ++i) {
    check_params(c.params[i], "params[" + std::to_string(i) + "]", steady, errs);
  }
  for (std::size_t i = 0; i < c.states.size(); ++i) {
    check_state(c.states[i], "states[" + std::to_string(i) + "]", errs);
  }
  for (std::size_t i = 0; i < c.cases.size(); ++i) {
    const std::string p = "cases[" + std::to_string(i) + "]";
    check_params(c.cases[i].params, p + ".params", steady, errs);
    check_state(c.cases[i].state, p + ".state", errs);
    for (const double t : c.cases[i].times) {
      if (!(t >= 0.0)) errs.push_back(p + ".times: entries must be >= 0");
    }
  }

  switch (c.kind) {
    case ExperimentKind::wigner_cuts:
      if (c.params.empty()) errs.push_back("params: wigner_cuts needs at least one parameter set");
      break;
    case ExperimentKind::evolution_snapshots:
    case ExperimentKind::coherence_tiles:
      if (c.cases.empty()) errs.push_back("cases: must not be empty");
      for (std::size_t i = 0; i < c.cases.size(); ++i) {
        if (c.cases[i].times.empty()) {
          errs.push_back("cases[" + std::to_string(i) + "].times: must not be empty");
        }
      }
      break;
    case ExperimentKind::negativity_traces:
      if (c.params.size() != 1) errs.push_back("params: negativity_traces needs exactly one parameter set");
      if (c.states.empty()) errs.push_back("states: must not be empty");
      if (!(c.t_end > 0.0)) errs.push_back("evolution.t_end: must be > 0");
      break;
    case ExperimentKind::tss_slices:
      if (c.slice.vary != "A" && c.slice.vary != "B") errs.push_back("slice.vary: must be A or B");
      if (!(c.slice.fixed > 0.0) && c.slice.vary == "B") errs.push_back("slice.fixed: A must be > 0");
      check_axis(c.slice.axis, "slice.axis", errs);
      [[fallthrough]];
    case ExperimentKind::tss_tiles:
      if (c.state_kinds.empty()) errs.push_back("state_kinds: must not be empty");
      for (std::size_t i = 0; i < c.state_kinds.size(); ++i) {
        const auto& k = c.state_kinds[i];
        if (k != "coherent" && k != "fock" && k != "thermal") {
          errs.push_back("state_kinds[" + std::to_string(i) + "]: must be coherent, fock or thermal");
        }
      }
      if (c.energies.empty()) errs.push_back("energies: must not be empty");
      for (std::size_t i = 0; i < c.energies.size(); ++i) {
        const double e = c.energies[i];
        if (!(e >= 0.0)) errs.push_back("energies[" + std::to_string(i) + "]: must be >= 0");
        const bool has_fock = std::find(c.state_kinds.begin(), c.state_kinds.end(), "fock") !=
                              c.state_kinds.end();
        if (has_fock && e != std::round(e)) {
          errs.push_back("energies[" + std::to_string(i) + "]: Fock initial states need integer energies");
        }
      }
      break;
    default:
      break;
  }
  if (!errs.empty()) {
    std::string msg;
    for (const auto& e : errs) msg += (msg.empty() ? "" : "\n") + e;
    throw Error(ErrorCode::ConfigError, msg);
  }
}

std::vector<std::pair<double, double>> regime_points(const ExperimentConfig& c) {
  std::vector<std::pair<double, double>> pts;
  if (c.kind == ExperimentKind::tss_slices) {
    for (const double v : c.slice.axis.values()) {
      pts.emplace_back(c.slice.vary == "B" ? std::pair{c.slice.fixed, v} : std::pair{v, c.slice.fixed});
    }
    return pts;
  }
  for (const double a : c.grid_a.values()) {
    for (const double b : c.grid_b.values()) pts.emplace_back(a, b);
  }
  return pts;
}

std::string ValidationReport::text() const {
  std::string s = ok ? "OK\n" : "INVALID\n";
  for (const auto& e : errors) s += "error: " + e + "\n";
  for (const auto& w : warnings) s += "warning: " + w + "\n";
  if (!cost_summary.empty()) s += "cost: " + cost_summary + "\n";
  return s;
}

ValidationReport validate_config(const ExperimentConfig& c) {
  ValidationReport r;
  try {
    check_config(c);
  } catch (const Error& e) {
    r.ok = false;
    std::stringstream ss(e.what());
    for (std::string line; std::getline(ss, line);) r.errors.push_back(line);
    return r;
  }

  const int N = c.dims.empty() ? 0 : *std::max_element(c.dims.begin(), c.dims.end());
  auto preflight = [&](const SLParams& p, const std::string& where_) {
    if (!(p.gamma2 > 0.0)) return;
    try {
      const int hi = n_hi(p);
      for (const int dim : c.dims) {
        if (hi > dim) {
          r.warnings.push_back(where_ + ": n_hi = " + std::to_string(hi) + " exceeds N = " +
                               std::to_string(dim));
        }
      }
    } catch (const Error& e) {
      r.warnings.push_back(where_ + ": n_hi unavailable (" + e.what() + ")");
    }
  };

  std::size_t points = 0;
  if (is_regime_experiment(c.kind) || c.kind == ExperimentKind::tss_slices) {
    for (const auto& [A, B] : regime_points(c)) {
      if (B > A) continue;  // below the Hopf boundary the basis rate cannot fix g1 >= 0
      ++points;
      preflight(params_from_regime(A, B, c.basis_kappa1),
                "cell (A=" + io::format_double(A) + ", B=" + io::format_double(B) + ")");
    }
  }
  for (std::size_t i = 0; i < c.params.size(); ++i) {
    preflight(c.params[i], "params[" + std::to_string(i) + "]");
  }
  for (std::size_t i = 0; i < c.cases.size(); ++i) {
    preflight(c.cases[i].params, "cases[" + std::to_string(i) + "]");
  }

  // Rough single-core timings: dense eigensolve ~1.7e-9 s per (N^2)^3, one
  // evolution ~1e-6 s per N^2 per unit time with a few steps per unit.
  const double n2 = static_cast<double>(N) * N;
  double seconds = 0.0;
  std::string summary;
  switch (c.kind) {
    case ExperimentKind::gap_tiles: {
      double per = 0.0;
      for (const int d : c.dims) per += 1.7e-9 * std::pow(static_cast<double>(d) * d, 3);
      seconds = per * static_cast<double>(points);
      summary = std::to_string(points * c.dims.size()) + " eigendecompositions";
      break;
    }
    case ExperimentKind::tss_tiles:
    case ExperimentKind::tss_slices: {
      const double runs = static_cast<double>(points * c.state_kinds.size() * c.energies.size());
      seconds = runs * 2e-4 * n2 * std::max(1.0, 100.0 / c.basis_kappa1) * 1e-2;
      summary = std::to_string(static_cast<long long>(runs)) + " steady-state-time runs";
      break;
    }
    case ExperimentKind::steady_tiles:
      seconds = 1e-3 * static_cast<double>(points);
      summary = std::to_string(points) + " steady states";
      break;
    default:
      summary = "single experiment";
      break;
  }
  r.estimated_seconds = seconds;
  r.cost_summary = summary + ", estimated " + io::format_double(std::round(seconds)) + " s on one core";
  return r;
}

ValidationReport validate_config_text(const std::string& yaml_text) {
  try {
    return validate_config(parse_config(yaml_text));
  } catch (const Error& e) {
    ValidationReport r;
    r.ok = false;
    r.errors.push_back(std::string(to_string(e.code())) + ": " + e.what());
    return r;
  }
}

}  // namespace qsl
