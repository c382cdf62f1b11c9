#include "qsl/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

#include <spdlog/spdlog.h>

#include "qsl/io.hpp"
#include "qsl/moyal.hpp"
#include "qsl/pool.hpp"
#include "qsl/spectrum.hpp"
#include "qsl/steadystate.hpp"
#include "qsl/wigner.hpp"

namespace qsl {

namespace {

using io::Csv;
using io::format_double;
using io::Manifest;
using nlohmann::json;

template <class T>
struct Outcome {
  std::optional<T> value;
  std::string code;
  std::string message;
};

// Evaluates fn(i) for every index on the worker pool. Exceptions become
// per-index failures; results keep index order.
template <class T, class F>
std::vector<Outcome<T>> run_items(std::size_t count, int workers, F&& fn) {
  std::vector<Outcome<T>> out(count);
  parallel_for(count, workers, [&](std::size_t i) {
    try {
      out[i].value = fn(i);
    } catch (const Error& e) {
      out[i].code = to_string(e.code());
      out[i].message = e.what();
    } catch (const std::exception& e) {
      out[i].code = "InternalError";
      out[i].message = e.what();
    }
  });
  return out;
}

std::string point_label(double A, double B) {
  return "A=" + format_double(A) + ",B=" + format_double(B);
}

int primary_dim(const ExperimentConfig& c) { return c.dims.front(); }

EvolveOptions evolve_options(const ExperimentConfig& c) {
  EvolveOptions o;
  o.atol = c.atol;
  o.rtol = c.rtol;
  return o;
}

// State after each requested time, evolved segment by segment.
std::vector<DensityMatrix> snapshots(const SLParams& params, const DensityMatrix& rho0,
                                     std::vector<double> times, const ExperimentConfig& c) {
  std::sort(times.begin(), times.end());
  EvolveOptions o = evolve_options(c);
  o.keep_every = 1;
  std::vector<DensityMatrix> out;
  DensityMatrix rho = rho0;
  double t = 0.0;
  for (const double target : times) {
    if (target > t) {
      Trajectory tr = evolve(params, rho, target - t, o);
      rho = tr.states.back();
      t = target;
    }
    out.push_back(rho);
  }
  return out;
}

// One grid for a family of states: widened until every state clears the
// boundary check, or fixed when the config gives a half-width.
std::vector<WignerGrid> wigner_family(const std::vector<DensityMatrix>& states, double n_eff,
                                      const ExperimentConfig& c) {
  GridSpec grid = c.wigner_half_width > 0.0 ? GridSpec::square(c.wigner_half_width, c.wigner_points)
                                            : default_grid(n_eff, c.wigner_points);
  for (int attempt = 0;; ++attempt) {
    try {
      std::vector<WignerGrid> out;
      for (const auto& s : states) out.push_back(wigner_of_rho(s, grid));
      return out;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::GridTooSmall || c.wigner_half_width > 0.0 || attempt >= 12) throw;
    }
    grid = GridSpec::square(1.25 * grid.x.max, c.wigner_points);
  }
}

double max_energy(const std::vector<DensityMatrix>& states) {
  double n = 0.0;
  for (const auto& s : states) n = std::max(n, moments(s.matrix()).n);
  return n;
}

void record_failures(Manifest& m, const std::vector<std::string>& labels,
                     const auto& outcomes) {
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (!outcomes[i].value) m.add_failure(labels[i], outcomes[i].code, outcomes[i].message);
  }
}

void steady_tiles(const ExperimentConfig& c, Manifest& m) {
  struct Cell {
    bool defined = false;
    double value = 0.0, energy = 0.0;
    int n_hi = 0;
  };
  const auto pts = regime_points(c);
  std::vector<std::string> labels;
  for (const auto& [A, B] : pts) labels.push_back(point_label(A, B));
  for (const int N : c.dims) {
    auto cells = run_items<Cell>(pts.size(), c.workers, [&](std::size_t i) {
      const auto [A, B] = pts[i];
      Cell cell;
      if (B > A) return cell;
      const SLParams p = params_from_regime(A, B, c.basis_kappa1);
      cell.defined = true;
      cell.n_hi = n_hi(p);
      const auto pops = steady_populations(p, HilbertDim(N));
      for (std::size_t n = 0; n < pops.size(); ++n) cell.energy += static_cast<double>(n) * pops[n];
      cell.value = cell.energy / (B / 2.0);
      return cell;
    });
    Csv csv({"A", "B", "C", "value", "valid_flag", "n_hi", "energy"});
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto [A, B] = pts[i];
      csv.cell(A).cell(B).cell(A / B);
      const auto& o = cells[i];
      if (o.value && o.value->defined) {
        csv.cell(o.value->value).cell(o.value->n_hi < N).cell(o.value->n_hi).cell(o.value->energy);
      } else {
        csv.cell(std::string()).cell(false).cell(std::string()).cell(std::string());
      }
      csv.end_row();
    }
    record_failures(m, labels, cells);
    m.add_csv("steady_tiles_N" + std::to_string(N) + ".csv", csv, "steady_tiles",
              {{"dim", N}, {"basis_kappa1", c.basis_kappa1},
               {"threshold", kOccupationThreshold}, {"value", "energy / (B/2)"}});
  }
}

void wigner_cuts(const ExperimentConfig& c, Manifest& m) {
  const int N = primary_dim(c);
  struct Cut {
    WignerGrid numeric;
    std::optional<WignerGrid> guess;
    double energy;
    std::optional<double> radius;
  };
  auto cuts = run_items<Cut>(c.params.size(), c.workers, [&](std::size_t i) {
    const SteadyState ss = steady_state_numeric(c.params[i], HilbertDim(N));
    const auto w = wigner_family({ss.rho}, ss.energy, c).front();
    std::optional<WignerGrid> guess;
    if (!regime(c.params[i]).below_bifurcation) guess = wigner_guess(c.params[i], w.spec());
    return Cut{w, guess, ss.energy, ss.radius};
  });
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < c.params.size(); ++i) labels.push_back("params[" + std::to_string(i) + "]");
  record_failures(m, labels, cuts);
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    if (!cuts[i].value) continue;
    const Cut& cut = *cuts[i].value;
    const GridSpec& g = cut.numeric.spec();
    const int j0 = g.p.points / 2;
    Csv csv({"x", "numeric", "guess"});
    for (int k = 0; k < g.x.points; ++k) {
      csv.cell(g.x.at(k)).cell(cut.numeric.values()(k, j0));
      if (cut.guess) {
        csv.cell(cut.guess->values()(k, j0));
      } else {
        csv.cell(std::string());
      }
      csv.end_row();
    }
    json meta{{"params", io::params_json(c.params[i])}, {"dim", N}, {"energy", cut.energy},
              {"p", g.p.at(j0)}};
    if (cut.radius) meta["limit_cycle_radius"] = *cut.radius;
    const std::string stem = "wigner_" + std::to_string(i);
    m.add_csv(stem + "_cut.csv", csv, "wigner_cut", meta);
    m.add_csv(stem + ".csv", io::wigner_csv(cut.numeric), "wigner",
              {{"params", io::params_json(c.params[i])}, {"wigner", io::wigner_json(cut.numeric)}});
  }
}

std::string case_label(const CaseConfig& cc, std::size_t i) {
  return cc.label.empty() ? "case_" + std::to_string(i) : cc.label;
}

void evolution_snapshots(const ExperimentConfig& c, Manifest& m) {
  const int N = primary_dim(c);
  struct Result {
    std::vector<DensityMatrix> states;
    std::vector<WignerGrid> wigner;
    Trajectory trajectory;
    std::vector<ClassicalState> classical;
  };
  auto results = run_items<Result>(c.cases.size(), c.workers, [&](std::size_t i) {
    const CaseConfig& cc = c.cases[i];
    const DensityMatrix rho0 = make_state(cc.state.spec(), HilbertDim(N));
    Result r;
    r.states = snapshots(cc.params, rho0, cc.times, c);
    double n_eff = max_energy(r.states);
    if (cc.params.gamma2 > 0.0) n_eff = std::max(n_eff, std::pow(classical_limit_cycle_radius(cc.params), 2) / 2);
    r.wigner = wigner_family(r.states, n_eff, c);
    const double t_max = *std::max_element(cc.times.begin(), cc.times.end());
    EvolveOptions o = evolve_options(c);
    o.keep_every = 0;
    o.sample_every = c.sample_every > 0.0 ? c.sample_every : t_max / 200.0;
    r.trajectory = evolve(cc.params, rho0, t_max, o);
    Complex alpha0 = r.trajectory.a.front();
    if (std::abs(alpha0) < 1e-12) alpha0 = std::sqrt(r.trajectory.n.front());
    r.classical = classical_trajectory(cc.params, alpha0, t_max, {1e-10, t_max / 400.0});
    return r;
  });
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < c.cases.size(); ++i) labels.push_back(case_label(c.cases[i], i));
  record_failures(m, labels, results);
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i].value) continue;
    const Result& r = *results[i].value;
    const CaseConfig& cc = c.cases[i];
    const std::string stem = labels[i];
    auto times = cc.times;
    std::sort(times.begin(), times.end());
    json meta{{"case", stem}, {"params", io::params_json(cc.params)}, {"dim", N},
              {"state", cc.state.label()}};
    if (cc.params.gamma2 > 0.0) meta["limit_cycle_radius"] = classical_limit_cycle_radius(cc.params);
    for (std::size_t k = 0; k < r.states.size(); ++k) {
      json snap = meta;
      snap["t"] = times[k];
      snap["index"] = k;
      snap["wigner"] = io::wigner_json(r.wigner[k]);
      snap["normalize_by_max"] = r.wigner[k].max_abs();
      const std::string idx = std::to_string(k);
      m.add_csv(stem + "_w" + idx + ".csv", io::wigner_csv(r.wigner[k]), "wigner_snapshot", snap);
      m.add_csv(stem + "_marginals" + idx + ".csv", io::marginals_csv(r.wigner[k]), "marginals", snap);
    }
    m.add_csv(stem + "_trajectory.csv", io::trajectory_csv(r.trajectory), "trajectory", meta);
    m.add_csv(stem + "_classical.csv", io::classical_csv(r.classical), "classical_path", meta);
  }
}

void coherence_tiles(const ExperimentConfig& c, Manifest& m) {
  const int N = primary_dim(c);
  struct Result {
    std::vector<RMatrix> deviation;
  };
  auto results = run_items<Result>(c.cases.size(), c.workers, [&](std::size_t i) {
    const CaseConfig& cc = c.cases[i];
    const SteadyState ss = steady_state_numeric(cc.params, HilbertDim(N));
    const DensityMatrix rho0 = make_state(cc.state.spec(), HilbertDim(N));
    Result r;
    for (const auto& s : snapshots(cc.params, rho0, cc.times, c)) {
      r.deviation.push_back(coherence_deviation(s, ss.rho));
    }
    return r;
  });
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < c.cases.size(); ++i) labels.push_back(case_label(c.cases[i], i));
  record_failures(m, labels, results);
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i].value) continue;
    const CaseConfig& cc = c.cases[i];
    auto times = cc.times;
    std::sort(times.begin(), times.end());
    json meta{{"case", labels[i]}, {"params", io::params_json(cc.params)}, {"dim", N},
              {"state", cc.state.label()}};
    Csv bands({"t", "k", "max"});
    for (std::size_t k = 0; k < times.size(); ++k) {
      const RMatrix& d = results[i].value->deviation[k];
      json snap = meta;
      snap["t"] = times[k];
      m.add_csv(labels[i] + "_delta" + std::to_string(k) + ".csv", io::real_matrix_csv(d),
                "coherence_deviation", snap);
      const auto maxima = band_maxima(d);
      for (std::size_t b = 0; b < maxima.size(); ++b) {
        bands.cell(times[k]).cell(static_cast<long long>(b + 1)).cell(maxima[b]);
        bands.end_row();
      }
    }
    m.add_csv(labels[i] + "_bands.csv", bands, "band_maxima", meta);
  }
}

void negativity_traces(const ExperimentConfig& c, Manifest& m) {
  const int N = primary_dim(c);
  const SLParams params = c.params.front();
  struct Row {
    double t, volume, error;
  };
  auto results = run_items<std::vector<Row>>(c.states.size(), c.workers, [&](std::size_t i) {
    const DensityMatrix rho0 = make_state(c.states[i].spec(), HilbertDim(N));
    EvolveOptions o = evolve_options(c);
    o.sample_every = c.sample_every > 0.0 ? c.sample_every : c.t_end / 50.0;
    o.keep_every = 1;
    const Trajectory tr = evolve(params, rho0, c.t_end, o);
    const auto grids = wigner_family(tr.states, max_energy(tr.states), c);
    std::vector<Row> rows;
    for (std::size_t k = 0; k < grids.size(); ++k) {
      const NegativityReport rep = negative_volume(grids[k]);
      rows.push_back({tr.times[tr.state_sample[k]], rep.volume, rep.error_estimate});
    }
    return rows;
  });
  std::vector<std::string> labels;
  for (const auto& s : c.states) labels.push_back(s.label());
  record_failures(m, labels, results);
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i].value) continue;
    Csv csv({"t", "V", "err"});
    for (const Row& r : *results[i].value) {
      csv.cell(r.t).cell(r.volume).cell(r.error);
      csv.end_row();
    }
    m.add_csv("negativity_" + labels[i] + ".csv", csv, "negativity_trace",
              {{"params", io::params_json(params)}, {"dim", N}, {"state", labels[i]}});
  }
}

void gap_tiles(const ExperimentConfig& c, Manifest& m) {
  const auto pts = regime_points(c);
  std::vector<std::pair<double, double>> eligible;
  for (const auto& pt : pts) {
    if (pt.second <= pt.first) eligible.push_back(pt);
  }
  SpectrumOptions so;
  so.allow_large = true;
  const auto gaps = gap_sweep(eligible, c.dims, c.basis_kappa1, c.workers, so);
  Csv csv({"A", "B", "C", "gap", "n_hi", "valid", "N"});
  std::size_t next = 0;
  for (const auto& [A, B] : pts) {
    if (B > A) {
      for (const int N : c.dims) {
        csv.cell(A).cell(B).cell(A / B).cell(std::string()).cell(std::string()).cell(false).cell(N);
        csv.end_row();
      }
      continue;
    }
    for (std::size_t d = 0; d < c.dims.size(); ++d, ++next) {
      const GapPoint& g = gaps[next];
      csv.cell(A).cell(B).cell(A / B);
      if (g.error.empty()) {
        csv.cell(g.gap).cell(g.n_hi).cell(g.valid);
      } else {
        csv.cell(std::string()).cell(std::string()).cell(false);
        m.add_failure(point_label(A, B) + ",N=" + std::to_string(g.dim), "NumericalFailure", g.error);
      }
      csv.cell(g.dim);
      csv.end_row();
    }
  }
  m.add_csv("gap_tiles.csv", csv, "gap_tiles",
            {{"basis_kappa1", c.basis_kappa1}, {"dims", c.dims}, {"threshold", kOccupationThreshold}});
}

// Initial states are built at a dimension whose truncation leak stays below a
// tenth of both the distance threshold and the top-level guard.
constexpr int kMaxJobDim = 400;

void tss(const ExperimentConfig& c, Manifest& m) {
  const int N = primary_dim(c);
  const auto pts = regime_points(c);
  struct Job {
    std::size_t point, kind, energy;
  };
  std::vector<Job> jobs;
  for (std::size_t k = 0; k < c.state_kinds.size(); ++k) {
    for (std::size_t e = 0; e < c.energies.size(); ++e) {
      for (std::size_t p = 0; p < pts.size(); ++p) jobs.push_back({p, k, e});
    }
  }
  struct Cell {
    bool defined = false;
    bool converged = false;
    double time = 0.0;
    int dim = 0;
  };
  auto cells = run_items<Cell>(jobs.size(), c.workers, [&](std::size_t i) {
    const Job& j = jobs[i];
    const auto [A, B] = pts[j.point];
    Cell cell;
    if (B > A) return cell;
    cell.defined = true;
    const SLParams p = params_from_regime(A, B, c.basis_kappa1);
    const StateSpec spec = state_with_energy(c.state_kinds[j.kind], c.energies[j.energy]).spec();
    const double leak_tolerance = 0.1 * std::min(c.epsilon, SteadyStateTimeOptions{}.top_level_tolerance);
    int dim = N;
    while (truncation_leak(spec, dim) > leak_tolerance && dim < kMaxJobDim) dim += 5;
    cell.dim = dim;
    const SteadyState ss = steady_state_numeric(p, HilbertDim(dim));
    const DensityMatrix rho0 = make_state(spec, HilbertDim(dim), leak_tolerance);
    SteadyStateTimeOptions o;
    o.epsilon = c.epsilon;
    o.t_cap = c.t_cap;
    o.atol = c.atol;
    o.rtol = c.rtol;
    try {
      cell.time = steady_state_time(p, rho0, ss.rho, o).time;
      cell.converged = true;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotReached) throw;
    }
    return cell;
  });
  const std::string kind = to_string(c.kind);
  for (std::size_t k = 0; k < c.state_kinds.size(); ++k) {
    for (std::size_t e = 0; e < c.energies.size(); ++e) {
      Csv csv({"A", "B", "T_ss", "converged_flag"});
      int dim_used = N;
      for (std::size_t i = 0; i < jobs.size(); ++i) {
        const Job& j = jobs[i];
        if (j.kind != k || j.energy != e) continue;
        const auto [A, B] = pts[j.point];
        csv.cell(A).cell(B);
        const auto& o = cells[i];
        if (o.value) dim_used = std::max(dim_used, o.value->dim);
        if (o.value && o.value->converged) {
          csv.cell(o.value->time).cell(true);
        } else {
          csv.cell(std::string()).cell(false);
          if (!o.value) {
            m.add_failure(c.state_kinds[k] + ",E=" + format_double(c.energies[e]) + "," +
                              point_label(A, B),
                          o.code, o.message);
          }
        }
        csv.end_row();
      }
      m.add_csv(kind + "_" + c.state_kinds[k] + "_E" + format_double(c.energies[e]) + ".csv", csv,
                kind,
                {{"state_kind", c.state_kinds[k]}, {"energy", c.energies[e]}, {"dim", N}, {"max_dim_used", dim_used},
                 {"basis_kappa1", c.basis_kappa1}, {"epsilon", c.epsilon}, {"t_cap", c.t_cap}});
    }
  }
}

void derive_eom(const ExperimentConfig& c, Manifest& m) {
  const moyal::PhaseDiffOp& op = moyal::qsl_operator();
  m.add_file("eom.txt", op.str() + "\n", "eom_text");
  m.add_file("eom.json", op.json() + "\n", "eom_json");
  if (c.latex) m.add_file("eom.tex", op.latex() + "\n", "eom_latex");
}

}  // namespace

std::string config_hash(const ExperimentConfig& config) { return io::sha256_hex(to_yaml(config)); }

RunResult run_experiment(const ExperimentConfig& config) {
  check_config(config);
  const std::string yaml = to_yaml(config);
  Manifest m(config.output_dir, to_string(config.kind), io::sha256_hex(yaml));
  m.add_file("config.yaml", yaml, "config");
  spdlog::info("running {} into {}", to_string(config.kind), config.output_dir);

  switch (config.kind) {
    case ExperimentKind::steady_tiles: steady_tiles(config, m); break;
    case ExperimentKind::wigner_cuts: wigner_cuts(config, m); break;
    case ExperimentKind::evolution_snapshots: evolution_snapshots(config, m); break;
    case ExperimentKind::coherence_tiles: coherence_tiles(config, m); break;
    case ExperimentKind::negativity_traces: negativity_traces(config, m); break;
    case ExperimentKind::gap_tiles: gap_tiles(config, m); break;
    case ExperimentKind::tss_tiles:
    case ExperimentKind::tss_slices: tss(config, m); break;
    case ExperimentKind::derive_eom: derive_eom(config, m); break;
  }

  RunResult r;
  r.manifest = m.write();
  r.files = m.files();
  r.failures = m.failures();
  if (r.failures > 0) {
    // Only config.yaml written means nothing computed survived.
    r.status = r.files > 1 ? RunStatus::partial : RunStatus::numerical_failure;
    spdlog::warn("{} item(s) failed; see {}", r.failures, r.manifest.string());
  }
  return r;
}

}  // namespace qsl
