// Command-line front end over the C API.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "qsl/qsl.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumeric = 2;

struct Options {
  std::string config;
  std::string out;
  int workers = 0;
  int dim = 0;  // 0: config dims for run, 30 elsewhere
  bool seedless = false;
  qsl_params params{0.0, 0.0, 0.0};
  std::string state = "coherent";
  int n = 0;
  double mean = 0.0;
  double beta_re = 0.0;
  double beta_im = 0.0;
  double phi = 0.0;
  double t_end = 10.0;
  double sample_every = 0.0;
  double half_width = 0.0;
  int points = 201;
  std::string format = "text";
};

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using StatePtr = std::unique_ptr<qsl_state, Deleter<qsl_state, qsl_state_free>>;

// Maps a failed call to an exit code and prints the library message.
int report(qsl_status st) {
  std::cerr << "error: " << qsl_status_name(st) << ": " << qsl_last_error() << "\n";
  switch (st) {
    case QSL_E_CONFIG:
    case QSL_E_PARSE:
    case QSL_E_INVALID_ARGUMENT:
    case QSL_E_INVALID_SPEC:
    case QSL_E_NULL_ARGUMENT:
    case QSL_E_IO:
      return kExitConfig;
    default:
      return kExitNumeric;
  }
}

void add_params(CLI::App* cmd, Options& o) {
  cmd->add_option("--kappa1", o.params.kappa1, "one-quantum pump rate")->required();
  cmd->add_option("--gamma1", o.params.gamma1, "one-quantum loss rate")->required();
  cmd->add_option("--gamma2", o.params.gamma2, "two-quantum loss rate")->required();
  cmd->add_option("--dim", o.dim, "Fock levels")->check(CLI::PositiveNumber);
}

void add_state(CLI::App* cmd, Options& o, bool allow_steady) {
  std::vector<std::string> kinds{"fock", "thermal", "coherent", "cat"};
  if (allow_steady) kinds.push_back("steady");
  cmd->add_option("--state", o.state, "initial state kind")->check(CLI::IsMember(kinds));
  cmd->add_option("--n", o.n, "Fock level");
  cmd->add_option("--mean", o.mean, "thermal occupation");
  cmd->add_option("--beta-re", o.beta_re, "Re beta");
  cmd->add_option("--beta-im", o.beta_im, "Im beta");
  cmd->add_option("--phi", o.phi, "cat relative phase");
}

qsl_status build_state(const Options& o, StatePtr& out) {
  qsl_state* s = nullptr;
  qsl_status st = QSL_OK;
  if (o.state == "fock") st = qsl_state_fock(o.n, o.dim, &s);
  if (o.state == "thermal") st = qsl_state_thermal(o.mean, o.dim, &s);
  if (o.state == "coherent") st = qsl_state_coherent(o.beta_re, o.beta_im, o.dim, &s);
  if (o.state == "cat") st = qsl_state_cat(o.beta_re, o.beta_im, o.phi, o.dim, &s);
  if (o.state == "steady") {
    qsl_steady* ss = nullptr;
    st = qsl_steady_state(o.params, o.dim, &ss);
    if (st == QSL_OK) {
      st = qsl_steady_rho(ss, &s);
      qsl_steady_free(ss);
    }
  }
  out.reset(s);
  return st;
}

std::filesystem::path out_file(const Options& o, const std::string& name) {
  const std::filesystem::path dir = o.out.empty() ? "." : o.out;
  std::filesystem::create_directories(dir);
  return dir / name;
}

int cmd_run(const Options& o) {
  qsl_run_status rs = QSL_RUN_OK;
  char* manifest = nullptr;
  const qsl_status st = qsl_run_experiment(o.config.c_str(), o.out.empty() ? nullptr : o.out.c_str(),
                                           o.workers, o.dim, &rs, &manifest);
  if (st != QSL_OK) {
    report(st);
    return rs;
  }
  std::cout << manifest << "\n";
  qsl_string_free(manifest);
  if (rs == QSL_RUN_PARTIAL) std::cerr << "partial run: failures are listed in the manifest\n";
  return rs;
}

int cmd_validate(const Options& o) {
  int ok = 0;
  char* text = nullptr;
  const qsl_status st = qsl_validate_config(o.config.c_str(), &ok, &text);
  if (st != QSL_OK) return report(st);
  std::cout << text;
  qsl_string_free(text);
  return ok ? kExitOk : kExitConfig;
}

int cmd_derive(const Options& o) {
  const qsl_text_format fmt = o.format == "json" ? QSL_JSON : o.format == "latex" ? QSL_LATEX : QSL_TEXT;
  char* text = nullptr;
  const qsl_status st = qsl_derive_eom(fmt, &text);
  if (st != QSL_OK) return report(st);
  if (o.out.empty()) {
    std::cout << text << "\n";
  } else {
    const char* ext = fmt == QSL_JSON ? "json" : fmt == QSL_LATEX ? "tex" : "txt";
    std::ofstream(out_file(o, std::string("eom.") + ext)) << text << "\n";
  }
  qsl_string_free(text);
  return kExitOk;
}

int cmd_steady(const Options& o) {
  qsl_steady* ss = nullptr;
  qsl_status st = qsl_steady_state(o.params, o.dim, &ss);
  if (st != QSL_OK) return report(st);
  double energy = 0.0, A = 0.0, B = 0.0, C = 0.0;
  int hi = 0;
  qsl_steady_energy(ss, &energy);
  qsl_steady_n_hi(ss, &hi);
  qsl_regime(o.params, &A, &B, &C);
  std::printf("energy %.10g\nn_hi %d\nA %.10g\nB %.10g\nC %.10g\n", energy, hi, A, B, C);
  if (!o.out.empty()) {
    qsl_state* rho = nullptr;
    st = qsl_steady_rho(ss, &rho);
    if (st == QSL_OK) {
      std::ofstream f(out_file(o, "populations.csv"));
      f << "n,p\n";
      char buf[64];
      for (int k = 0; k < o.dim; ++k) {
        double p = 0.0;
        qsl_state_element(rho, k, k, &p, nullptr);
        std::snprintf(buf, sizeof buf, "%d,%.17g\n", k, p);
        f << buf;
      }
      qsl_state_free(rho);
    }
  }
  qsl_steady_free(ss);
  return st == QSL_OK ? kExitOk : report(st);
}

int cmd_spectrum(const Options& o, bool with_state) {
  StatePtr rho0;
  if (with_state) {
    if (const qsl_status st = build_state(o, rho0); st != QSL_OK) return report(st);
  }
  qsl_spectrum* s = nullptr;
  qsl_status st = qsl_spectrum_compute(o.params, o.dim, rho0.get(), 0, &s);
  if (st != QSL_OK) return report(st);
  double gap = 0.0;
  int hi = 0, valid = 0;
  qsl_spectrum_gap(s, &gap, &hi, &valid);
  std::printf("gap %.10g\nn_hi %d\nvalid %d\n", gap, hi, valid);
  for (size_t j = 0; j < std::min<size_t>(5, qsl_spectrum_size(s)); ++j) {
    double re = 0.0, im = 0.0;
    qsl_spectrum_eigenvalue(s, j, &re, &im);
    std::printf("lambda_%zu %.10g %+.10gi\n", j, re, im);
  }
  if (!o.out.empty()) st = qsl_spectrum_write_csv(s, out_file(o, "spectrum.csv").c_str());
  qsl_spectrum_free(s);
  return st == QSL_OK ? kExitOk : report(st);
}

int cmd_evolve(const Options& o) {
  StatePtr rho0;
  if (const qsl_status st = build_state(o, rho0); st != QSL_OK) return report(st);
  qsl_trajectory* tr = nullptr;
  qsl_status st = qsl_evolve(o.params, rho0.get(), o.t_end, o.sample_every, 0.0, 0.0, &tr);
  if (st != QSL_OK) return report(st);
  const auto path = out_file(o, "trajectory.csv");
  st = qsl_trajectory_write_csv(tr, path.c_str());
  if (st == QSL_OK) std::cout << path.string() << "\n";
  qsl_trajectory_free(tr);
  return st == QSL_OK ? kExitOk : report(st);
}

int cmd_wigner(const Options& o, bool negvol_only) {
  StatePtr rho;
  if (const qsl_status st = build_state(o, rho); st != QSL_OK) return report(st);
  qsl_wigner* w = nullptr;
  qsl_status st = qsl_wigner_compute(rho.get(), o.half_width, o.points, &w);
  if (st != QSL_OK) return report(st);
  double integral = 0.0, v = 0.0, err = 0.0;
  qsl_wigner_integral(w, &integral);
  st = qsl_wigner_negative_volume(w, &v, &err);
  if (st == QSL_OK) {
    std::printf("integral %.10g\nnegative_volume %.10g\nerror_estimate %.3g\n", integral, v, err);
    if (!negvol_only && !o.out.empty()) st = qsl_wigner_write_csv(w, out_file(o, "wigner.csv").c_str());
  }
  qsl_wigner_free(w);
  return st == QSL_OK ? kExitOk : report(st);
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* level = std::getenv("QSL_LOG")) {
    if (qsl_set_log_level(level) != QSL_OK) std::cerr << "warning: unknown QSL_LOG level '" << level << "'\n";
  }

  CLI::App app{"Quantum Stuart-Landau oscillator laboratory"};
  app.require_subcommand(1);
  Options o;
  app.add_flag("--seedless", o.seedless, "accepted for scripts; every computation is deterministic");

  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("--config", o.config, "YAML config")->required()->check(CLI::ExistingFile);
  run->add_option("--out", o.out, "output directory (overrides the config)");
  run->add_option("--workers", o.workers, "worker threads (overrides the config)")->check(CLI::PositiveNumber);
  run->add_option("--dim", o.dim, "single Fock dimension (overrides the config)")->check(CLI::PositiveNumber);
  run->add_flag("--seedless", o.seedless);

  auto* validate = app.add_subcommand("validate", "check a config and estimate its cost");
  validate->add_option("--config", o.config, "YAML config")->required()->check(CLI::ExistingFile);

  auto* derive = app.add_subcommand("derive-eom", "derive the phase-space equation of motion");
  derive->add_option("--format", o.format)->check(CLI::IsMember({"text", "json", "latex"}));
  derive->add_option("--out", o.out, "directory for eom.{txt,json,tex}");

  auto* steady = app.add_subcommand("steady-state", "numeric steady state");
  add_params(steady, o);
  steady->add_option("--out", o.out, "directory for populations.csv");

  auto* spec = app.add_subcommand("spectrum", "Liouvillian spectrum");
  add_params(spec, o);
  add_state(spec, o, false);
  spec->add_option("--out", o.out, "directory for spectrum.csv");

  auto* evo = app.add_subcommand("evolve", "integrate the master equation");
  add_params(evo, o);
  add_state(evo, o, false);
  evo->add_option("--t-end", o.t_end)->check(CLI::NonNegativeNumber);
  evo->add_option("--sample-every", o.sample_every);
  evo->add_option("--out", o.out, "directory for trajectory.csv");

  auto* wig = app.add_subcommand("wigner", "Wigner function of a state");
  auto* neg = app.add_subcommand("negvol", "negative volume of a state");
  for (auto* cmd : {wig, neg}) {
    cmd->add_option("--kappa1", o.params.kappa1);
    cmd->add_option("--gamma1", o.params.gamma1);
    cmd->add_option("--gamma2", o.params.gamma2);
    cmd->add_option("--dim", o.dim)->check(CLI::PositiveNumber);
    add_state(cmd, o, true);
    cmd->add_option("--points", o.points)->check(CLI::Range(11, 4001));
    cmd->add_option("--half-width", o.half_width);
  }
  wig->add_option("--out", o.out, "directory for wigner.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (*run) return cmd_run(o);
  if (o.dim == 0) o.dim = 30;
  if (*validate) return cmd_validate(o);
  if (*derive) return cmd_derive(o);
  if (*steady) return cmd_steady(o);
  if (*spec) return cmd_spectrum(o, spec->count("--state") > 0);
  if (*evo) return cmd_evolve(o);
  if (*wig) return cmd_wigner(o, false);
  if (*neg) return cmd_wigner(o, true);
  return kExitConfig;
}
