#include "qsl/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>

#include <openssl/evp.h>

namespace qsl::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // folds -0
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), res.ptr};
}

std::string sha256_hex(const std::string& data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::IoError, "SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

Csv::Csv(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) text_ += ',';
    text_ += header[i];
  }
  text_ += '\n';
}

Csv& Csv::cell(const std::string& v) {
  if (in_row_ > 0) text_ += ',';
  const bool quote = v.find_first_of(",\"\n") != std::string::npos;
  if (quote) {
    text_ += '"';
    for (const char c : v) {
      if (c == '"') text_ += '"';
      text_ += c;
    }
    text_ += '"';
  } else {
    text_ += v;
  }
  ++in_row_;
  return *this;
}

Csv& Csv::cell(double v) { return cell(format_double(v)); }
Csv& Csv::cell(long long v) { return cell(std::to_string(v)); }

void Csv::end_row() {
  if (in_row_ != columns_) {
    throw Error(ErrorCode::InvalidArgument, "CSV row has " + std::to_string(in_row_) +
                                                " cells, header has " + std::to_string(columns_));
  }
  text_ += '\n';
  in_row_ = 0;
  ++rows_;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  f << content;
  if (!f) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

Csv trajectory_csv(const Trajectory& traj) {
  Csv csv({"t", "re_a", "im_a", "n", "n2", "d_tr"});
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    csv.cell(traj.times[k]).cell(traj.a[k].real()).cell(traj.a[k].imag());
    csv.cell(traj.n[k]).cell(traj.n2[k]);
    if (k < traj.distance.size()) {
      csv.cell(traj.distance[k]);
    } else {
      csv.cell(std::string());
    }
    csv.end_row();
  }
  return csv;
}

Csv matrix_csv(const CMatrix& m) {
  Csv csv({"m", "n", "re", "im"});
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      csv.cell(static_cast<long long>(i)).cell(static_cast<long long>(j));
      csv.cell(m(i, j).real()).cell(m(i, j).imag());
      csv.end_row();
    }
  }
  return csv;
}

Csv real_matrix_csv(const RMatrix& m) {
  Csv csv({"m", "n", "value"});
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      csv.cell(static_cast<long long>(i)).cell(static_cast<long long>(j)).cell(m(i, j));
      csv.end_row();
    }
  }
  return csv;
}

Csv wigner_csv(const WignerGrid& w) {
  Csv csv({"x", "p", "w"});
  const GridSpec& g = w.spec();
  for (int i = 0; i < g.x.points; ++i) {
    for (int j = 0; j < g.p.points; ++j) {
      csv.cell(g.x.at(i)).cell(g.p.at(j)).cell(w.values()(i, j));
      csv.end_row();
    }
  }
  return csv;
}

Csv marginals_csv(const WignerGrid& w) {
  Csv csv({"axis", "coordinate", "value"});
  const auto mx = w.marginal_x();
  const auto mp = w.marginal_p();
  for (std::size_t i = 0; i < mx.size(); ++i) {
    csv.cell(std::string("x")).cell(w.spec().x.at(static_cast<int>(i))).cell(mx[i]);
    csv.end_row();
  }
  for (std::size_t j = 0; j < mp.size(); ++j) {
    csv.cell(std::string("p")).cell(w.spec().p.at(static_cast<int>(j))).cell(mp[j]);
    csv.end_row();
  }
  return csv;
}

Csv spectrum_csv(const SpectrumResult& s) {
  Csv csv({"j", "re", "im"});
  for (std::size_t j = 0; j < s.eigenvalues.size(); ++j) {
    csv.cell(static_cast<long long>(j)).cell(s.eigenvalues[j].real()).cell(s.eigenvalues[j].imag());
    csv.end_row();
  }
  return csv;
}

Csv classical_csv(const std::vector<ClassicalState>& path) {
  Csv csv({"t", "re_alpha", "im_alpha", "r", "theta"});
  for (const auto& s : path) {
    csv.cell(s.t).cell(s.alpha.real()).cell(s.alpha.imag()).cell(s.radius).cell(s.theta);
    csv.end_row();
  }
  return csv;
}

nlohmann::json grid_json(const GridSpec& g) {
  return {{"x", {{"min", g.x.min}, {"max", g.x.max}, {"points", g.x.points}}},
          {"p", {{"min", g.p.min}, {"max", g.p.max}, {"points", g.p.points}}}};
}

nlohmann::json params_json(const SLParams& p) {
  return {{"kappa1", p.kappa1}, {"gamma1", p.gamma1}, {"gamma2", p.gamma2}};
}

nlohmann::json wigner_json(const WignerGrid& w) {
  return {{"grid", grid_json(w.spec())},
          {"integral", w.integral()},
          {"integral_error_estimate", w.integral_error_estimate()},
          {"max_abs", w.max_abs()}};
}

Manifest::Manifest(std::filesystem::path out_dir, std::string experiment, std::string config_hash)
    : out_dir_(std::move(out_dir)),
      experiment_(std::move(experiment)),
      config_hash_(std::move(config_hash)) {}

void Manifest::add_file(const std::string& relative, const std::string& content,
                        const std::string& kind, nlohmann::json meta) {
  write_file(out_dir_ / relative, content);
  nlohmann::json entry{{"path", relative}, {"kind", kind}, {"sha256", sha256_hex(content)}};
  if (!meta.empty()) entry["meta"] = std::move(meta);
  files_.push_back(std::move(entry));
}

void Manifest::add_csv(const std::string& relative, const Csv& csv, const std::string& kind,
                       nlohmann::json meta) {
  meta["rows"] = csv.rows();
  add_file(relative, csv.text(), kind, std::move(meta));
}

void Manifest::add_failure(const std::string& item, const std::string& code,
                           const std::string& message) {
  failures_.push_back({{"item", item}, {"code", code}, {"message", message}});
}

void Manifest::set(const std::string& key, nlohmann::json value) { extra_[key] = std::move(value); }

nlohmann::json Manifest::to_json() const {
  nlohmann::json j{{"schema_version", kSchemaVersion},
                   {"experiment", experiment_},
                   {"config_sha256", config_hash_},
                   {"files", files_},
                   {"failures", failures_}};
  for (const auto& [k, v] : extra_.items()) j[k] = v;
  return j;
}

std::filesystem::path Manifest::write() const {
  const auto path = out_dir_ / "manifest.json";
  write_file(path, to_json().dump(2) + "\n");
  return path;
}

void write_trajectory_states(const std::filesystem::path& dir, const Trajectory& traj,
                             const SLParams& params, double atol, double rtol) {
  Manifest m(dir, "trajectory", "");
  m.add_csv("trajectory.csv", trajectory_csv(traj), "trajectory");
  nlohmann::json states = nlohmann::json::array();
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const std::string name = "state_" + std::to_string(k) + ".csv";
    const double t = traj.times[traj.state_sample[k]];
    m.add_csv(name, matrix_csv(traj.states[k].matrix()), "density_matrix", {{"t", t}});
    states.push_back({{"file", name}, {"t", t}});
  }
  m.set("format_version", kSchemaVersion);
  m.set("dim", traj.states.empty() ? 0 : traj.states.front().dim().value());
  m.set("params", params_json(params));
  m.set("tolerances", {{"atol", atol}, {"rtol", rtol}});
  m.set("states", states);
  m.write();
}

}  // namespace qsl::io
