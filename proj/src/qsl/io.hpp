#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "qsl/dynamics.hpp"
#include "qsl/grid.hpp"
#include "qsl/spectrum.hpp"

namespace qsl::io {

inline constexpr int kSchemaVersion = 1;

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

std::string sha256_hex(const std::string& data);

/// Builds CSV text with fixed float formatting.
class Csv {
 public:
  explicit Csv(std::vector<std::string> header);

  Csv& cell(double v);
  Csv& cell(long long v);
  Csv& cell(int v) { return cell(static_cast<long long>(v)); }
  Csv& cell(bool v) { return cell(static_cast<long long>(v ? 1 : 0)); }
  Csv& cell(const std::string& v);
  void end_row();

  const std::string& text() const { return text_; }
  std::size_t rows() const { return rows_; }

 private:
  std::size_t columns_;
  std::size_t in_row_ = 0;
  std::size_t rows_ = 0;
  std::string text_;
};

/// Writes `content` atomically enough for our purposes (truncate + write).
void write_file(const std::filesystem::path& path, const std::string& content);

Csv trajectory_csv(const Trajectory& traj);
Csv matrix_csv(const CMatrix& m);         // m, n, re, im
Csv real_matrix_csv(const RMatrix& m);    // m, n, value
Csv wigner_csv(const WignerGrid& w);      // x, p, w
Csv marginals_csv(const WignerGrid& w);   // axis, coordinate, value
Csv spectrum_csv(const SpectrumResult& s);  // j, re, im
Csv classical_csv(const std::vector<ClassicalState>& path);

nlohmann::json grid_json(const GridSpec& g);
nlohmann::json params_json(const SLParams& p);
nlohmann::json wigner_json(const WignerGrid& w);

/// Lists emitted files relative to the output directory.
class Manifest {
 public:
  Manifest(std::filesystem::path out_dir, std::string experiment, std::string config_hash);

  /// Writes `content` to out_dir/relative and records it.
  void add_file(const std::string& relative, const std::string& content, const std::string& kind,
                nlohmann::json meta = nlohmann::json::object());
  void add_csv(const std::string& relative, const Csv& csv, const std::string& kind,
               nlohmann::json meta = nlohmann::json::object());
  void add_failure(const std::string& item, const std::string& code, const std::string& message);
  void set(const std::string& key, nlohmann::json value);

  std::size_t failures() const { return failures_.size(); }
  std::size_t files() const { return files_.size(); }
  const std::filesystem::path& out_dir() const { return out_dir_; }

  nlohmann::json to_json() const;
  /// Writes manifest.json and returns its path.
  std::filesystem::path write() const;

 private:
  std::filesystem::path out_dir_;
  std::string experiment_;
  std::string config_hash_;
  nlohmann::json extra_ = nlohmann::json::object();
  nlohmann::json files_ = nlohmann::json::array();
  nlohmann::json failures_ = nlohmann::json::array();
};

/// Trajectory CSV plus one matrix CSV per stored state and a JSON manifest.
void write_trajectory_states(const std::filesystem::path& dir, const Trajectory& traj,
                             const SLParams& params, double atol, double rtol);

}  // namespace qsl::io
