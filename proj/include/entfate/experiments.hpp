#pragma once

// Experiment drivers shared by the command-line tool and the acceptance
// tests. Each driver returns its tables in memory; writing them is left to
// the caller (see write_outputs).

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "entfate/fermionic.hpp"
#include "entfate/geometric.hpp"
#include "entfate/icosahedron.hpp"
#include "entfate/measures.hpp"
#include "entfate/optimize.hpp"
#include "entfate/output.hpp"
#include "entfate/spin_model.hpp"

namespace entfate {

inline constexpr const char* kArtifactVersion = "1.0.0";

struct LinearGrid {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;
  std::vector<double> values() const;  // lo + i step, hi included up to 1e-9 step
};

struct LogGrid {
  double lo = 1.0;
  double hi = 1.0;
  int points = 1;
  std::vector<double> values() const;  // endpoints exact
};

struct RunConfig {
  std::string subcommand;
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 0;

  double h = 3.0;
  LinearGrid h_grid{0.0, 6.0, 0.05};
  LogGrid t_grid{0.2, 40.0, 120};
  LinearGrid time_grid{0.0, 5.0, 0.02};
  std::string pattern = "101010101010";
  std::vector<int> pair;  // empty: first two vertices of `face`
  std::vector<int> face;  // empty: lexicographically first face

  OptimizerConfig geometric = default_geometric_config();
  OptimizerConfig w = default_w_config();
  bool compute_geometric = true;

  int modes = 3;
  int seeds = 100;

  // Throws DomainError naming the offending option.
  void validate() const;
  nlohmann::json to_json() const;
};

// Lazily built graph, spectrum cache keyed by h, and stage timings.
class RunContext {
 public:
  explicit RunContext(RunConfig config);

  const RunConfig& config() const { return config_; }
  const SiteGraph& graph() const { return graph_; }
  SubsystemSpec face() const;
  SubsystemSpec pair() const;

  // Diagonalizes on first request for a given h. Only the most recent
  // spectra are held; drivers never revisit an evicted h.
  std::shared_ptr<const SpectrumCache> spectrum(double h);
  int diagonalizations() const { return diagonalizations_; }

  void add_timing(const std::string& stage, double seconds);
  const std::vector<std::pair<std::string, double>>& timings() const { return timings_; }

  void record_selection(const std::string& name, const SubsystemSpec& sites);
  const std::map<std::string, std::vector<int>>& selections() const { return selections_; }

  nlohmann::json metadata(const nlohmann::json& derived = {}) const;

  // RAII stage timer.
  class Stage {
   public:
    Stage(RunContext& ctx, std::string name);
    ~Stage();
    Stage(const Stage&) = delete;
    Stage& operator=(const Stage&) = delete;

   private:
    RunContext& ctx_;
    std::string name_;
    std::chrono::steady_clock::time_point start_;
  };

 private:
  RunConfig config_;
  SiteGraph graph_;
  std::vector<std::pair<double, std::shared_ptr<const SpectrumCache>>> spectra_;
  int diagonalizations_ = 0;
  std::vector<std::pair<std::string, double>> timings_;
  std::map<std::string, std::vector<int>> selections_;
};

struct DetectorValues {
  double e_logneg = 0.0;
  std::optional<double> d_geom;
  double w_gme = 0.0;
};

// ℰ on `pair` (first site transposed), 𝒟 and W on the three-site `face_rdm`.
DetectorValues evaluate_detectors(const DensityMatrix& pair_rdm, const DensityMatrix& face_rdm,
                                  const RunConfig& config);

struct FieldSweepResult {
  io::Table table;
  ZeroCrossing h2_star;  // onset of ℰ
};
FieldSweepResult field_sweep(RunContext& ctx);

struct Thresholds {
  double t2 = 0.0;
  double t3 = 0.0;
  ZeroCrossing t_e;
  ZeroCrossing t_w;
  std::optional<double> t3_star;  // first grid T with 𝒟 <= kEffectivelySeparable
  nlohmann::json to_json() const;
};

struct TempSweepResult {
  io::Table table;
  Thresholds thresholds;
};
TempSweepResult temp_sweep(RunContext& ctx);

io::Table quench(RunContext& ctx);
io::Table separation(RunContext& ctx);
io::Table frh(RunContext& ctx);

struct FermiVerifyResult {
  nlohmann::json report;
  bool pass = false;
};
FermiVerifyResult fermi_verify(const RunConfig& config);

// Writes <stem>.csv plus metadata.json into config.out_dir.
void write_outputs(const RunContext& ctx, const std::string& stem, const io::Table& table,
                   const nlohmann::json& derived = {});

}  // namespace entfate
