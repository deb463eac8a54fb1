#pragma once

// Stage orchestration. Every artifact starts with a comment line carrying
// the configuration hash; a stage whose artifacts already carry the current
// hash is loaded instead of recomputed.
//
// Artifacts in the output directory:
//   pair_table.csv      k,re_s,im_s,re_r,im_r,unitarity_defect
//   field_grid.csv      analytic fields and Q on a Cartesian grid
//   mesh.txt            quadratic mesh (see Mesh::write)
//   solution.csv        xi at mesh nodes
//   solution_grid.csv   xi on the Cartesian grid
//   radial.csv          N(r), M(r)
//   profile.csv         |xi| and g on the probe circle, window angles in comments
//   summary.txt         configuration, mesh statistics, residuals, timings, checks

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tbscat/config.hpp"
#include "tbscat/diagnostics.hpp"

namespace tbscat {

enum class Stage { kPair, kField, kMesh, kSolve, kDiagnose, kAll };

Stage parse_stage(const std::string& name);
const char* stage_name(Stage stage);

struct StageRecord {
  std::string name;
  double seconds = 0.0;
  bool cached = false;
};

struct RunResults {
  std::optional<MeshStats> mesh;
  std::optional<SolveReport> solve;
  double xi_l2 = 0.0;
  double psi1_l2 = 0.0;
  std::optional<RadialAudit> audit;
  std::optional<PeakCheck> peaks;
  std::optional<double> symmetry_defect;
};

class Pipeline {
 public:
  Pipeline(RunConfig config, std::filesystem::path out_dir);

  // Runs the stage and everything it depends on. Errors are rethrown with the
  // stage name prefixed, keeping their category (config vs numerical).
  void run(Stage stage);

  const RunConfig& config() const { return config_; }
  const std::string& hash() const { return hash_; }
  const std::filesystem::path& out_dir() const { return out_; }
  const RunResults& results() const { return results_; }
  const std::vector<StageRecord>& records() const { return records_; }

  const FieldModel& model();
  std::shared_ptr<const Mesh> mesh();
  const FemField& solution();

  // Human-readable fan, window and pair summary.
  std::string describe();

 private:
  void stage_pair();
  void stage_field();
  void stage_mesh();
  void stage_solve();
  void stage_diagnose();
  void write_summary() const;
  std::string header(const char* what) const;
  bool cached(const std::string& file) const;
  void write_file(const std::string& file, const std::string& content) const;

  RunConfig config_;
  std::filesystem::path out_;
  std::string hash_;
  std::unique_ptr<FieldModel> model_;
  std::shared_ptr<const Mesh> mesh_;
  std::unique_ptr<FemField> solution_;
  RunResults results_;
  std::vector<StageRecord> records_;
};

}  // namespace tbscat
