#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dmgsp/graph.hpp"
#include "dmgsp/learning.hpp"

namespace dmgsp {

struct SyntheticSpec {
  Eigen::Index n = 30;
  std::uint64_t seed = 7;
  Eigen::Index m_signals = 200;
  int avg_degree = 6;
};

struct SensorCsvSpec {
  std::string coords_path;
  std::string signals_path;
  double radius_km = 50.0;
};

/// One benchmark run: a dataset, the operators to compare, the filter
/// grids, and the optimizer settings. Parsed from a flat key=value file;
/// command-line flags override file values.
struct ExperimentConfig {
  std::string dataset = "synthetic";  // "synthetic" | "sensor_csv"
  SyntheticSpec synthetic;
  SensorCsvSpec sensor;

  std::vector<GsoKind> gso_list{GsoKind::Adjacency, GsoKind::Laplacian,
                                GsoKind::Markov, GsoKind::DiffusionMap};
  std::vector<double> tau_grid{0.5};
  std::vector<int> t_grid{1};
  FilterSpec::Family filter_family = FilterSpec::Family::Tikhonov;
  // sign convention used on Markov-type spectra (A, P, DM); the Laplacian
  // always gets the canonical 1/(1 + tau lambda)
  TikhonovSign markov_sign = TikhonovSign::Minus;
  LearnMethod method = LearnMethod::MV;
  Eigen::Index dm_truncation = 5;
  std::string output_dir = "out";
  LearnOptions learn;
  int jobs = 0;  // 0 = all hardware threads

  void validate() const;
};

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& source_name);
ExperimentConfig parse_config_file(const std::string& path);

/// Canonical serialization: stable key order, deterministic number
/// formatting. Hashing this gives the config fingerprint in run metadata.
std::string canonical_config_text(const ExperimentConfig& cfg);

struct ResultRow {
  std::string dataset;
  std::string gso;
  double tau = 0.0;
  int t = 1;
  double ree = 0.0;    // NaN when the cell failed
  double nrmse = 0.0;  // NaN when the cell failed
  int iterations = 0;
  bool converged = false;
};

struct ResultTable {
  std::vector<ResultRow> rows;
};

/// Random sensor graph plus smooth sinusoid-over-geometry signals with a
/// small additive noise; deterministic per seed.
std::pair<Graph, Eigen::MatrixXd> gen_synthetic(Eigen::Index n,
                                                std::uint64_t seed,
                                                Eigen::Index m_signals,
                                                int avg_degree = 6);

struct SensorDataset {
  Graph graph;
  Eigen::MatrixXd signals;  // rows = hours (first differences), cols = stations
  std::vector<std::string> stations;
  std::vector<std::string> dropped;  // stations removed for missing hours
  double sigma = 0.0;                // bandwidth used for the ground truth
};

/// Ground truth = great-circle radius graph over the stations; signals are
/// first differences of the hourly series. Stations with missing hours are
/// dropped (listed in `dropped`); a signal column without a coordinate row
/// is a station_mismatch error.
SensorDataset load_sensor_dataset(const std::string& coords_path,
                                  const std::string& signals_path,
                                  double radius_km);

/// Runs every (gso, tau, t) cell through the learning pipeline and scores
/// it against the ground truth. Cells are independent; serial and parallel
/// execution produce identical tables. Per-cell failures are recorded
/// in-row with NaN metrics instead of aborting the grid.
ResultTable run_grid(const ExperimentConfig& cfg);

enum class TableFormat { Csv, Markdown };

std::string table_to_csv(const ResultTable& table);
/// Pivots GSO x tau per metric (one section for REE, one for NRMSE).
std::string table_to_markdown(const ResultTable& table);
void emit_table(const ResultTable& table, const std::string& path,
                TableFormat format);

/// Round-trips a CSV produced by table_to_csv.
ResultTable parse_table_csv(const std::string& text);

struct LatticeFrames {
  Eigen::Index side = 0;
  std::vector<Eigen::VectorXd> frames;  // frames[t], t = 0..t_max
};

/// Delta signal at the center of a side x side lattice, repeatedly pushed
/// through H(S) (or through S itself when no filter is given). Frame 0 is
/// the delta.
LatticeFrames lattice_demo(Eigen::Index side, int t_max,
                           GsoKind kind = GsoKind::Markov,
                           const std::optional<FilterSpec>& f = std::nullopt);

/// Long-format export: `t,node,value`.
std::string frames_to_csv(const LatticeFrames& frames);

/// Equally weighted 4-neighbor lattice graph with grid coordinates.
Graph lattice_graph(Eigen::Index side);

/// JSON run metadata: seed, config hash, library version, and a timestamp.
/// Kept in a sidecar so the data files stay byte-reproducible.
std::string run_metadata_json(const ExperimentConfig& cfg);

}  // namespace dmgsp
