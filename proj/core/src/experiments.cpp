#include "dmgsp/experiments.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "dmgsp/csv.hpp"
#include "dmgsp/metrics.hpp"
#include "dmgsp/rng.hpp"
#include "dmgsp/version.hpp"

namespace dmgsp {

void ExperimentConfig::validate() const {
  if (dataset != "synthetic" && dataset != "sensor_csv")
    fail(errc::bad_params, "dataset must be synthetic or sensor_csv");
  if (gso_list.empty()) fail(errc::bad_params, "gso_list is empty");
  if (tau_grid.empty()) fail(errc::bad_params, "tau_grid is empty");
  if (t_grid.empty()) fail(errc::bad_params, "t_grid is empty");
  for (double tau : tau_grid)
    if (!(tau >= 0.0 && tau <= 1.0))
      fail(errc::bad_params, "tau values must lie in [0,1]");
  for (int t : t_grid)
    if (t < 0) fail(errc::bad_params, "t values must be nonnegative");
  if (dm_truncation < 1) fail(errc::bad_params, "dm_truncation must be >= 1");
  if (jobs < 0) fail(errc::bad_params, "jobs must be >= 0");
  learn.validate();
}

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, ',')) {
    auto b = item.find_first_not_of(" \t");
    auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

double to_double(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    fail(errc::parse_error, "bad numeric value for " + key + ": " + v);
  }
}

long to_long(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    long d = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    fail(errc::parse_error, "bad integer value for " + key + ": " + v);
  }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& source_name) {
  ExperimentConfig cfg;
  std::stringstream ss(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto b = line.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(errc::parse_error, source_name + ":" + std::to_string(line_no) +
                                  ": expected key = value");
    auto trim = [](std::string s) {
      auto x = s.find_first_not_of(" \t\r\n");
      if (x == std::string::npos) return std::string();
      auto y = s.find_last_not_of(" \t\r\n");
      return s.substr(x, y - x + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));

    if (key == "dataset") cfg.dataset = value;
    else if (key == "n") cfg.synthetic.n = to_long(value, key);
    else if (key == "seed") cfg.synthetic.seed =
        static_cast<std::uint64_t>(to_long(value, key));
    else if (key == "m_signals") cfg.synthetic.m_signals = to_long(value, key);
    else if (key == "avg_degree")
      cfg.synthetic.avg_degree = static_cast<int>(to_long(value, key));
    else if (key == "coords_path") cfg.sensor.coords_path = value;
    else if (key == "signals_path") cfg.sensor.signals_path = value;
    else if (key == "radius_km") cfg.sensor.radius_km = to_double(value, key);
    else if (key == "gso_list") {
      cfg.gso_list.clear();
      for (const auto& name : split_list(value))
        cfg.gso_list.push_back(gso_kind_from_string(name));
    } else if (key == "tau_grid") {
      cfg.tau_grid.clear();
      for (const auto& v : split_list(value))
        cfg.tau_grid.push_back(to_double(v, key));
    } else if (key == "t_grid") {
      cfg.t_grid.clear();
      for (const auto& v : split_list(value))
        cfg.t_grid.push_back(static_cast<int>(to_long(v, key)));
    } else if (key == "filter") {
      if (value == "tikhonov") cfg.filter_family = FilterSpec::Family::Tikhonov;
      else if (value == "heat") cfg.filter_family = FilterSpec::Family::Heat;
      else fail(errc::parse_error, "unknown filter family: " + value);
    } else if (key == "markov_sign") {
      if (value == "plus") cfg.markov_sign = TikhonovSign::Plus;
      else if (value == "minus") cfg.markov_sign = TikhonovSign::Minus;
      else fail(errc::parse_error, "markov_sign must be plus or minus");
    } else if (key == "method") {
      if (value == "MV" || value == "mv") cfg.method = LearnMethod::MV;
      else if (value == "TV" || value == "tv") cfg.method = LearnMethod::TV;
      else fail(errc::parse_error, "method must be MV or TV");
    } else if (key == "dm_truncation") cfg.dm_truncation = to_long(value, key);
    else if (key == "output_dir") cfg.output_dir = value;
    else if (key == "max_iters")
      cfg.learn.max_iters = static_cast<int>(to_long(value, key));
    else if (key == "tol") cfg.learn.tol = to_double(value, key);
    else if (key == "step") cfg.learn.step = to_double(value, key);
    else if (key == "projection_iters")
      cfg.learn.projection_iters = static_cast<int>(to_long(value, key));
    else if (key == "tv_alpha") cfg.learn.tv_alpha = to_double(value, key);
    else if (key == "jobs") cfg.jobs = static_cast<int>(to_long(value, key));
    else
      fail(errc::parse_error, source_name + ":" + std::to_string(line_no) +
                                  ": unknown key '" + key + "'");
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::file_not_found, "cannot open config: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

std::string canonical_config_text(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "dataset = " << cfg.dataset << "\n";
  out << "n = " << cfg.synthetic.n << "\n";
  out << "seed = " << cfg.synthetic.seed << "\n";
  out << "m_signals = " << cfg.synthetic.m_signals << "\n";
  out << "avg_degree = " << cfg.synthetic.avg_degree << "\n";
  out << "coords_path = " << cfg.sensor.coords_path << "\n";
  out << "signals_path = " << cfg.sensor.signals_path << "\n";
  out << "radius_km = " << format_double(cfg.sensor.radius_km) << "\n";
  out << "gso_list = ";
  for (std::size_t i = 0; i < cfg.gso_list.size(); ++i) {
    if (i) out << ",";
    out << to_string(cfg.gso_list[i]);
  }
  out << "\n";
  out << "tau_grid = ";
  for (std::size_t i = 0; i < cfg.tau_grid.size(); ++i) {
    if (i) out << ",";
    out << format_double(cfg.tau_grid[i]);
  }
  out << "\n";
  out << "t_grid = ";
  for (std::size_t i = 0; i < cfg.t_grid.size(); ++i) {
    if (i) out << ",";
    out << cfg.t_grid[i];
  }
  out << "\n";
  out << "filter = "
      << (cfg.filter_family == FilterSpec::Family::Tikhonov ? "tikhonov"
                                                            : "heat")
      << "\n";
  out << "markov_sign = "
      << (cfg.markov_sign == TikhonovSign::Minus ? "minus" : "plus") << "\n";
  out << "method = " << (cfg.method == LearnMethod::MV ? "MV" : "TV") << "\n";
  out << "dm_truncation = " << cfg.dm_truncation << "\n";
  out << "output_dir = " << cfg.output_dir << "\n";
  out << "max_iters = " << cfg.learn.max_iters << "\n";
  out << "tol = " << format_double(cfg.learn.tol) << "\n";
  out << "step = " << format_double(cfg.learn.step) << "\n";
  out << "projection_iters = " << cfg.learn.projection_iters << "\n";
  out << "tv_alpha = " << format_double(cfg.learn.tv_alpha) << "\n";
  out << "jobs = " << cfg.jobs << "\n";
  return out.str();
}

std::pair<Graph, Eigen::MatrixXd> gen_synthetic(Eigen::Index n,
                                                std::uint64_t seed,
                                                Eigen::Index m_signals,
                                                int avg_degree) {
  if (n < 4) fail(errc::too_small, "need at least 4 nodes");
  if (m_signals < 2) fail(errc::bad_params, "need at least 2 signals");
  Graph g = random_sensor_graph(n, seed, avg_degree);

  // distinct stream from the graph draw so the two stay decoupled
  Rng rng(seed, 1000);
  Eigen::MatrixXd x(m_signals, n);
  for (Eigen::Index k = 0; k < m_signals; ++k) {
    const double a = rng.uniform(1.0, 3.0);
    const double angle = rng.uniform(0.0, 2.0 * M_PI);
    const double tx = std::cos(angle), ty = std::sin(angle);
    const double phase = rng.uniform(0.0, 2.0 * M_PI);
    for (Eigen::Index v = 0; v < n; ++v) {
      const double dot = g.coords()(v, 0) * tx + g.coords()(v, 1) * ty;
      x(k, v) = std::sin(a * dot + phase) + 0.05 * rng.normal();
    }
  }
  return {std::move(g), std::move(x)};
}

SensorDataset load_sensor_dataset(const std::string& coords_path,
                                  const std::string& signals_path,
                                  double radius_km) {
  PointSet coords = load_coords_csv(coords_path);
  SignalTable table = load_signals_csv(signals_path);
  if (table.stations.size() < 2)
    fail(errc::too_small, "need at least 2 stations");

  std::unordered_map<std::string, Eigen::Index> coord_index;
  for (std::size_t i = 0; i < coords.ids.size(); ++i)
    coord_index[coords.ids[i]] = static_cast<Eigen::Index>(i);

  std::vector<std::string> stations;
  std::vector<std::string> dropped;
  std::vector<Eigen::Index> signal_col;
  std::vector<Eigen::Index> coord_row;
  for (std::size_t s = 0; s < table.stations.size(); ++s) {
    auto it = coord_index.find(table.stations[s]);
    if (it == coord_index.end())
      fail(errc::station_mismatch,
           "signals column '" + table.stations[s] +
               "' has no coordinate row in " + coords_path);
    const auto col = static_cast<Eigen::Index>(s);
    if (table.values.col(col).hasNaN()) {
      dropped.push_back(table.stations[s]);
      continue;
    }
    signal_col.push_back(col);
    coord_row.push_back(it->second);
    stations.push_back(table.stations[s]);
  }
  const auto n = static_cast<Eigen::Index>(signal_col.size());
  if (n < 2)
    fail(errc::too_small, "fewer than 2 stations with complete series");
  const Eigen::Index t_steps = table.values.rows();
  if (t_steps < 2)
    fail(errc::parse_error, signals_path + ": need at least 2 time steps");

  Eigen::MatrixXd kept(t_steps, n);
  Eigen::MatrixXd xy(n, 2);
  for (Eigen::Index j = 0; j < n; ++j) {
    kept.col(j) = table.values.col(signal_col[static_cast<std::size_t>(j)]);
    xy.row(j) = coords.xy.row(coord_row[static_cast<std::size_t>(j)]);
  }

  // temperature changes: first differences of the hourly series
  Eigen::MatrixXd signals =
      kept.bottomRows(t_steps - 1) - kept.topRows(t_steps - 1);

  const DistanceMetric metric = coords.geographic
                                    ? DistanceMetric::GreatCircle
                                    : DistanceMetric::Euclidean;
  Eigen::MatrixXd dist = pairwise_distances(xy, metric);
  std::vector<double> upper;
  upper.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) upper.push_back(dist(i, j));
  std::sort(upper.begin(), upper.end());
  const double median =
      upper.size() % 2 == 1
          ? upper[upper.size() / 2]
          : 0.5 * (upper[upper.size() / 2 - 1] + upper[upper.size() / 2]);
  if (median <= 0.0)
    fail(errc::degenerate_data, "all station distances are zero");
  const double sigma = 0.5 * median;
  return SensorDataset{radius_graph(xy, radius_km, metric, sigma),
                       std::move(signals), std::move(stations),
                       std::move(dropped), sigma};
}

namespace {

struct Cell {
  GsoKind kind;
  double tau;
  int t;
};

FilterSpec cell_filter(const ExperimentConfig& cfg, const Cell& cell) {
  FilterSpec f;
  if (cfg.filter_family == FilterSpec::Family::Tikhonov) {
    // canonical sign on the nonnegative Laplacian spectrum, configured sign
    // on Markov-type spectra
    const TikhonovSign sign = cell.kind == GsoKind::Laplacian
                                  ? TikhonovSign::Plus
                                  : cfg.markov_sign;
    f = FilterSpec::tikhonov(cell.tau, sign);
  } else {
    f = FilterSpec::heat(cell.tau);
  }
  f.order = cell.t;  // filter order: h applied t times
  return f;
}

ResultRow run_cell(const ExperimentConfig& cfg, const std::string& name,
                   const Graph& g, const Eigen::MatrixXd& x,
                   const Cell& cell) {
  ResultRow row;
  row.dataset = name;
  row.gso = to_string(cell.kind);
  row.tau = cell.tau;
  row.t = cell.t;
  row.ree = std::numeric_limits<double>::quiet_NaN();
  row.nrmse = std::numeric_limits<double>::quiet_NaN();
  try {
    GsoSpec gso;
    gso.kind = cell.kind;
    gso.dm = DmParams{static_cast<double>(cell.t), cfg.dm_truncation,
                      DmMode::TruncatedSpectral};
    const FilterSpec f = cell_filter(cfg, cell);
    LearnResult lr = learn_pipeline(x, g, gso, f, cfg.method, cfg.learn);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(g.weights());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> est(lr.w_est);
    row.ree = ree(ref.eigenvalues(), est.eigenvalues()).value;
    row.nrmse = nrmse(upper_triangle(g.weights()), upper_triangle(lr.w_est));
    row.iterations = lr.iterations;
    row.converged = lr.converged;
  } catch (const Error&) {
    row.iterations = 0;
    row.converged = false;
  }
  return row;
}

}  // namespace

ResultTable run_grid(const ExperimentConfig& cfg) {
  cfg.validate();

  Graph g = build_graph(Eigen::MatrixXd::Zero(2, 2));
  Eigen::MatrixXd x;
  std::string name;
  if (cfg.dataset == "synthetic") {
    auto data = gen_synthetic(cfg.synthetic.n, cfg.synthetic.seed,
                              cfg.synthetic.m_signals, cfg.synthetic.avg_degree);
    g = std::move(data.first);
    x = std::move(data.second);
    name = "synthetic";
  } else {
    SensorDataset ds = load_sensor_dataset(
        cfg.sensor.coords_path, cfg.sensor.signals_path, cfg.sensor.radius_km);
    g = std::move(ds.graph);
    x = std::move(ds.signals);
    name = "sensor_csv";
  }

  std::vector<Cell> cells;
  for (GsoKind kind : cfg.gso_list)
    for (double tau : cfg.tau_grid)
      for (int t : cfg.t_grid) cells.push_back({kind, tau, t});

  ResultTable table;
  table.rows.resize(cells.size());

  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const std::size_t jobs =
      std::min(cells.size(),
               static_cast<std::size_t>(cfg.jobs > 0 ? cfg.jobs : hw));

  if (jobs <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      table.rows[i] = run_cell(cfg, name, g, x, cells[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (std::size_t w = 0; w < jobs; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= cells.size()) break;
          table.rows[i] = run_cell(cfg, name, g, x, cells[i]);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  return table;
}

std::string table_to_csv(const ResultTable& table) {
  std::ostringstream out;
  out << "dataset,gso,tau,t,ree,nrmse,iters,converged\n";
  for (const auto& row : table.rows) {
    out << row.dataset << "," << row.gso << "," << format_double(row.tau)
        << "," << row.t << "," << format_double(row.ree) << ","
        << format_double(row.nrmse) << "," << row.iterations << ","
        << (row.converged ? 1 : 0) << "\n";
  }
  return out.str();
}

ResultTable parse_table_csv(const std::string& text) {
  ResultTable table;
  std::stringstream ss(text);
  std::string line;
  bool header = true;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    while (fields.size() < 8) fields.push_back("");
    ResultRow row;
    row.dataset = fields[0];
    row.gso = fields[1];
    row.tau = fields[2].empty() ? 0.0 : std::stod(fields[2]);
    row.t = fields[3].empty() ? 0 : std::stoi(fields[3]);
    row.ree = fields[4].empty() ? std::numeric_limits<double>::quiet_NaN()
                                : std::stod(fields[4]);
    row.nrmse = fields[5].empty() ? std::numeric_limits<double>::quiet_NaN()
                                  : std::stod(fields[5]);
    row.iterations = fields[6].empty() ? 0 : std::stoi(fields[6]);
    row.converged = fields[7] == "1";
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string table_to_markdown(const ResultTable& table) {
  std::vector<std::string> gsos;
  std::vector<double> taus;
  std::vector<int> ts;
  for (const auto& row : table.rows) {
    if (std::find(gsos.begin(), gsos.end(), row.gso) == gsos.end())
      gsos.push_back(row.gso);
    if (std::find(taus.begin(), taus.end(), row.tau) == taus.end())
      taus.push_back(row.tau);
    if (std::find(ts.begin(), ts.end(), row.t) == ts.end())
      ts.push_back(row.t);
  }

  auto lookup = [&](const std::string& gso, double tau, int t,
                    bool want_ree) -> std::string {
    for (const auto& row : table.rows) {
      if (row.gso == gso && row.tau == tau && row.t == t) {
        const double v = want_ree ? row.ree : row.nrmse;
        return std::isnan(v) ? "NaN" : format_double(v);
      }
    }
    return "";
  };

  std::ostringstream out;
  for (int t : ts) {
    for (bool want_ree : {true, false}) {
      out << "## " << (want_ree ? "REE" : "NRMSE") << " (t=" << t << ")\n\n";
      out << "| tau |";
      for (const auto& gso : gsos) out << " " << gso << " |";
      out << "\n|---|";
      for (std::size_t i = 0; i < gsos.size(); ++i) out << "---|";
      out << "\n";
      for (double tau : taus) {
        out << "| " << format_double(tau) << " |";
        for (const auto& gso : gsos)
          out << " " << lookup(gso, tau, t, want_ree) << " |";
        out << "\n";
      }
      out << "\n";
    }
  }
  return out.str();
}

void emit_table(const ResultTable& table, const std::string& path,
                TableFormat format) {
  if (table.rows.empty()) fail(errc::bad_params, "empty table");
  write_text_file(path, format == TableFormat::Csv ? table_to_csv(table)
                                                   : table_to_markdown(table));
}

Graph lattice_graph(Eigen::Index side) {
  if (side < 2) fail(errc::too_small, "lattice side must be >= 2");
  const Eigen::Index n = side * side;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd coords(n, 2);
  for (Eigen::Index r = 0; r < side; ++r)
    for (Eigen::Index c = 0; c < side; ++c) {
      const Eigen::Index v = r * side + c;
      coords(v, 0) = static_cast<double>(c);
      coords(v, 1) = static_cast<double>(r);
      if (c + 1 < side) w(v, v + 1) = w(v + 1, v) = 1.0;
      if (r + 1 < side) w(v, v + side) = w(v + side, v) = 1.0;
    }
  return Graph(std::move(w), std::move(coords));
}

LatticeFrames lattice_demo(Eigen::Index side, int t_max, GsoKind kind,
                           const std::optional<FilterSpec>& f) {
  if (side < 3) fail(errc::too_small, "lattice side must be >= 3");
  if (t_max < 0) fail(errc::bad_params, "t_max must be >= 0");
  Graph g = lattice_graph(side);
  ShiftOperator s = build_gso(g, kind);

  const Eigen::Index center = (side / 2) * side + side / 2;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(side * side);
  x(center) = 1.0;

  LatticeFrames frames;
  frames.side = side;
  frames.frames.push_back(x);
  for (int t = 1; t <= t_max; ++t) {
    if (!f.has_value()) {
      // bare shift: spread the delta as a random-walk distribution (left
      // action), which conserves mass for stochastic operators
      x = s.matrix.transpose() * x;
    } else if (f->family == FilterSpec::Family::Polynomial) {
      // matvec route keeps the support exactly within the polynomial degree
      for (int rep = 0; rep < f->order; ++rep)
        x = polynomial_apply(s, f->coeffs, x);
    } else {
      x = apply_filter(s, *f, x);
    }
    frames.frames.push_back(x);
  }
  return frames;
}

std::string frames_to_csv(const LatticeFrames& frames) {
  std::ostringstream out;
  out << "t,node,value\n";
  for (std::size_t t = 0; t < frames.frames.size(); ++t) {
    const auto& frame = frames.frames[t];
    for (Eigen::Index v = 0; v < frame.size(); ++v)
      out << t << "," << v << "," << format_double(frame(v)) << "\n";
  }
  return out.str();
}

std::string run_metadata_json(const ExperimentConfig& cfg) {
  const std::string canonical = canonical_config_text(cfg);
  char hash_hex[32];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical)));

  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));

  nlohmann::json meta;
  meta["version"] = kVersion;
  meta["format_version"] = kFormatVersion;
  meta["seed"] = cfg.synthetic.seed;
  meta["config_hash"] = hash_hex;
  meta["config"] = canonical;
  meta["timestamp"] = stamp;
  return meta.dump(2) + "\n";
}

}  // namespace dmgsp
