// Command line front end: embed | filter | learn | bench | demo-lattice |
// check-gso. Machine-readable CSV outputs with JSON metadata sidecars.
// Exit codes: 0 ok, 1 usage, 2 data error, 3 numerical failure.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "dmgsp/dmgsp.hpp"
#include "dmgsp/graph_io.hpp"

namespace {

using namespace dmgsp;

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
};

struct FilterFlags {
  std::string name = "tikhonov";
  double tau = 0.5;
  double time = 1.0;
  double cutoff = 0.0;
  std::vector<double> coeffs{1.0};
  std::string sign = "plus";
  int order = 1;

  // returns nullopt for the bare-shift case used by demo-lattice
  std::optional<FilterSpec> build(bool allow_shift) const {
    std::optional<FilterSpec> f;
    if (name == "shift") {
      if (!allow_shift) fail(errc::bad_params, "filter 'shift' not valid here");
      return std::nullopt;
    }
    if (name == "identity") f = FilterSpec::identity();
    else if (name == "tikhonov")
      f = FilterSpec::tikhonov(tau, sign == "minus" ? TikhonovSign::Minus
                                                    : TikhonovSign::Plus);
    else if (name == "heat") f = FilterSpec::heat(time);
    else if (name == "ideal") f = FilterSpec::ideal(cutoff);
    else if (name == "poly") f = FilterSpec::polynomial(coeffs);
    else fail(errc::bad_params, "unknown filter: " + name);
    f->order = order;
    return f;
  }
};

void add_filter_flags(CLI::App* cmd, FilterFlags& ff) {
  cmd->add_option("--filter", ff.name,
                  "identity|tikhonov|heat|ideal|poly|shift");
  cmd->add_option("--tau", ff.tau, "Tikhonov parameter in [0,1]");
  cmd->add_option("--time", ff.time, "heat filter time");
  cmd->add_option("--cutoff", ff.cutoff, "ideal filter cutoff");
  cmd->add_option("--coeffs", ff.coeffs, "polynomial coefficients h_0..h_L");
  cmd->add_option("--tikhonov-sign", ff.sign, "plus|minus");
}

DmParams dm_from(double t, long l, const std::string& mode) {
  DmParams dm;
  dm.t = t;
  dm.l = l;
  if (mode == "truncated") dm.mode = DmMode::TruncatedSpectral;
  else if (mode == "identity-minus-power") dm.mode = DmMode::IdentityMinusPower;
  else fail(errc::bad_params, "unknown diffusion-map mode: " + mode);
  return dm;
}

int run_embed(const std::string& input, const std::string& output,
              std::optional<double> sigma_flag, bool sigma_median,
              bool sigma_bgh, double t, long l) {
  DataTable data = load_data_csv(input);
  double sigma = 0.0;
  if (sigma_flag) {
    sigma = *sigma_flag;
  } else if (sigma_bgh) {
    BghResult bgh = bgh_bandwidth(pairwise_sq_distances(data.features));
    if (bgh.no_maximum)
      std::cerr << "warning: BGH slope was monotone; using boundary epsilon\n";
    sigma = std::sqrt(2.0 * bgh.epsilon);
  } else {
    (void)sigma_median;  // the default path
    sigma = median_bandwidth(data.features);
  }
  Eigen::MatrixXd w =
      gaussian_affinity(pairwise_sq_distances(data.features), sigma);
  SpectralDecomposition dec = decompose(markov_matrix(w));
  DiffusionMapEmbedding emb = embedding(dec, t, l);
  if (emb.noninteger_negative_power)
    std::cerr << "warning: non-integer t with negative eigenvalues; "
                 "sign(lambda)*|lambda|^t convention applied\n";
  write_embedding_csv(output, emb, sigma);
  return 0;
}

int run_filter(const std::string& graph_path, const std::string& signals_path,
               const std::string& output, const std::string& gso_name,
               const FilterFlags& ff, double dm_t, long dm_l,
               const std::string& dm_mode) {
  Graph g = load_edge_list_csv(graph_path);
  ShiftOperator s =
      build_gso(g, gso_kind_from_string(gso_name), dm_from(dm_t, dm_l, dm_mode));
  SignalTable table = load_signals_csv(signals_path);
  if (static_cast<Eigen::Index>(table.stations.size()) != g.size())
    fail(errc::bad_params, "signal columns do not match graph size");
  if (table.values.hasNaN())
    fail(errc::parse_error, signals_path + ": missing values not supported");
  std::optional<FilterSpec> f = ff.build(false);
  Eigen::MatrixXd filtered = filter_signals(table.values, s, *f);

  std::ostringstream out;
  out << "timestamp";
  for (const auto& st : table.stations) out << "," << st;
  out << "\n";
  for (Eigen::Index r = 0; r < filtered.rows(); ++r) {
    out << table.timestamps[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < filtered.cols(); ++c)
      out << "," << format_double(filtered(r, c));
    out << "\n";
  }
  write_text_file(output, out.str());
  return 0;
}

int run_learn(const std::string& signals_path, const std::string& coords_path,
              double radius_km, const std::string& output_dir,
              const std::string& gso_name, const FilterFlags& ff, int t,
              long dm_l, const std::string& method_name,
              const LearnOptions& opts) {
  SensorDataset ds = load_sensor_dataset(coords_path, signals_path, radius_km);
  for (const auto& st : ds.dropped)
    std::cerr << "warning: dropped station with missing hours: " << st << "\n";

  GsoSpec gso;
  gso.kind = gso_kind_from_string(gso_name);
  gso.dm = dm_from(static_cast<double>(t), dm_l, "truncated");
  FilterFlags ff_t = ff;
  ff_t.order = t;
  std::optional<FilterSpec> f = ff_t.build(false);
  LearnMethod method = method_name == "TV" ? LearnMethod::TV : LearnMethod::MV;

  LearnResult lr = learn_pipeline(ds.signals, ds.graph, gso, *f, method, opts);

  std::filesystem::create_directories(output_dir);
  write_learn_result(output_dir + "/edges.csv", output_dir + "/run.json", lr);
  std::cout << "learned " << ds.graph.size() << " nodes in " << lr.iterations
            << " iterations (converged=" << (lr.converged ? "yes" : "no")
            << ")\n";
  return 0;
}

int run_bench(const std::string& config_path, ExperimentConfig overrides,
              const std::vector<std::string>& set_keys,
              const GlobalFlags& global) {
  ExperimentConfig cfg;
  if (!config_path.empty()) cfg = parse_config_file(config_path);

  // command line wins over file values
  for (const auto& key : set_keys) {
    if (key == "dataset") cfg.dataset = overrides.dataset;
    else if (key == "n") cfg.synthetic.n = overrides.synthetic.n;
    else if (key == "m_signals")
      cfg.synthetic.m_signals = overrides.synthetic.m_signals;
    else if (key == "avg_degree")
      cfg.synthetic.avg_degree = overrides.synthetic.avg_degree;
    else if (key == "coords_path")
      cfg.sensor.coords_path = overrides.sensor.coords_path;
    else if (key == "signals_path")
      cfg.sensor.signals_path = overrides.sensor.signals_path;
    else if (key == "radius_km") cfg.sensor.radius_km = overrides.sensor.radius_km;
    else if (key == "gso_list") cfg.gso_list = overrides.gso_list;
    else if (key == "tau_grid") cfg.tau_grid = overrides.tau_grid;
    else if (key == "t_grid") cfg.t_grid = overrides.t_grid;
    else if (key == "method") cfg.method = overrides.method;
    else if (key == "dm_truncation") cfg.dm_truncation = overrides.dm_truncation;
    else if (key == "output_dir") cfg.output_dir = overrides.output_dir;
    else if (key == "markov_sign") cfg.markov_sign = overrides.markov_sign;
    else if (key == "max_iters") cfg.learn.max_iters = overrides.learn.max_iters;
    else if (key == "tol") cfg.learn.tol = overrides.learn.tol;
    else if (key == "step") cfg.learn.step = overrides.learn.step;
    else if (key == "tv_alpha") cfg.learn.tv_alpha = overrides.learn.tv_alpha;
  }
  if (global.seed) cfg.synthetic.seed = *global.seed;
  if (global.jobs) cfg.jobs = *global.jobs;

  ResultTable table = run_grid(cfg);

  std::filesystem::create_directories(cfg.output_dir);
  emit_table(table, cfg.output_dir + "/results.csv", TableFormat::Csv);
  emit_table(table, cfg.output_dir + "/results.md", TableFormat::Markdown);
  write_text_file(cfg.output_dir + "/metadata.json", run_metadata_json(cfg));
  std::cout << "wrote " << table.rows.size() << " rows to " << cfg.output_dir
            << "/results.csv\n";
  return 0;
}

int run_demo_lattice(long side, int t_max, const FilterFlags& ff,
                     const std::string& gso_name, const std::string& output) {
  std::optional<FilterSpec> f = ff.build(true);
  LatticeFrames frames =
      lattice_demo(side, t_max, gso_kind_from_string(gso_name), f);
  write_text_file(output, frames_to_csv(frames));
  std::cout << "wrote " << frames.frames.size() << " frames to " << output
            << "\n";
  return 0;
}

int run_check_gso(const std::string& graph_path, const std::string& gso_name,
                  double dm_t, long dm_l, const std::string& dm_mode,
                  int probes, double tol, const std::string& output,
                  const GlobalFlags& global) {
  Graph g = load_edge_list_csv(graph_path);
  ShiftOperator s =
      build_gso(g, gso_kind_from_string(gso_name), dm_from(dm_t, dm_l, dm_mode));
  PropertyReport report =
      check_gso_properties(s, tol, probes, global.seed.value_or(1234));
  write_text_file(output, report.to_csv());
  std::cout << report.to_csv();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diffusion-map graph signal processing toolkit"};
  app.require_subcommand(0, 1);
  app.fallthrough(true);  // global flags may follow the subcommand
  app.set_config("--flags-from", "", "read flags from an ini-style file");

  GlobalFlags global;
  std::uint64_t seed_value = 0;
  int jobs_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "global seed override");
  auto* jobs_opt = app.add_option("--jobs", jobs_value, "parallel workers");
  bool show_version = false;
  app.add_flag("--version", show_version, "print version and exit");

  // embed
  auto* embed = app.add_subcommand("embed", "data CSV -> diffusion coordinates");
  std::string embed_in, embed_out = "embedding.csv";
  double embed_sigma = 0.0, embed_t = 1.0;
  long embed_l = 2;
  embed->add_option("--input", embed_in)->required();
  embed->add_option("--output", embed_out);
  auto* sigma_opt = embed->add_option("--sigma", embed_sigma, "fixed bandwidth");
  bool sigma_median = false, sigma_bgh = false;
  auto* median_opt =
      embed->add_flag("--sigma-median", sigma_median, "median heuristic");
  auto* bgh_opt = embed->add_flag("--sigma-bgh", sigma_bgh, "BGH scan");
  sigma_opt->excludes(median_opt)->excludes(bgh_opt);
  median_opt->excludes(bgh_opt);
  embed->add_option("--t", embed_t, "diffusion time");
  embed->add_option("--l", embed_l, "truncation level");

  // filter
  auto* filter = app.add_subcommand("filter", "spectral-filter signals");
  std::string filter_graph, filter_signals_path, filter_out = "filtered.csv";
  std::string filter_gso = "P";
  FilterFlags filter_ff;
  double filter_dm_t = 1.0;
  long filter_dm_l = 0;
  std::string filter_dm_mode = "truncated";
  filter->add_option("--graph", filter_graph)->required();
  filter->add_option("--signals", filter_signals_path)->required();
  filter->add_option("--output", filter_out);
  filter->add_option("--gso", filter_gso, "A|L|P|DM");
  add_filter_flags(filter, filter_ff);
  filter->add_option("--order", filter_ff.order, "apply the filter this many times");
  filter->add_option("--dm-t", filter_dm_t);
  filter->add_option("--dm-l", filter_dm_l);
  filter->add_option("--dm-mode", filter_dm_mode);

  // learn
  auto* learn = app.add_subcommand("learn", "signals + coords -> edge list");
  std::string learn_signals, learn_coords, learn_dir = "learned";
  std::string learn_gso = "P", learn_method = "MV";
  double learn_radius = 50.0;
  int learn_t = 1;
  long learn_dm_l = 0;
  FilterFlags learn_ff;
  LearnOptions learn_opts;
  learn->add_option("--signals", learn_signals)->required();
  learn->add_option("--coords", learn_coords)->required();
  learn->add_option("--radius-km", learn_radius);
  learn->add_option("--output-dir", learn_dir);
  learn->add_option("--gso", learn_gso, "A|L|P|DM");
  add_filter_flags(learn, learn_ff);
  learn->add_option("--t", learn_t, "filter order / diffusion time");
  learn->add_option("--dm-l", learn_dm_l);
  learn->add_option("--method", learn_method, "MV|TV");
  learn->add_option("--max-iters", learn_opts.max_iters);
  learn->add_option("--tol", learn_opts.tol);
  learn->add_option("--step", learn_opts.step);
  learn->add_option("--projection-iters", learn_opts.projection_iters);
  learn->add_option("--tv-alpha", learn_opts.tv_alpha);

  // bench
  auto* bench = app.add_subcommand("bench", "run a benchmark grid");
  std::string bench_config;
  ExperimentConfig bench_over;
  std::vector<std::string> bench_set;
  bench->add_option("--config", bench_config, "flat key=value config file");
  std::vector<std::string> bench_gso_names;
  bench->add_option("--dataset", bench_over.dataset)
      ->each([&](const std::string&) { bench_set.push_back("dataset"); });
  bench->add_option("--n", bench_over.synthetic.n)
      ->each([&](const std::string&) { bench_set.push_back("n"); });
  bench->add_option("--m-signals", bench_over.synthetic.m_signals)
      ->each([&](const std::string&) { bench_set.push_back("m_signals"); });
  bench->add_option("--avg-degree", bench_over.synthetic.avg_degree)
      ->each([&](const std::string&) { bench_set.push_back("avg_degree"); });
  bench->add_option("--coords", bench_over.sensor.coords_path)
      ->each([&](const std::string&) { bench_set.push_back("coords_path"); });
  bench->add_option("--signals", bench_over.sensor.signals_path)
      ->each([&](const std::string&) { bench_set.push_back("signals_path"); });
  bench->add_option("--radius-km", bench_over.sensor.radius_km)
      ->each([&](const std::string&) { bench_set.push_back("radius_km"); });
  bench->add_option("--gso-list", bench_gso_names)
      ->delimiter(',')
      ->each([&](const std::string&) { bench_set.push_back("gso_list"); });
  bench->add_option("--tau-grid", bench_over.tau_grid)
      ->delimiter(',')
      ->each([&](const std::string&) { bench_set.push_back("tau_grid"); });
  bench->add_option("--t-grid", bench_over.t_grid)
      ->delimiter(',')
      ->each([&](const std::string&) { bench_set.push_back("t_grid"); });
  std::string bench_method = "MV";
  bench->add_option("--method", bench_method)->each([&](const std::string& v) {
    bench_over.method = v == "TV" ? LearnMethod::TV : LearnMethod::MV;
    bench_set.push_back("method");
  });
  std::string bench_sign = "minus";
  bench->add_option("--markov-sign", bench_sign)->each([&](const std::string& v) {
    bench_over.markov_sign =
        v == "plus" ? TikhonovSign::Plus : TikhonovSign::Minus;
    bench_set.push_back("markov_sign");
  });
  bench->add_option("--dm-truncation", bench_over.dm_truncation)
      ->each([&](const std::string&) { bench_set.push_back("dm_truncation"); });
  bench->add_option("--output-dir", bench_over.output_dir)
      ->each([&](const std::string&) { bench_set.push_back("output_dir"); });
  bench->add_option("--max-iters", bench_over.learn.max_iters)
      ->each([&](const std::string&) { bench_set.push_back("max_iters"); });
  bench->add_option("--tol", bench_over.learn.tol)
      ->each([&](const std::string&) { bench_set.push_back("tol"); });
  bench->add_option("--step", bench_over.learn.step)
      ->each([&](const std::string&) { bench_set.push_back("step"); });
  bench->add_option("--tv-alpha", bench_over.learn.tv_alpha)
      ->each([&](const std::string&) { bench_set.push_back("tv_alpha"); });

  // demo-lattice
  auto* demo = app.add_subcommand("demo-lattice", "filter a delta on a lattice");
  long demo_side = 11;
  int demo_t_max = 10;
  std::string demo_gso = "P", demo_out = "frames.csv";
  FilterFlags demo_ff;
  demo_ff.name = "shift";
  demo->add_option("--side", demo_side);
  demo->add_option("--t-max", demo_t_max);
  demo->add_option("--gso", demo_gso, "A|L|P|DM");
  add_filter_flags(demo, demo_ff);
  demo->add_option("--output", demo_out);

  // check-gso
  auto* check = app.add_subcommand("check-gso", "property report for a GSO");
  std::string check_graph, check_gso = "P", check_out = "report.csv";
  double check_dm_t = 1.0, check_tol = 1e-8;
  long check_dm_l = 0;
  std::string check_dm_mode = "truncated";
  int check_probes = 1000;
  check->add_option("--graph", check_graph)->required();
  check->add_option("--gso", check_gso, "A|L|P|DM");
  check->add_option("--dm-t", check_dm_t);
  check->add_option("--dm-l", check_dm_l);
  check->add_option("--dm-mode", check_dm_mode);
  check->add_option("--probes", check_probes);
  check->add_option("--tol", check_tol);
  check->add_option("--output", check_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 1;
  }

  if (show_version) {
    std::cout << "dmgsp " << dmgsp::kVersion << " (table format v"
              << dmgsp::kFormatVersion << ")\n";
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << "error: a subcommand is required (see --help)\n";
    return 1;
  }

  if (*seed_opt) global.seed = seed_value;
  if (*jobs_opt) global.jobs = jobs_value;

  try {
    if (*embed)
      return run_embed(embed_in, embed_out,
                       *sigma_opt ? std::optional<double>(embed_sigma)
                                  : std::nullopt,
                       sigma_median, sigma_bgh, embed_t, embed_l);
    if (*filter)
      return run_filter(filter_graph, filter_signals_path, filter_out,
                        filter_gso, filter_ff, filter_dm_t, filter_dm_l,
                        filter_dm_mode);
    if (*learn)
      return run_learn(learn_signals, learn_coords, learn_radius, learn_dir,
                       learn_gso, learn_ff, learn_t, learn_dm_l, learn_method,
                       learn_opts);
    if (*bench) {
      if (!bench_gso_names.empty()) {
        bench_over.gso_list.clear();
        for (const auto& name : bench_gso_names)
          bench_over.gso_list.push_back(gso_kind_from_string(name));
      }
      return run_bench(bench_config, bench_over, bench_set, global);
    }
    if (*demo)
      return run_demo_lattice(demo_side, demo_t_max, demo_ff, demo_gso,
                              demo_out);
    if (*check)
      return run_check_gso(check_graph, check_gso, check_dm_t, check_dm_l,
                           check_dm_mode, check_probes, check_tol, check_out,
                           global);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.category() == error_category::numeric ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
