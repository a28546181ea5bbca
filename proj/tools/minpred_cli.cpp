#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "minpred/csv.hpp"
#include "minpred/errors.hpp"
#include "minpred/eval.hpp"
#include "minpred/mpir.hpp"
#include "minpred/report.hpp"
#include "minpred/results.hpp"
#include "minpred/synth.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct CommonTrainFlags {
  double lambda = 0.002;
  double eta0 = 0.01;
  double alpha = 0.05;
  std::size_t k = 3;
  std::size_t epochs = 30000;
  std::size_t warmup = 400;
  std::size_t batch = 256;
  double lr = 1e-4;
  long fakes = -1;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  bool no_augment = false;
  bool full_chi = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--lambda", lambda, "information-term weight");
    cmd->add_option("--eta0", eta0, "initial relative noise amplitude");
    cmd->add_option("--alpha", alpha, "significance level");
    cmd->add_option("--k", k, "window horizon K");
    cmd->add_option("--epochs", epochs, "training epochs");
    cmd->add_option("--warmup", warmup, "epochs before the information term");
    cmd->add_option("--batch", batch, "minibatch size");
    cmd->add_option("--lr", lr, "Adam learning rate");
    cmd->add_option("--fakes", fakes,
                    "fake series count (-1: max(2, ceil(N/2)))");
    cmd->add_option("--seed", seed, "master seed");
    cmd->add_option("--threads", threads, "worker threads (0: hardware)");
    cmd->add_flag("--no-augment", no_augment,
                  "train without fake-series augmentation");
    cmd->add_flag("--full-chi", full_chi,
                  "per-dimension noise amplitudes instead of shared");
  }

  minpred::RunConfig to_config() const {
    minpred::RunConfig config;
    config.lambda = lambda;
    config.eta0 = eta0;
    config.alpha = alpha;
    config.K = k;
    config.epochs = epochs;
    config.warmup_epochs = warmup;
    config.batch_size = batch;
    config.learning_rate = lr;
    config.fake_count = fakes;
    config.master_seed = seed;
    config.threads = threads;
    config.augment = !no_augment;
    config.full_chi = full_chi;
    return config;
  }

  minpred::Json to_json() const {
    minpred::Json j;
    j["lambda"] = lambda;
    j["eta0"] = eta0;
    j["alpha"] = alpha;
    j["k"] = k;
    j["epochs"] = epochs;
    j["warmup"] = warmup;
    j["batch"] = batch;
    j["lr"] = lr;
    j["fakes"] = fakes;
    j["augment"] = !no_augment;
    j["full_chi"] = full_chi;
    return j;
  }
};

minpred::RunManifest make_manifest(std::uint64_t seed,
                                   const std::string& fingerprint,
                                   minpred::Json config) {
  minpred::RunManifest manifest;
  manifest.master_seed = seed;
  manifest.created_at = minpred::iso8601_utc_now();
  manifest.data_fingerprint = fingerprint;
  manifest.config = std::move(config);
  return manifest;
}

double elapsed_ms(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

int run_generate(std::size_t n, std::size_t k, std::size_t m, std::size_t t,
                 std::size_t n_series, std::uint64_t seed,
                 const std::string& out) {
  minpred::Rng graph_rng(minpred::Rng::derive(seed, minpred::seed_tag::kGraph));
  const minpred::GroundTruthGraph graph =
      minpred::sample_graph(n, k, m, graph_rng);
  const minpred::TimeSeriesBundle bundle =
      minpred::generate(graph, n_series, t, nullptr, seed);
  minpred::save_csv(bundle, out);

  minpred::ResultsDocument truth;
  truth.kind = "ground_truth";
  minpred::Json config;
  config["n"] = n;
  config["k"] = k;
  config["m"] = m;
  config["t"] = t;
  config["n_series"] = n_series;
  truth.manifest =
      make_manifest(seed, minpred::fingerprint_file(out), std::move(config));
  truth.body = minpred::ground_truth_body(graph);
  const std::string sidecar = out + ".truth.json";
  minpred::write_document(truth, sidecar);
  std::cout << "wrote " << out << " and " << sidecar << "\n";
  return kExitOk;
}

int run_discover(const std::string& data, const CommonTrainFlags& flags,
                 bool normalize_input, const std::string& out) {
  const auto start = std::chrono::steady_clock::now();
  minpred::TimeSeriesBundle bundle = minpred::load_csv(data);
  if (normalize_input) bundle = minpred::normalize(bundle);

  const minpred::RunConfig config = flags.to_config();
  minpred::StrengthMatrix matrix = minpred::infer_matrix(bundle, config);
  if (config.augment) {
    matrix = minpred::significance_threshold(std::move(matrix), config.alpha);
  }

  minpred::ResultsDocument doc;
  doc.kind = "strength_matrix";
  minpred::Json config_json = flags.to_json();
  config_json["normalize"] = normalize_input;
  doc.manifest = make_manifest(flags.seed, minpred::fingerprint_file(data),
                               std::move(config_json));
  doc.manifest.timings["total_ms"] = elapsed_ms(start);
  doc.body = minpred::strength_matrix_body(matrix);
  minpred::write_document(doc, out);
  std::cout << "wrote " << out << "\n";
  return kExitOk;
}

int run_select_lambda(const std::string& data,
                      const std::vector<double>& candidates,
                      const CommonTrainFlags& flags, const std::string& out) {
  const auto start = std::chrono::steady_clock::now();
  const minpred::TimeSeriesBundle bundle = minpred::load_csv(data);
  const minpred::RunConfig config = flags.to_config();
  const minpred::LambdaSelection selection =
      minpred::select_lambda(bundle, candidates, config);

  minpred::ResultsDocument doc;
  doc.kind = "lambda_selection";
  minpred::Json config_json = flags.to_json();
  config_json["candidates"] = candidates;
  doc.manifest = make_manifest(flags.seed, minpred::fingerprint_file(data),
                               std::move(config_json));
  doc.manifest.timings["total_ms"] = elapsed_ms(start);
  doc.body = minpred::lambda_selection_body(selection);
  if (!out.empty()) {
    minpred::write_document(doc, out);
    std::cout << "wrote " << out << "\n";
  }
  std::cout << selection.message << "\n";
  return kExitOk;
}

int run_baseline(const std::string& method_name, const std::string& data,
                 const CommonTrainFlags& flags, const std::string& out) {
  const auto start = std::chrono::steady_clock::now();
  const minpred::Method method = minpred::method_from_name(method_name);
  const minpred::TimeSeriesBundle bundle = minpred::load_csv(data);
  const minpred::RunConfig config = flags.to_config();
  const minpred::WindowedDataset dataset =
      minpred::windowize(bundle, config.K, config.train_fraction);
  const minpred::ScoreMatrix scores =
      minpred::score_with_method(method, bundle, dataset, config);

  minpred::ResultsDocument doc;
  doc.kind = "score_matrix";
  minpred::Json config_json = flags.to_json();
  config_json["method"] = method_name;
  doc.manifest = make_manifest(flags.seed, minpred::fingerprint_file(data),
                               std::move(config_json));
  doc.manifest.timings["total_ms"] = elapsed_ms(start);
  doc.body = minpred::score_matrix_body(scores);
  minpred::write_document(doc, out);
  std::cout << "wrote " << out << "\n";
  return kExitOk;
}

int run_benchmark_cmd(const std::vector<std::string>& method_names,
                      const std::vector<std::size_t>& n_list,
                      std::size_t seeds, const CommonTrainFlags& flags,
                      std::size_t n_series, std::size_t t,
                      std::size_t gaussian_count, const std::string& out) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<minpred::Method> methods;
  if (method_names.size() == 1 && method_names[0] == "all") {
    methods = minpred::all_methods();
  } else {
    for (const auto& name : method_names) {
      methods.push_back(minpred::method_from_name(name));
    }
  }
  minpred::BenchmarkRunConfig config;
  config.run = flags.to_config();
  config.n_series = n_series;
  config.T = t;
  config.gaussian_count = gaussian_count;

  const minpred::BenchmarkResult result =
      minpred::run_benchmark(methods, n_list, seeds, config);

  minpred::ResultsDocument doc;
  doc.kind = "benchmark";
  minpred::Json config_json = flags.to_json();
  config_json["methods"] = method_names;
  config_json["n_list"] = n_list;
  config_json["seeds"] = seeds;
  config_json["n_series"] = n_series;
  config_json["t"] = t;
  config_json["gaussian_count"] = gaussian_count;
  doc.manifest = make_manifest(
      flags.seed, "generated:" + std::to_string(flags.seed),
      std::move(config_json));
  doc.manifest.timings["total_ms"] = elapsed_ms(start);
  minpred::Json cell_times = minpred::Json::array();
  for (const auto& cell : result.cells) {
    cell_times.push_back({{"method", cell.method},
                          {"n", cell.n},
                          {"seed_index", cell.seed_index},
                          {"wall_ms", cell.wall_ms}});
  }
  doc.manifest.timings["cells"] = cell_times;
  doc.body = minpred::benchmark_body(result);
  minpred::write_document(doc, out);
  std::cout << "wrote " << out << "\n";
  return kExitOk;
}

int run_report(const std::vector<std::string>& results,
               const std::string& format, const std::string& out_dir) {
  std::vector<minpred::ResultsDocument> docs;
  for (const auto& path : results) {
    docs.push_back(minpred::read_document(path));
  }
  if (format == "table") {
    for (const auto& doc : docs) {
      std::cout << minpred::render_table(doc) << "\n";
    }
    return kExitOk;
  }
  if (format != "svg") {
    throw minpred::ConfigError("report: unknown format '" + format + "'");
  }

  auto write_file = [&](const std::string& name, const std::string& content) {
    const std::string path = out_dir.empty() ? name : out_dir + "/" + name;
    std::ofstream file(path);
    if (!file) throw minpred::DataError("report: cannot write " + path);
    file << content;
    std::cout << "wrote " << path << "\n";
  };

  std::vector<minpred::ResultsDocument> strength_docs;
  std::size_t index = 0;
  for (const auto& doc : docs) {
    ++index;
    const std::string type = doc.body.value("type", "");
    if (type == "strength_matrix") {
      const minpred::StrengthMatrix m =
          minpred::strength_matrix_from_body(doc.body);
      std::vector<std::string> col_names(m.names.begin(),
                                         m.names.begin() + m.n_real);
      write_file("strength_" + std::to_string(index) + ".svg",
                 minpred::render_heatmap_svg(
                     m.raw, m.n_real + m.n_fake, m.n_real, m.names, col_names,
                     "predictive strength (nats)"));
      strength_docs.push_back(doc);
    } else if (type == "score_matrix") {
      const std::size_t n = doc.body.at("n").get<std::size_t>();
      const auto values =
          doc.body.at("scores").at("values").get<std::vector<double>>();
      std::vector<std::string> names;
      for (std::size_t i = 0; i < n; ++i) {
        names.push_back("s" + std::to_string(i + 1));
      }
      write_file("scores_" + std::to_string(index) + ".svg",
                 minpred::render_heatmap_svg(
                     values, n, n, names, names,
                     doc.body.at("method").get<std::string>()));
    } else {
      write_file("report_" + std::to_string(index) + ".txt",
                 minpred::render_table(doc));
    }
  }
  if (strength_docs.size() > 1) {
    write_file("strength_vs_k.svg",
               minpred::render_strength_vs_k_svg(strength_docs));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"minpred: directional relation discovery for time series via "
               "minimum predictive information regularization"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand(
      "generate", "sample a ground-truth system and roll out synthetic data");
  std::size_t gen_n = 5, gen_k = 3, gen_m = 1, gen_t = 22, gen_series = 500;
  std::uint64_t gen_seed = 0;
  std::string gen_out = "data.csv";
  generate->add_option("--n", gen_n, "number of series")->required();
  generate->add_option("--k", gen_k, "window horizon K");
  generate->add_option("--m", gen_m, "dimensions per series");
  generate->add_option("--t", gen_t, "rollout length");
  generate->add_option("--n-series", gen_series, "independent rollouts");
  generate->add_option("--seed", gen_seed, "master seed");
  generate->add_option("--out", gen_out, "output CSV path")->required();

  // discover
  auto* discover = app.add_subcommand(
      "discover", "run the full pipeline and emit the strength matrix");
  std::string disc_data, disc_out = "strength.json";
  bool disc_normalize = false;
  CommonTrainFlags disc_flags;
  discover->add_option("--data", disc_data, "input CSV")->required();
  discover->add_option("--out", disc_out, "output results document");
  discover->add_flag("--normalize", disc_normalize,
                     "normalize each series to zero mean, unit variance");
  disc_flags.attach(discover);

  // select-lambda
  auto* select = app.add_subcommand(
      "select-lambda", "calibrate the information-term weight");
  std::string sel_data, sel_out;
  std::vector<double> sel_candidates;
  CommonTrainFlags sel_flags;
  select->add_option("--data", sel_data, "input CSV")->required();
  select->add_option("--candidates", sel_candidates,
                     "ascending candidate lambdas")->required()
      ->delimiter(',');
  select->add_option("--out", sel_out, "output results document");
  sel_flags.attach(select);

  // baseline
  auto* baseline = app.add_subcommand(
      "baseline", "run one of the comparison scorers");
  std::string base_method, base_data, base_out = "scores.json";
  CommonTrainFlags base_flags;
  baseline->add_option("--method", base_method,
                       "mutual_information | transfer_entropy | "
                       "linear_granger | kernel_granger | elastic_net | "
                       "causal_influence | mpir")
      ->required();
  baseline->add_option("--data", base_data, "input CSV")->required();
  baseline->add_option("--out", base_out, "output results document");
  base_flags.attach(baseline);

  // benchmark
  auto* benchmark = app.add_subcommand(
      "benchmark", "score methods across sampled synthetic systems");
  std::vector<std::string> bench_methods{"all"};
  std::vector<std::size_t> bench_n{5};
  std::size_t bench_seeds = 10, bench_series = 500, bench_t = 22;
  std::size_t bench_gaussian = 10000;
  std::string bench_out = "benchmark.json";
  CommonTrainFlags bench_flags;
  benchmark->add_option("--methods", bench_methods,
                        "comma list of methods or 'all'")
      ->delimiter(',');
  benchmark->add_option("--n-list", bench_n, "series counts")->delimiter(',');
  benchmark->add_option("--seeds", bench_seeds, "dataset seeds per N");
  benchmark->add_option("--n-series", bench_series, "rollouts per dataset");
  benchmark->add_option("--t", bench_t, "rollout length");
  benchmark->add_option("--gaussian-count", bench_gaussian,
                        "random matrices for the gaussian_random method");
  benchmark->add_option("--out", bench_out, "output results document");
  bench_flags.attach(benchmark);

  // report
  auto* report = app.add_subcommand(
      "report", "render results documents as tables or SVG figures");
  std::vector<std::string> rep_results;
  std::string rep_format = "table", rep_out;
  report->add_option("--results", rep_results, "results documents")
      ->required()
      ->delimiter(',');
  report->add_option("--format", rep_format, "table | svg");
  report->add_option("--out", rep_out, "output directory for svg files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (generate->parsed()) {
      return run_generate(gen_n, gen_k, gen_m, gen_t, gen_series, gen_seed,
                          gen_out);
    }
    if (discover->parsed()) {
      return run_discover(disc_data, disc_flags, disc_normalize, disc_out);
    }
    if (select->parsed()) {
      return run_select_lambda(sel_data, sel_candidates, sel_flags, sel_out);
    }
    if (baseline->parsed()) {
      return run_baseline(base_method, base_data, base_flags, base_out);
    }
    if (benchmark->parsed()) {
      return run_benchmark_cmd(bench_methods, bench_n, bench_seeds,
                               bench_flags, bench_series, bench_t,
                               bench_gaussian, bench_out);
    }
    if (report->parsed()) {
      return run_report(rep_results, rep_format, rep_out);
    }
  } catch (const minpred::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const minpred::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const minpred::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const minpred::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
