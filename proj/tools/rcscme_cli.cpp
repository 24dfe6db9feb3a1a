#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "rcscme/pipeline.hpp"
#include "rcscme/wav.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rcscme;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct PipelineOptions {
  std::string config_path;
  std::string variant;
  int iterations = -1;
  int seed = -1;
  double alpha = -1.0;
  double beta = -1.0;
};

void add_pipeline_options(CLI::App* cmd, PipelineOptions& opts) {
  cmd->add_option("--config", opts.config_path, "pipeline config file");
  cmd->add_option("--variant", opts.variant,
                  "estimator variant: conventional | proposed");
  cmd->add_option("--iterations", opts.iterations, "EM iteration count");
  cmd->add_option("--seed", opts.seed, "random seed");
  cmd->add_option("--alpha", opts.alpha, "inverse-gamma shape");
  cmd->add_option("--beta", opts.beta, "inverse-gamma scale");
}

PipelineConfig resolve_pipeline_config(const PipelineOptions& opts,
                                       int sample_rate_hz) {
  KeyValueConfig kv = opts.config_path.empty()
                          ? KeyValueConfig::parse_string("")
                          : KeyValueConfig::parse_file(opts.config_path);
  PipelineConfig cfg = PipelineConfig::from_config(kv);
  if (!kv.has("stft", "sample_rate_hz") && sample_rate_hz > 0)
    cfg.stft = FrameConfig::at_rate(sample_rate_hz);
  if (!opts.variant.empty()) {
    const Variant v = parse_variant(opts.variant);
    const int keep_iterations = cfg.prior.n_iterations;
    cfg.prior = PriorConfig::defaults(v);
    cfg.prior.n_iterations = keep_iterations;
  }
  if (opts.iterations >= 0) cfg.prior.n_iterations = opts.iterations;
  if (opts.alpha >= 0.0) cfg.prior.alpha = opts.alpha;
  if (opts.beta >= 0.0) cfg.prior.beta = opts.beta;
  if (opts.seed >= 0) {
    cfg.seed = static_cast<unsigned>(opts.seed);
    cfg.ilrma.seed = cfg.seed;
  }
  cfg.prior.validate();
  return cfg;
}

void write_diagnostics_csv(const std::string& path,
                           const std::vector<IterationDiagnostics>& diags) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot create diagnostics file: " + path);
  out << "iteration,q_value,map_objective,min_eigenvalue\n";
  for (const auto& d : diags)
    out << d.iteration << ',' << d.q_value << ',' << d.map_objective << ','
        << d.min_eigenvalue << '\n';
}

int cmd_extract(const PipelineOptions& opts, const std::string& input_path,
                const std::string& output_path, const std::string& report_path,
                const std::string& diagnostics_path, int channel) {
  const WavData wav = read_wav(input_path);
  if (wav.samples.rows() < 2)
    throw ConfigError("extract: input must have at least 2 channels");
  const PipelineConfig cfg = resolve_pipeline_config(opts, wav.sample_rate_hz);

  const PipelineResult result = extract(wav.samples, cfg);
  const Signal& image = result.extracted_signal;
  if (channel >= 0) {
    if (channel >= image.rows())
      throw ConfigError("extract: channel index out of range");
    write_wav(output_path, image.row(channel), wav.sample_rate_hz);
  } else {
    write_wav(output_path, image, wav.sample_rate_hz);
  }

  json report;
  report["input"] = input_path;
  report["output"] = output_path;
  report["variant"] = variant_name(cfg.prior.variant);
  report["target_channel"] = result.target_channel;
  report["em_iterations"] = cfg.prior.n_iterations;
  report["ilrma_iterations"] = cfg.ilrma.n_iterations;
  report["seed"] = cfg.seed;
  if (!result.diagnostics.empty()) {
    report["final_map_objective"] = result.diagnostics.back().map_objective;
    report["initial_map_objective"] = result.diagnostics.front().map_objective;
    report["min_noise_scm_eigenvalue"] =
        result.diagnostics.back().min_eigenvalue;
  }
  if (report_path.empty()) {
    std::cout << report.dump(2) << '\n';
  } else {
    std::ofstream out(report_path);
    if (!out) throw ConfigError("cannot create report file: " + report_path);
    out << report.dump(2) << '\n';
  }
  if (!diagnostics_path.empty())
    write_diagnostics_csv(diagnostics_path, result.diagnostics);
  return 0;
}

int cmd_simulate(const std::string& scene_path, const std::string& out_dir) {
  const KeyValueConfig kv = KeyValueConfig::parse_file(scene_path);
  const SceneConfig scene = scene_from_config(kv);
  const Mixture mix = make_default_mixture(scene);

  fs::create_directories(out_dir);
  write_wav(out_dir + "/mixture.wav", mix.observed, scene.sample_rate_hz);
  write_wav(out_dir + "/target_ref.wav", mix.target_image,
            scene.sample_rate_hz);
  write_wav(out_dir + "/noise_ref.wav", mix.noise_image,
            scene.sample_rate_hz);
  std::cout << "wrote mixture.wav, target_ref.wav, noise_ref.wav to "
            << out_dir << '\n';
  return 0;
}

Vec reference_channel(const WavData& wav) {
  return wav.samples.row(0).transpose();
}

int cmd_evaluate(const std::string& estimate_path,
                 const std::string& reference_path,
                 const std::string& csv_path) {
  std::vector<std::pair<std::string, std::pair<std::string, std::string>>>
      pairs;
  if (fs::is_directory(estimate_path)) {
    if (!fs::is_directory(reference_path))
      throw ConfigError("evaluate: batch mode needs two directories");
    for (const auto& entry : fs::directory_iterator(estimate_path)) {
      if (entry.path().extension() != ".wav") continue;
      const fs::path ref = fs::path(reference_path) / entry.path().filename();
      if (!fs::exists(ref))
        throw ConfigError("evaluate: missing reference for " +
                          entry.path().filename().string());
      pairs.push_back({entry.path().filename().string(),
                       {entry.path().string(), ref.string()}});
    }
    std::sort(pairs.begin(), pairs.end());
    if (pairs.empty()) throw ConfigError("evaluate: no WAV files in batch");
  } else {
    pairs.push_back({fs::path(estimate_path).filename().string(),
                     {estimate_path, reference_path}});
  }

  std::ostringstream csv;
  csv << "name,sdr_db\n";
  double total = 0.0;
  for (const auto& [name, paths] : pairs) {
    const WavData est = read_wav(paths.first);
    const WavData ref = read_wav(paths.second);
    if (est.sample_rate_hz != ref.sample_rate_hz)
      throw ConfigError("evaluate: sample rate mismatch for " + name);
    const double value =
        sdr(reference_channel(est), reference_channel(ref));
    total += value;
    csv << name << ',' << value << '\n';
  }
  csv << "mean," << total / pairs.size() << '\n';

  if (csv_path.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(csv_path);
    if (!out) throw ConfigError("cannot create CSV file: " + csv_path);
    out << csv.str();
  }
  return 0;
}

int cmd_bench(const std::string& grid_path, const std::string& csv_path) {
  const KeyValueConfig kv = grid_path.empty()
                                ? KeyValueConfig::parse_string("")
                                : KeyValueConfig::parse_file(grid_path);
  const int n_seeds = kv.get_int("grid", "seeds", 10);
  const int n_directions = kv.get_int("grid", "directions", 4);
  if (n_seeds < 1 || n_directions < 1)
    throw ConfigError("bench: need at least one seed and direction");

  SceneConfig base = scene_from_config(kv);
  PipelineConfig pcfg = PipelineConfig::from_config(kv);
  if (!kv.has("stft", "sample_rate_hz"))
    pcfg.stft = FrameConfig::at_rate(base.sample_rate_hz);

  std::ostringstream csv;
  csv << "seed,direction_deg,variant,iteration,sdr_improvement_db\n";
  double conv_peak = 0, conv_final = 0, prop_peak = 0, prop_final = 0,
         ilrma_score = 0;
  int runs = 0;
  for (int s = 0; s < n_seeds; ++s) {
    for (int d = 0; d < n_directions; ++d) {
      SceneConfig scene = base;
      scene.seed = base.seed + static_cast<unsigned>(s * n_directions + d);
      scene.target_direction_deg = 360.0 * d / n_directions;
      pcfg.ilrma.seed = scene.seed;

      const SceneEvaluation eval = evaluate_scene(scene, pcfg);
      conv_peak += eval.conventional.peak_improvement_db;
      conv_final += eval.conventional.sdr_improvement_db;
      prop_peak += eval.proposed.peak_improvement_db;
      prop_final += eval.proposed.sdr_improvement_db;
      ilrma_score += eval.ilrma_improvement_db;
      ++runs;

      for (const auto& [iter, value] : eval.conventional.per_iteration)
        csv << scene.seed << ',' << scene.target_direction_deg
            << ",conventional," << iter << ',' << value << '\n';
      for (const auto& [iter, value] : eval.proposed.per_iteration)
        csv << scene.seed << ',' << scene.target_direction_deg << ",proposed,"
            << iter << ',' << value << '\n';
      csv << scene.seed << ',' << scene.target_direction_deg << ",ilrma,0,"
          << eval.ilrma_improvement_db << '\n';
    }
  }

  std::cout << "SDR improvement [dB], mean over " << runs
            << " runs (peak / final)\n";
  std::cout << "  ilrma            " << ilrma_score / runs << " / -\n";
  std::cout << "  conventional     " << conv_peak / runs << " / "
            << conv_final / runs << '\n';
  std::cout << "  proposed         " << prop_peak / runs << " / "
            << prop_final / runs << '\n';

  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) throw ConfigError("cannot create CSV file: " + csv_path);
    out << csv.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blind speech extraction under diffuse noise"};
  app.require_subcommand(1);

  PipelineOptions opts;
  std::string input_path, output_path, report_path, diagnostics_path;
  int channel = -1;
  CLI::App* extract_cmd =
      app.add_subcommand("extract", "extract the target from a mixture WAV");
  extract_cmd->add_option("input", input_path, "multichannel mixture WAV")
      ->required();
  extract_cmd->add_option("--output", output_path, "output WAV path")
      ->required();
  add_pipeline_options(extract_cmd, opts);
  extract_cmd->add_option("--report", report_path,
                          "JSON run report path (default: stdout)");
  extract_cmd->add_option("--diagnostics", diagnostics_path,
                          "per-iteration diagnostics CSV");
  extract_cmd->add_option(
      "--channel", channel,
      "write only this channel of the extracted image (default: all)");

  std::string scene_path, out_dir;
  CLI::App* simulate_cmd =
      app.add_subcommand("simulate", "render a synthetic diffuse-noise scene");
  simulate_cmd->add_option("scene", scene_path, "scene config file")
      ->required();
  simulate_cmd->add_option("--output", out_dir, "output directory")
      ->required();

  std::string estimate_path, reference_path, eval_csv;
  CLI::App* evaluate_cmd = app.add_subcommand(
      "evaluate", "SDR of an estimate against a reference (file or directory)");
  evaluate_cmd->add_option("estimate", estimate_path, "estimate WAV or dir")
      ->required();
  evaluate_cmd->add_option("reference", reference_path, "reference WAV or dir")
      ->required();
  evaluate_cmd->add_option("--output", eval_csv, "CSV path (default: stdout)");

  std::string grid_path, bench_csv;
  CLI::App* bench_cmd = app.add_subcommand(
      "bench", "compare both variants and the preprocessing baseline");
  bench_cmd->add_option("--config", grid_path, "grid config file");
  bench_cmd->add_option("--output", bench_csv, "per-iteration CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (extract_cmd->parsed())
      return cmd_extract(opts, input_path, output_path, report_path,
                         diagnostics_path, channel);
    if (simulate_cmd->parsed()) return cmd_simulate(scene_path, out_dir);
    if (evaluate_cmd->parsed())
      return cmd_evaluate(estimate_path, reference_path, eval_csv);
    if (bench_cmd->parsed()) return cmd_bench(grid_path, bench_csv);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
