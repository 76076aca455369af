#include "commands.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ifdpg/error.hpp"
#include "ifdpg/io/bundle.hpp"
#include "ifdpg/io/csv.hpp"
#include "ifdpg/io/json.hpp"
#include "ifdpg/pipeline.hpp"
#include "ifdpg/repro.hpp"
#include "ifdpg/synth.hpp"

namespace ifdpg::cli {

namespace fs = std::filesystem;

namespace {

struct ForestFlags {
  std::size_t trees = 200;
  std::size_t subsample = 256;
  std::uint64_t seed = 0;
  std::optional<double> threshold;
  std::optional<double> contamination;
  bool no_leaf_adjustment = false;

  ForestParams params() const {
    ForestParams p;
    p.n_trees = trees;
    p.max_subsample = subsample;
    p.seed = seed;
    p.leaf_adjustment = !no_leaf_adjustment;
    if (contamination) p.label_rule = Contamination{*contamination};
    if (threshold) p.label_rule = ScoreThreshold{*threshold};
    p.validate();
    return p;
  }
};

struct CsvFlags {
  bool no_header = false;
  std::optional<std::string> label_column;

  io::CsvOptions options() const {
    io::CsvOptions o;
    if (no_header) o.has_header = false;
    o.label_column = label_column;
    return o;
  }
};

void add_forest_flags(CLI::App& cmd, ForestFlags& f) {
  cmd.add_option("--trees", f.trees, "Number of isolation trees")->capture_default_str()->check(CLI::PositiveNumber);
  cmd.add_option("--subsample", f.subsample, "Maximum subsample size per tree")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
  cmd.add_option("--seed", f.seed, "Forest seed; tree t uses seed + t")->capture_default_str();
  auto* threshold = cmd.add_option("--threshold", f.threshold, "Label score >= T as outlier (default 0.5)");
  auto* contamination =
      cmd.add_option("--contamination", f.contamination, "Label the top fraction of scores as outliers");
  threshold->excludes(contamination);
  contamination->excludes(threshold);
  cmd.add_flag("--no-leaf-adjustment", f.no_leaf_adjustment, "Do not add c(leaf size) to path lengths");
}

void add_csv_flags(CLI::App& cmd, CsvFlags& c) {
  cmd.add_flag("--no-header", c.no_header, "Treat the first CSV row as data");
  cmd.add_option("--label-column", c.label_column,
                 "Ground-truth label column (name or zero-based index); excluded from features");
}

std::span<const std::string> display_names(const Dataset& data) {
  return data.has_named_features() ? std::span<const std::string>(data.feature_names())
                                   : std::span<const std::string>();
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const std::string& w : warnings) err << "warning: " << w << "\n";
}

template <typename Writer>
void write_text(const fs::path& path, Writer&& writer) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw InputError(path.string() + ": cannot open for writing");
  writer(file);
  file.flush();
  if (!file) throw InputError(path.string() + ": write failed");
}

std::vector<double> parse_list(const std::string& text, std::string_view flag) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc{} || end != item.data() + item.size())
      throw InputError(std::string(flag) + ": cannot parse '" + item + "'");
    values.push_back(v);
  }
  return values;
}

// "SAMPLE:F0+5,F3-5" where SAMPLE is a row index or "random".
InjectionSpec parse_injection(const std::string& text) {
  const auto bad = [&](const std::string& why) {
    return InputError("--inject '" + text + "': " + why);
  };
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw bad("expected SAMPLE:SHIFTS");
  InjectionSpec spec;
  const std::string sample = text.substr(0, colon);
  if (sample == "random") {
    spec.sample = RandomSample{};
  } else {
    std::size_t index = 0;
    const auto [end, ec] = std::from_chars(sample.data(), sample.data() + sample.size(), index);
    if (ec != std::errc{} || end != sample.data() + sample.size()) throw bad("sample must be an index or 'random'");
    spec.sample = index;
  }
  std::stringstream stream(text.substr(colon + 1));
  std::string shift;
  while (std::getline(stream, shift, ',')) {
    std::string_view s = shift;
    if (s.starts_with('F') || s.starts_with('f')) s.remove_prefix(1);
    const auto op = s.find_first_of("+-");
    if (op == std::string_view::npos || op == 0) throw bad("shift '" + shift + "' must look like F2+5");
    std::size_t feature = 0;
    double factor = 0.0;
    const auto f = std::from_chars(s.data(), s.data() + op, feature);
    const auto k = std::from_chars(s.data() + op + 1, s.data() + s.size(), factor);
    if (f.ec != std::errc{} || f.ptr != s.data() + op || k.ec != std::errc{} || k.ptr != s.data() + s.size())
      throw bad("shift '" + shift + "' must look like F2+5");
    spec.features.push_back(feature);
    spec.factors.push_back(factor);
    spec.directions.push_back(s[op] == '+' ? Direction::Up : Direction::Down);
  }
  if (spec.features.empty()) throw bad("no shifts given");
  return spec;
}

fs::path log_path_for(const fs::path& data_path) {
  fs::path log = data_path;
  log.replace_filename(data_path.stem().string() + ".injections.csv");
  return log;
}

// --- gen -------------------------------------------------------------------

struct GenFlags {
  std::string fixture;
  std::optional<std::uint64_t> seed;
  std::size_t samples = 200;
  std::size_t features = 6;
  std::string means;
  std::string stds;
  std::vector<std::string> injections;
  std::string out = "data.csv";
};

int cmd_gen(const GenFlags& g, std::ostream& out) {
  SynthConfig config;
  if (g.fixture == "one") {
    config = g.seed ? fixture_config_one(*g.seed) : fixture_config_one();
  } else if (g.fixture == "two") {
    config = g.seed ? fixture_config_two(*g.seed) : fixture_config_two();
  } else {
    config.n_samples = g.samples;
    config.n_features = g.features;
    if (!g.means.empty()) config.means = parse_list(g.means, "--means");
    if (!g.stds.empty()) config.stds = parse_list(g.stds, "--stds");
    for (const std::string& text : g.injections) config.injections.push_back(parse_injection(text));
    config.seed = g.seed.value_or(0);
  }
  const SynthResult result = generate(config);

  const fs::path data_path = g.out;
  const fs::path log_path = log_path_for(data_path);
  io::write_csv(result.data, data_path);
  io::write_injection_log(result.log, log_path);

  std::size_t injected = 0;
  for (const Label l : *result.data.labels()) injected += l == Label::Outlier;
  out << "wrote " << data_path.string() << " (" << result.data.n_samples() << " samples, "
      << result.data.n_features() << " features, " << injected << " injected) and " << log_path.string() << "\n";
  return kOk;
}

// --- train / score ---------------------------------------------------------

struct TrainFlags {
  std::string input;
  std::string out = "model.json";
  ForestFlags forest;
  CsvFlags csv;
};

int cmd_train(const TrainFlags& t, std::ostream& out, std::ostream& err) {
  const ForestParams params = t.forest.params();
  const Dataset data = io::read_csv(t.input, t.csv.options());
  const ForestModel model = fit(data, params);
  print_warnings(model.warnings, err);
  write_text(t.out, [&](std::ostream& file) { file << io::dump(io::model_to_json(model)); });

  std::size_t outliers = 0;
  for (const Label l : model.labels) outliers += l == Label::Outlier;
  out << "trained " << model.trees.size() << " trees on " << model.n_train << " samples (subsample "
      << model.subsample_size << ", max depth " << model.max_depth() << "), " << outliers << " outliers under "
      << describe(params.label_rule) << "; wrote " << t.out << "\n";
  return kOk;
}

struct ScoreFlags {
  std::string model;
  std::string input;
  std::optional<std::string> out;
  bool json = false;
  CsvFlags csv;
};

int cmd_score(const ScoreFlags& s, std::ostream& out) {
  nlohmann::json document;
  {
    std::ifstream file(s.model, std::ios::binary);
    if (!file) throw InputError(s.model + ": cannot open file");
    try {
      document = nlohmann::json::parse(file);
    } catch (const nlohmann::json::exception& e) {
      throw InputError(s.model + ": " + e.what());
    }
  }
  const ForestModel model = io::model_from_json(document);
  const Dataset data = io::read_csv(s.input, s.csv.options());
  if (data.n_features() != model.n_features)
    throw InputError(s.input + ": has " + std::to_string(data.n_features()) + " features, model expects " +
                     std::to_string(model.n_features));
  const std::vector<double> scores = score_samples(model, data);
  const std::vector<Label> labels = label_scores(scores, model.params.label_rule);

  const auto emit = [&](std::ostream& stream) {
    if (s.json) {
      nlohmann::json rows = nlohmann::json::array();
      for (std::size_t i = 0; i < scores.size(); ++i)
        rows.push_back({{"sample", i}, {"score", scores[i]}, {"label", to_string(labels[i])}});
      stream << io::dump({{"schema_version", io::kSchemaVersion}, {"scores", rows}});
      return;
    }
    stream << "sample,score,label\n";
    for (std::size_t i = 0; i < scores.size(); ++i)
      stream << i << ',' << io::format_double(scores[i]) << ',' << to_string(labels[i]) << '\n';
  };
  if (s.out) {
    write_text(*s.out, emit);
  } else {
    emit(out);
  }
  return kOk;
}

// --- explain ---------------------------------------------------------------

struct ExplainFlags {
  std::string input;
  std::string out = "explanation";
  bool json = false;
  bool show_source = false;
  ForestFlags forest;
  CsvFlags csv;
};

int cmd_explain(const ExplainFlags& e, std::ostream& out, std::ostream& err) {
  const ForestParams params = e.forest.params();
  const Dataset data = io::read_csv(e.input, e.csv.options());
  const Explanation result = explain(data, params);
  print_warnings(result.model.warnings, err);

  io::BundleInfo info;
  info.input_hash = io::sha256_file(e.input);
  info.input_name = fs::path(e.input).filename().string();
  info.style.show_source = e.show_source;
  io::write_explanation_bundle(e.out, result.model, result.graph, result.report, info);

  out << rank_report(result.report, e.json ? ReportFormat::Json : ReportFormat::Table, display_names(data));
  return kOk;
}

// --- repro -----------------------------------------------------------------

struct ReproFlags {
  std::string fixture;
  std::string dataset;
  std::size_t seeds = 20;
  std::uint64_t seed = 0;
  std::size_t trees = 200;
  CsvFlags csv;
};

int cmd_repro(const ReproFlags& r, std::ostream& out) {
  Experiment experiment = [&] {
    if (r.fixture == "one") return fixture_one_experiment();
    if (r.fixture == "two") return fixture_two_experiment();
    return annthyroid_experiment(io::read_csv(r.dataset, r.csv.options()));
  }();
  experiment.n_trees = r.trees;
  const ReproResult result = run_repro(experiment, r.seeds, r.seed);
  out << format_repro(experiment, result);
  return result.pass() ? kOk : kChecksFailed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Isolation Forest training and Decision Predicate Graph explanations", "ifdpg"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(io::kToolVersion));

  GenFlags gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic Gaussian dataset with injected outliers");
  auto* fixture = gen_cmd->add_option("--fixture", gen.fixture, "Reference fixture")->check(CLI::IsMember({"one", "two"}));
  gen_cmd->add_option("--seed", gen.seed, "Data seed (fixtures have their own default)");
  std::vector<CLI::Option*> custom = {
      gen_cmd->add_option("--samples", gen.samples, "Number of samples")->capture_default_str(),
      gen_cmd->add_option("--features", gen.features, "Number of features")->capture_default_str(),
      gen_cmd->add_option("--means", gen.means, "Comma-separated per-feature means (default 0)"),
      gen_cmd->add_option("--stds", gen.stds, "Comma-separated per-feature standard deviations (default 1)"),
      gen_cmd->add_option("--inject", gen.injections, "SAMPLE:F0+5,F3-5 with SAMPLE an index or 'random'; repeatable"),
  };
  for (CLI::Option* option : custom) fixture->excludes(option);
  gen_cmd->add_option("--out", gen.out, "Data CSV; the injection log goes next to it as <stem>.injections.csv")
      ->capture_default_str();

  TrainFlags train;
  auto* train_cmd = app.add_subcommand("train", "Fit a forest and save the model as JSON");
  train_cmd->add_option("input", train.input, "Training CSV")->required();
  train_cmd->add_option("--out", train.out, "Model JSON path")->capture_default_str();
  add_forest_flags(*train_cmd, train.forest);
  add_csv_flags(*train_cmd, train.csv);

  ScoreFlags score;
  auto* score_cmd = app.add_subcommand("score", "Score and label a CSV with a saved model");
  score_cmd->add_option("model", score.model, "Model JSON")->required();
  score_cmd->add_option("input", score.input, "CSV to score")->required();
  score_cmd->add_option("--out", score.out, "Write scores here instead of stdout");
  score_cmd->add_flag("--json", score.json, "Machine-readable output");
  add_csv_flags(*score_cmd, score.csv);

  ExplainFlags ex;
  auto* explain_cmd = app.add_subcommand("explain", "Fit, build the predicate graph, score it and write a bundle");
  explain_cmd->add_option("input", ex.input, "Training CSV")->required();
  explain_cmd->add_option("--out", ex.out, "Bundle directory")->capture_default_str();
  explain_cmd->add_flag("--json", ex.json, "Print the IOP report as JSON");
  explain_cmd->add_flag("--show-source", ex.show_source, "Draw the virtual source node in graph.dot");
  add_forest_flags(*explain_cmd, ex.forest);
  add_csv_flags(*explain_cmd, ex.csv);

  ReproFlags repro;
  auto* repro_cmd = app.add_subcommand("repro", "Check the sign and rank pattern of a reference experiment");
  auto* source = repro_cmd->add_option_group("source", "Exactly one experiment");
  source->add_option("--fixture", repro.fixture, "Synthetic fixture")->check(CLI::IsMember({"one", "two"}));
  source->add_option("--dataset", repro.dataset, "Annthyroid CSV");
  source->require_option(1);
  repro_cmd->add_option("--seeds", repro.seeds, "Number of forest seeds")->capture_default_str()->check(CLI::PositiveNumber);
  repro_cmd->add_option("--seed", repro.seed, "First forest seed")->capture_default_str();
  repro_cmd->add_option("--trees", repro.trees, "Trees per forest")->capture_default_str()->check(CLI::PositiveNumber);
  add_csv_flags(*repro_cmd, repro.csv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen(gen, out);
    if (train_cmd->parsed()) return cmd_train(train, out, err);
    if (score_cmd->parsed()) return cmd_score(score, out);
    if (explain_cmd->parsed()) return cmd_explain(ex, out, err);
    return cmd_repro(repro, out);
  } catch (const PipelineError& e) {
    err << "error: " << e.what() << "\n";
    return kPipelineError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace ifdpg::cli
