#include "cli.hpp"
#include "run_config.hpp"

#include "spreadcast/backtest.hpp"
#include "spreadcast/csv.hpp"
#include "spreadcast/data.hpp"
#include "spreadcast/error.hpp"
#include "spreadcast/info_select.hpp"
#include "spreadcast/pipeline.hpp"
#include "spreadcast/synthetic.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <deque>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

namespace spreadcast::cli {

namespace fs = std::filesystem;

namespace {

// Writes to a sibling temporary file and renames it into place, so a
// failed command never leaves a truncated artifact behind.
void write_atomically(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  fs::path tmp = path;
  tmp += ".tmp";
  try {
    {
      std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
      require(file.good(), ErrorKind::Io, "cannot open " + tmp.string() + " for writing");
      body(file);
      file.flush();
      require(file.good(), ErrorKind::Io, "write to " + tmp.string() + " failed");
    }
    fs::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
}

fs::path output_path(const RunConfig& c, const char* fallback) { return c.out ? *c.out : fs::path(fallback); }

data::SeriesTable load_table(const RunConfig& c) {
  require(!c.data_paths.empty(), ErrorKind::InvalidArgument, "no input data: pass --data FILE or set data.paths");
  std::vector<data::SeriesTable> tables;
  for (const auto& p : c.data_paths) tables.push_back(data::ingest_csv(p, c.date_column));
  return tables.size() == 1 ? std::move(tables.front()) : data::merge(tables);
}

data::Dataset load_dataset(const RunConfig& c) {
  return data::to_dataset(data::fill_missing(load_table(c)), c.target_column);
}

info::WarningSink warnings(std::ostream& err) {
  return [&err](const std::string& msg) { err << "warning: " << msg << '\n'; };
}

// Commands ----------------------------------------------------------------------

void cmd_ingest(const RunConfig& c, std::ostream& out) {
  auto table = load_table(c);
  if (c.difference) table = data::add_differences(table, {c.target_column});
  table = data::fill_missing(table);
  const auto path = output_path(c, "merged.csv");
  write_atomically(path, [&](std::ostream& f) { data::write_csv(table, f, c.date_column); });
  out << "wrote " << table.rows() << " months x " << table.cols() << " series to " << path.string() << '\n';
}

void cmd_select(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto ds = load_dataset(c);
  const auto ranking = info::rank_features(ds, warnings(err));
  const auto k = std::min(c.k, ranking.size());
  const auto path = output_path(c, "ranking.csv");
  write_atomically(path, [&](std::ostream& f) {
    f << "feature_name,mi_nats,rank,selected\n";
    for (std::size_t i = 0; i < ranking.size(); ++i) {
      const auto& e = ranking.entries[i];
      f << csv::escape(e.feature_name) << ',' << csv::format_number(e.mi_nats) << ',' << i + 1 << ','
        << (i < k ? "yes" : "no") << '\n';
    }
  });
  out << "ranked " << ranking.size() << " features, selected " << k << ", wrote " << path.string() << '\n';
}

void cmd_train(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto ds = load_dataset(c);
  const auto options = c.feature_options();
  const auto plan = eval::plan_features(ds, options, warnings(err));
  const auto pipeline = eval::fit_pipeline(ds, ds.rows(), plan, c.method, c.model_config(), options);
  const auto path = output_path(c, "model.txt");
  write_atomically(path, [&](std::ostream& f) { pipeline.save(f); });
  out << "trained " << eval::to_string(c.method) << " on " << ds.rows() - plan.window << " rows, "
      << plan.features.size() << " features + " << preprocess::rolling_feature_name(ds.target_name())
      << " (window " << plan.window << "), wrote " << path.string() << '\n';
}

void cmd_evaluate(const RunConfig& c, std::ostream& out) {
  const auto ds = load_dataset(c);
  const auto result = eval::run_backtest(ds, c.backtest_config());
  const auto dir = output_path(c, "report");
  fs::create_directories(dir);
  const auto text = result.report.to_text();
  write_atomically(dir / "report.txt", [&](std::ostream& f) { f << text; });
  write_atomically(dir / "report.csv", [&](std::ostream& f) { result.report.to_csv(f); });
  write_atomically(dir / "predictions.csv",
                   [&](std::ostream& f) { eval::write_predictions_csv(result.predictions, f); });
  out << text << "\nwrote report.txt, report.csv and predictions.csv to " << dir.string() << '\n';
}

void require_complete_latest_row(const data::SeriesTable& raw, const RunConfig& c,
                                 const std::vector<std::string>& features) {
  require(raw.rows() >= 1, ErrorKind::InvalidArgument, "forecast: no data rows");
  const auto last = raw.rows() - 1;
  std::vector<std::string> needed = features;
  needed.push_back(c.target_column);
  for (const auto& name : needed) {
    const auto col = raw.find(name);
    require(col.has_value(), ErrorKind::InvalidArgument, "forecast: dataset lacks column '" + name + "'");
    require(!data::is_missing(raw.column(*col)[last]), ErrorKind::MissingValues,
            "forecast: latest row " + raw.dates()[last].to_string() + " is incomplete, '" + name + "' is missing");
  }
}

void cmd_forecast(const RunConfig& c, const std::optional<fs::path>& model_path, std::ostream& out,
                  std::ostream& err) {
  const auto raw = load_table(c);
  const auto ds = data::to_dataset(data::fill_missing(raw), c.target_column);

  std::optional<eval::TrainedPipeline> pipeline;
  if (model_path) {
    std::ifstream in(*model_path, std::ios::binary);
    require(in.good(), ErrorKind::Io, "cannot open model " + model_path->string());
    try {
      pipeline = eval::TrainedPipeline::load(in);
    } catch (const Error& e) {
      fail(e.kind(), model_path->string() + ": " + e.what());
    }
    require(pipeline->target_name() == c.target_column, ErrorKind::InvalidArgument,
            "model predicts '" + pipeline->target_name() + "' but the target column is '" + c.target_column + "'");
    if (c.refit) {
      eval::FeaturePlan plan{pipeline->features(), pipeline->window(), std::nullopt, std::nullopt};
      auto options = c.feature_options();
      options.whiten = pipeline->transform().whitens();
      if (options.whiten) options.epsilon = pipeline->transform().whitening().epsilon;
      pipeline = eval::fit_pipeline(ds, ds.rows(), plan, pipeline->method(), c.model_config(), options);
    }
  } else {
    const auto options = c.feature_options();
    const auto plan = eval::plan_features(ds, options, warnings(err));
    pipeline = eval::fit_pipeline(ds, ds.rows(), plan, c.method, c.model_config(), options);
  }
  require_complete_latest_row(raw, c, pipeline->features());

  const auto points = eval::forecast_next(ds, *pipeline, c.horizon);
  const auto path = output_path(c, "forecast.csv");
  write_atomically(path, [&](std::ostream& f) {
    f << "date,spread_bps\n";
    for (const auto& p : points) f << p.month.to_string() << ',' << csv::format_number(p.value) << '\n';
  });
  for (const auto& p : points) out << p.month.to_string() << "  " << csv::format_number(p.value) << '\n';
  out << "wrote " << points.size() << " forecast months to " << path.string() << '\n';
}

void cmd_synth(const RunConfig& c, std::ostream& out) {
  auto config = c.synth;
  config.seed = c.seed;
  const auto ds = synthetic::generate_synthetic(config);
  const auto path = output_path(c, "synthetic.csv");
  write_atomically(path, [&](std::ostream& f) { data::write_csv(ds.to_table(), f, "date"); });
  out << "wrote " << ds.rows() << " months, " << ds.cols() << " features + " << ds.target_name() << " to "
      << path.string() << '\n';
}

// Flag plumbing ---------------------------------------------------------------

// A flag that maps onto one config key. Values are applied after the
// config file so flags win.
struct Setting {
  CLI::Option* option = nullptr;
  std::string section;
  std::string key;
  std::string value;
  std::string fixed_value;  // for switches
};

class Flags {
 public:
  void value(CLI::App* app, const std::string& name, const std::string& section, const std::string& key,
             const std::string& help) {
    auto& s = settings_.emplace_back();
    s.section = section;
    s.key = key;
    s.option = app->add_option(name, s.value, help);
  }

  void toggle(CLI::App* app, const std::string& name, const std::string& section, const std::string& key,
              const std::string& fixed, const std::string& help) {
    auto& s = settings_.emplace_back();
    s.section = section;
    s.key = key;
    s.fixed_value = fixed;
    s.option = app->add_flag(name, help);
  }

  void apply(RunConfig& c) const {
    for (const auto& s : settings_) {
      if (s.option->count() == 0) continue;
      try {
        c.set(s.section, s.key, s.fixed_value.empty() ? s.value : s.fixed_value);
      } catch (const Error& e) {
        fail(e.kind(), s.option->get_name() + ": " + e.what());
      }
    }
  }

 private:
  std::deque<Setting> settings_;
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"spreadcast: credit-spread forecasting with mutual-information selection and stacking"};
  app.name("spreadcast");
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string seed_text;
  std::string out_text;
  auto* config_opt = app.add_option("--config", config_path, "INI config file; flags override its values");
  auto* seed_opt = app.add_option("--seed", seed_text, "Root seed; every random component derives from it");
  auto* out_opt = app.add_option("--out", out_text, "Output file (evaluate: output directory)");

  Flags flags;
  std::vector<std::string> data_files;
  std::vector<std::string> params;
  std::string model_file;

  auto add_data_flags = [&](CLI::App* sub) {
    sub->add_option("--data", data_files, "Input CSV (repeatable; several files are merged by month)");
    flags.value(sub, "--date-column", "data", "date_column", "Name of the date column (default date)");
    flags.value(sub, "--target", "data", "target", "Target column (default SPREAD)");
  };
  auto add_model_flags = [&](CLI::App* sub) {
    flags.value(sub, "--k", "select", "k", "Number of features kept by MI selection (default 20)");
    flags.toggle(sub, "--no-select", "select", "enabled", "false", "Keep every feature");
    flags.value(sub, "--window", "preprocess", "window", "Rolling-average window in months (default: search 1-12)");
    flags.value(sub, "--window-learner", "preprocess", "window_learner",
                "Learner used by the window search (default kernel_ridge)");
    flags.value(sub, "--epsilon", "preprocess", "epsilon", "Whitening regulariser (default 1e-8)");
    flags.toggle(sub, "--no-whiten", "preprocess", "whiten", "false", "Skip PCA whitening (z-score only)");
    flags.value(sub, "--mode", "stacking", "mode", "Stacking mode: insample or kfold (default insample)");
    flags.value(sub, "--folds", "stacking", "folds", "Folds for kfold stacking (default 5)");
    flags.value(sub, "--base", "stacking", "base", "Comma-separated base learners (default mlp,random_forest,knn)");
    flags.value(sub, "--meta", "stacking", "meta", "Meta learner (default kernel_ridge)");
    sub->add_option("--param", params, "Learner hyperparameter, e.g. mlp.epochs=200 (repeatable)");
  };

  auto* ingest = app.add_subcommand("ingest", "Merge CSV files by month, add differences, fill gaps");
  add_data_flags(ingest);
  flags.toggle(ingest, "--no-diff", "data", "difference", "false", "Do not append d_<name> difference columns");

  auto* select = app.add_subcommand("select", "Rank features by mutual information with the target");
  add_data_flags(select);
  flags.value(select, "--k", "select", "k", "Number of features marked selected (default 20)");

  auto* train = app.add_subcommand("train", "Fit a pipeline on every row and save it");
  add_data_flags(train);
  add_model_flags(train);
  flags.value(train, "--method", "train", "method",
              "ols, knn, kernel_ridge, random_forest or stacking (default stacking)");

  auto* evaluate = app.add_subcommand("evaluate", "Chronological backtest of every method with and without selection");
  add_data_flags(evaluate);
  add_model_flags(evaluate);
  flags.value(evaluate, "--train-fraction", "split", "train_fraction", "Leading share of rows used to train (default 0.7)");

  auto* forecast = app.add_subcommand("forecast", "Predict the months after the last observation");
  add_data_flags(forecast);
  add_model_flags(forecast);
  forecast->add_option("--model", model_file, "Saved pipeline; without it a pipeline is trained on --data");
  flags.value(forecast, "--horizon", "forecast", "horizon", "Months to forecast (default 1)");
  flags.toggle(forecast, "--refit", "forecast", "refit", "true",
               "Refit the saved pipeline's method, features and window on --data before forecasting");
  flags.value(forecast, "--method", "train", "method", "Method when training without --model (default stacking)");

  auto* synth = app.add_subcommand("synth", "Write a synthetic benchmark dataset");
  flags.value(synth, "--n", "synth", "n", "Months (default 600)");
  flags.value(synth, "--d", "synth", "d", "Features (default 40)");
  flags.value(synth, "--noise", "synth", "noise", "Noise standard deviation (default 0.3)");
  flags.value(synth, "--recipe", "synth", "recipe", "nonlinear or linear (default nonlinear)");

  for (auto* sub : {ingest, select, train, evaluate, forecast, synth}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    RunConfig c;
    if (config_opt->count() > 0) c.load_file(config_path);
    if (seed_opt->count() > 0) c.set("run", "seed", seed_text);
    if (out_opt->count() > 0) c.set("run", "out", out_text);
    flags.apply(c);
    if (!data_files.empty()) c.data_paths.assign(data_files.begin(), data_files.end());
    for (const auto& p : params) {
      const auto dot = p.find('.');
      const auto eq = p.find('=');
      require(dot != std::string::npos && eq != std::string::npos && dot < eq, ErrorKind::InvalidArgument,
              "--param expects learner.key=value, got '" + p + "'");
      const auto learner = p.substr(0, dot);
      require(learners::parse_kind(learner).has_value(), ErrorKind::InvalidArgument,
              "--param: unknown learner '" + learner + "'");
      c.set(learner, p.substr(dot + 1, eq - dot - 1), p.substr(eq + 1));
    }

    if (ingest->parsed()) cmd_ingest(c, out);
    else if (select->parsed()) cmd_select(c, out, err);
    else if (train->parsed()) cmd_train(c, out, err);
    else if (evaluate->parsed()) cmd_evaluate(c, out);
    else if (forecast->parsed())
      cmd_forecast(c, model_file.empty() ? std::nullopt : std::optional<fs::path>(model_file), out, err);
    else if (synth->parsed()) cmd_synth(c, out);
    return 0;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return 1;
}

}  // namespace spreadcast::cli
