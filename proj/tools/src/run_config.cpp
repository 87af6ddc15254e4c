#include "run_config.hpp"

#include "spreadcast/csv.hpp"
#include "spreadcast/error.hpp"
#include "spreadcast/random.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>

namespace spreadcast::cli {

using learners::LearnerKind;

namespace {

std::string where(const std::string& section, const std::string& key) { return section + "." + key; }

template <typename T>
T parse_int(const std::string& section, const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  require(ec == std::errc() && ptr == end, ErrorKind::InvalidArgument,
          where(section, key) + ": expected an integer, got '" + value + "'");
  return out;
}

double parse_real(const std::string& section, const std::string& key, const std::string& value) {
  const auto v = csv::parse_number(value);
  require(v.has_value(), ErrorKind::InvalidArgument, where(section, key) + ": expected a number, got '" + value + "'");
  return *v;
}

bool parse_bool(const std::string& section, const std::string& key, const std::string& value) {
  if (value == "true" || value == "yes" || value == "on" || value == "1") return true;
  if (value == "false" || value == "no" || value == "off" || value == "0") return false;
  fail(ErrorKind::InvalidArgument, where(section, key) + ": expected true or false, got '" + value + "'");
}

LearnerKind parse_learner(const std::string& section, const std::string& key, const std::string& value) {
  const auto kind = learners::parse_kind(value);
  require(kind.has_value(), ErrorKind::InvalidArgument, where(section, key) + ": unknown learner '" + value + "'");
  return *kind;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  for (auto& item : csv::split_line(value))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

void RunConfig::set(const std::string& section, const std::string& key, const std::string& value) {
  const auto unknown = [&] {
    fail(ErrorKind::InvalidArgument, "unknown setting '" + where(section, key) + "'");
  };
  if (section == "data") {
    if (key == "paths") {
      data_paths.clear();
      for (auto& p : split_list(value)) data_paths.emplace_back(p);
    } else if (key == "date_column") {
      date_column = value;
    } else if (key == "target") {
      target_column = value;
    } else if (key == "difference") {
      difference = parse_bool(section, key, value);
    } else {
      unknown();
    }
  } else if (section == "select") {
    if (key == "k") {
      const auto v = parse_int<long>(section, key, value);
      require(v >= 1, ErrorKind::InvalidArgument, "select.k must be >= 1");
      k = static_cast<std::size_t>(v);
    } else if (key == "enabled") {
      select = parse_bool(section, key, value);
    } else {
      unknown();
    }
  } else if (section == "split") {
    if (key != "train_fraction") unknown();
    train_fraction = data::SplitSpec(parse_real(section, key, value)).train_fraction();
  } else if (section == "preprocess") {
    if (key == "window") {
      if (value == "auto") {
        window.reset();
      } else {
        window = parse_int<int>(section, key, value);
        require(*window >= 1, ErrorKind::InvalidArgument, "preprocess.window must be >= 1 or auto");
      }
    } else if (key == "min_window") {
      min_window = parse_int<int>(section, key, value);
    } else if (key == "max_window") {
      max_window = parse_int<int>(section, key, value);
    } else if (key == "window_learner") {
      window_learner = parse_learner(section, key, value);
    } else if (key == "whiten") {
      whiten = parse_bool(section, key, value);
    } else if (key == "epsilon") {
      epsilon = parse_real(section, key, value);
      require(epsilon >= 0.0, ErrorKind::InvalidArgument, "preprocess.epsilon must be non-negative");
    } else {
      unknown();
    }
  } else if (section == "stacking") {
    if (key == "mode") {
      const auto m = stacking::parse_mode(value);
      require(m.has_value(), ErrorKind::InvalidArgument,
              "stacking.mode: expected insample or kfold, got '" + value + "'");
      mode = *m;
    } else if (key == "folds") {
      folds = parse_int<int>(section, key, value);
      require(folds >= 2, ErrorKind::InvalidArgument, "stacking.folds must be >= 2");
    } else if (key == "base") {
      base.clear();
      for (auto& name : split_list(value)) base.push_back(parse_learner(section, key, name));
      require(!base.empty(), ErrorKind::InvalidArgument, "stacking.base must list at least one learner");
    } else if (key == "meta") {
      meta = parse_learner(section, key, value);
    } else {
      unknown();
    }
  } else if (const auto kind = learners::parse_kind(section)) {
    // Validate now so a typo is reported against the config key.
    learners::RegressorSpec::defaults(*kind).with({{key, value}}).validate();
    overrides[*kind][key] = value;
  } else if (section == "train") {
    if (key != "method") unknown();
    const auto m = eval::parse_method(value);
    require(m.has_value(), ErrorKind::InvalidArgument, "train.method: unknown method '" + value + "'");
    method = *m;
  } else if (section == "forecast") {
    if (key == "horizon") {
      horizon = parse_int<int>(section, key, value);
      require(horizon >= 1, ErrorKind::InvalidArgument, "forecast.horizon must be >= 1");
    } else if (key == "refit") {
      refit = parse_bool(section, key, value);
    } else {
      unknown();
    }
  } else if (section == "synth") {
    if (key == "n") {
      synth.n = parse_int<Index>(section, key, value);
    } else if (key == "d") {
      synth.d = parse_int<Index>(section, key, value);
    } else if (key == "noise") {
      synth.noise = parse_real(section, key, value);
    } else if (key == "recipe") {
      const auto r = synthetic::parse_recipe(value);
      require(r.has_value(), ErrorKind::InvalidArgument,
              "synth.recipe: expected nonlinear or linear, got '" + value + "'");
      synth.recipe = *r;
    } else {
      unknown();
    }
  } else if (section == "run") {
    if (key == "seed") {
      seed = parse_int<std::uint64_t>(section, key, value);
    } else if (key == "out") {
      out = value;
    } else {
      unknown();
    }
  } else {
    fail(ErrorKind::InvalidArgument, "unknown config section [" + section + "]");
  }
}

void RunConfig::load_file(const std::filesystem::path& path) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorKind::Parse, "config " + path.string() + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  for (const auto& [section, entries] : tree) {
    require(entries.data().empty(), ErrorKind::Parse,
            "config " + path.string() + ": key '" + section + "' must belong to a section");
    for (const auto& [key, value] : entries) {
      try {
        set(section, key, value.data());
      } catch (const Error& e) {
        fail(e.kind(), "config " + path.string() + ": " + e.what());
      }
    }
  }
}

eval::ModelConfig RunConfig::model_config() const {
  const auto spec_for = [&](LearnerKind kind, std::uint64_t spec_seed) {
    auto spec = learners::RegressorSpec::defaults(kind, spec_seed);
    if (const auto it = overrides.find(kind); it != overrides.end()) spec = spec.with(it->second);
    spec.validate();
    return spec;
  };

  eval::ModelConfig c;
  for (auto kind : learners::all_kinds()) c.learners.emplace(kind, spec_for(kind, derive_seed(seed, learners::to_string(kind))));

  // Same seeds as stacking::default_base_specs for the default base set.
  const auto stack_seed = derive_seed(seed, "stacking");
  for (std::size_t i = 0; i < base.size(); ++i) {
    const auto name = learners::to_string(base[i]);
    const bool repeated = std::find(base.begin(), base.begin() + static_cast<long>(i), base[i]) !=
                          base.begin() + static_cast<long>(i);
    const auto s = repeated ? derive_seed(derive_seed(stack_seed, name), static_cast<std::uint64_t>(i))
                            : derive_seed(stack_seed, name);
    c.base.push_back(spec_for(base[i], s));
  }
  c.meta = spec_for(meta, derive_seed(stack_seed, "meta"));
  c.mode = mode;
  c.folds = folds;
  return c;
}

eval::FeatureOptions RunConfig::feature_options() const {
  eval::FeatureOptions o;
  if (select) o.top_k = k;
  o.window = window;
  o.search.min_window = min_window;
  o.search.max_window = max_window;
  o.search.learner = model_config().spec(window_learner);
  o.whiten = whiten;
  o.epsilon = epsilon;
  return o;
}

eval::BacktestConfig RunConfig::backtest_config() const {
  eval::BacktestConfig b;
  b.split = data::SplitSpec(train_fraction);
  b.top_k = k;
  b.features = feature_options();
  b.models = model_config();
  b.seed = seed;
  return b;
}

}  // namespace spreadcast::cli
