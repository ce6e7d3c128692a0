#include "mbl/config_file.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mbl/catalog.hpp"

namespace mbl {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& text, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse number for '" + key + "': " + text);
  }
}

std::uint64_t parse_u64(const std::string& text, const std::string& key) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse integer for '" + key + "': " + text);
  }
}

// Flattens a bracketed (possibly nested) numeric array literal.
std::vector<double> parse_array_literal(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::size_t i = 0;
  int depth = 0;
  const auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  skip_ws();
  if (i >= text.size() || text[i] != '[') return parse_number_list(text);
  while (i < text.size()) {
    skip_ws();
    if (i >= text.size()) break;
    const char c = text[i];
    if (c == '[') {
      ++depth;
      ++i;
    } else if (c == ']') {
      --depth;
      ++i;
      if (depth < 0) throw std::invalid_argument("unbalanced ']' in " + key);
      if (depth == 0) break;
    } else if (c == ',') {
      ++i;
    } else {
      std::size_t len = 0;
      const double v = std::stod(text.substr(i), &len);
      if (len == 0) throw std::invalid_argument("bad number in array for " + key);
      out.push_back(v);
      i += len;
    }
  }
  if (depth != 0) throw std::invalid_argument("unbalanced brackets in " + key);
  return out;
}

}  // namespace

KeyValues parse_config_text(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  " is not 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument("empty key on config line " + std::to_string(lineno));
    }
    kv[key] = value;
  }
  return kv;
}

KeyValues parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(parse_double(item, "list"));
  }
  return out;
}

std::vector<std::vector<double>> parse_profile_text(const std::string& text) {
  std::vector<std::vector<double>> out;
  std::istringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) {
    out.push_back(parse_number_list(part));
  }
  return out;
}

Game game_from_file(const std::string& path) {
  const KeyValues kv = parse_config_file(path);
  const auto actions_it = kv.find("actions");
  if (actions_it == kv.end()) {
    throw std::invalid_argument("game file needs an 'actions' entry: " + path);
  }
  std::vector<int> counts;
  for (double v : parse_number_list(actions_it->second)) {
    counts.push_back(static_cast<int>(v));
  }
  if (auto it = kv.find("players"); it != kv.end()) {
    if (parse_u64(it->second, "players") != counts.size()) {
      throw std::invalid_argument("players entry disagrees with actions list");
    }
  }
  std::vector<std::vector<double>> tensors;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const std::string key = "payoffs." + std::to_string(i);
    const auto it = kv.find(key);
    if (it == kv.end()) throw std::invalid_argument("game file missing " + key);
    tensors.push_back(parse_array_literal(it->second, key));
  }
  return build_game(std::move(counts), std::move(tensors));
}

namespace {

void apply_learner_key(LearnerConfig& cfg, const std::string& field,
                       const std::string& value) {
  if (field == "algorithm") {
    cfg.algorithm = algorithm_from_string(value);
  } else if (field == "theta") {
    cfg.theta = parse_double(value, field);
  } else if (field == "M") {
    cfg.mutation = parse_double(value, field);
  } else if (field == "c") {
    cfg.bias = parse_number_list(value);
  } else if (field == "tau") {
    cfg.tau = parse_double(value, field);
  } else if (field == "beta") {
    cfg.beta = parse_double(value, field);
  } else if (field == "alpha0") {
    cfg.q_alpha0 = parse_double(value, field);
  } else if (field == "kappa") {
    cfg.q_kappa = parse_double(value, field);
  } else if (field == "delta_win") {
    cfg.delta_win = parse_double(value, field);
  } else if (field == "delta_lose") {
    cfg.delta_lose = parse_double(value, field);
  } else if (field == "faq_kappa") {
    cfg.faq_kappa = parse_double(value, field);
  } else {
    throw std::invalid_argument("unknown learner key: " + field);
  }
}

}  // namespace

LoadedExperiment load_experiment(const KeyValues& kv) {
  ExperimentConfig config;

  std::optional<Game> game;
  if (auto it = kv.find("game_file"); it != kv.end()) {
    config.game_file = it->second;
    game = game_from_file(it->second);
  } else if (auto git = kv.find("game"); git != kv.end()) {
    if (git->second.rfind("file:", 0) == 0) {
      config.game_file = git->second.substr(5);
      game = game_from_file(config.game_file);
    } else {
      config.game_name = git->second;
      game = catalog_game(git->second).game;
    }
  } else {
    throw std::invalid_argument("config needs a 'game' or 'game_file' entry");
  }

  if (auto it = kv.find("steps"); it != kv.end()) config.steps = parse_u64(it->second, "steps");
  if (auto it = kv.find("num_inits"); it != kv.end()) {
    config.num_inits = static_cast<int>(parse_u64(it->second, "num_inits"));
  }
  if (auto it = kv.find("seed"); it != kv.end()) {
    config.master_seed = parse_u64(it->second, "seed");
  }
  if (auto it = kv.find("record_stride"); it != kv.end()) {
    config.record_stride = parse_u64(it->second, "record_stride");
  }
  if (auto it = kv.find("rolling_window"); it != kv.end()) {
    config.rolling_window = parse_u64(it->second, "rolling_window");
  }
  if (auto it = kv.find("init_scheme"); it != kv.end()) {
    if (it->second == "dirichlet-uniform") {
      config.init_scheme = InitScheme::kDirichletUniform;
    } else if (it->second == "explicit-list") {
      config.init_scheme = InitScheme::kExplicitList;
    } else {
      throw std::invalid_argument("unknown init scheme: " + it->second);
    }
  }
  if (auto it = kv.find("projection"); it != kv.end()) {
    config.projection.clear();
    std::istringstream ss(it->second);
    std::string pair;
    while (std::getline(ss, pair, ',')) {
      const auto colon = pair.find(':');
      if (colon == std::string::npos) {
        throw std::invalid_argument("projection entries are player:action pairs");
      }
      config.projection.emplace_back(
          static_cast<int>(parse_u64(trim(pair.substr(0, colon)), "projection")),
          static_cast<int>(parse_u64(trim(pair.substr(colon + 1)), "projection")));
    }
  }

  const int np = game->num_players();
  LearnerConfig shared;
  bool any_shared = false;
  for (const auto& [key, value] : kv) {
    if (key.rfind("learner.all.", 0) == 0) {
      apply_learner_key(shared, key.substr(12), value);
      any_shared = true;
    }
  }
  config.learners.assign(np, shared);
  for (const auto& [key, value] : kv) {
    if (key.rfind("learner.", 0) != 0 || key.rfind("learner.all.", 0) == 0) continue;
    const auto rest = key.substr(8);
    const auto dot = rest.find('.');
    if (dot == std::string::npos) {
      throw std::invalid_argument("learner keys look like learner.<i>.<field>");
    }
    const int player = static_cast<int>(parse_u64(rest.substr(0, dot), key));
    if (player < 0 || player >= np) {
      throw std::invalid_argument("learner index out of range: " + key);
    }
    apply_learner_key(config.learners[player], rest.substr(dot + 1), value);
  }
  if (!any_shared && kv.count("learner.0.algorithm") == 0) {
    throw std::invalid_argument("config defines no learners");
  }

  if (config.init_scheme == InitScheme::kExplicitList) {
    for (int r = 0; r < config.num_inits; ++r) {
      const auto it = kv.find("init." + std::to_string(r));
      if (it == kv.end()) {
        throw std::invalid_argument("explicit-list init scheme is missing init." +
                                    std::to_string(r));
      }
      config.explicit_inits.emplace_back(parse_profile_text(it->second));
    }
  }

  LoadedExperiment loaded{std::move(config), std::move(*game), std::nullopt};

  if (auto it = kv.find("sweep.values"); it != kv.end()) {
    SweepSpec spec;
    spec.values = parse_number_list(it->second);
    if (auto ap = kv.find("sweep.apply"); ap != kv.end()) {
      if (ap->second == "M_inv") {
        spec.apply = SweepSpec::Apply::kMutationInverse;
      } else if (ap->second == "tau") {
        spec.apply = SweepSpec::Apply::kTau;
      } else if (ap->second == "M_inv_and_tau") {
        spec.apply = SweepSpec::Apply::kMutationInverseAndTau;
      } else {
        throw std::invalid_argument("unknown sweep.apply mode: " + ap->second);
      }
    }
    loaded.sweep = std::move(spec);
  }

  validate_experiment(loaded.config, loaded.game);
  return loaded;
}

LoadedExperiment load_experiment_file(const std::string& path) {
  return load_experiment(parse_config_file(path));
}

void apply_sweep_value(ExperimentConfig& config, const SweepSpec& spec, double value) {
  if (!(value > 0.0)) throw std::invalid_argument("sweep values must be positive");
  for (auto& learner : config.learners) {
    switch (spec.apply) {
      case SweepSpec::Apply::kMutationInverse:
        learner.mutation = 1.0 / value;
        break;
      case SweepSpec::Apply::kTau:
        learner.tau = value;
        break;
      case SweepSpec::Apply::kMutationInverseAndTau:
        learner.mutation = 1.0 / value;
        learner.tau = value;
        break;
    }
  }
}

}  // namespace mbl
