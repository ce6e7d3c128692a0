#include "mbl/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mbl {

std::string std_sibling_path(const std::string& path) {
  const auto dot = path.rfind('.');
  const auto slash = path.rfind('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return path + ".std.csv";
  }
  return path.substr(0, dot) + ".std" + path.substr(dot);
}

void export_csv(std::span<const RunRecord> records, const std::string& path) {
  if (records.empty()) throw std::invalid_argument("no records to export");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "run,step,player,action,prob\n";
  char buf[48];
  for (const auto& rec : records) {
    for (std::size_t k = 0; k < rec.profiles.size(); ++k) {
      const auto& profile = rec.profiles[k];
      for (int i = 0; i < profile.num_players(); ++i) {
        const auto& x = profile.strategy(i);
        for (std::size_t h = 0; h < x.size(); ++h) {
          std::snprintf(buf, sizeof buf, "%.9g", x[h]);
          out << rec.run_id << ',' << rec.steps[k] << ',' << i << ',' << h << ','
              << buf << '\n';
        }
      }
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
  out.close();

  const std::string std_path = std_sibling_path(path);
  std::ofstream sout(std_path, std::ios::binary);
  if (!sout) throw std::runtime_error("cannot open for writing: " + std_path);
  sout << "run,step,player,std\n";
  for (const auto& rec : records) {
    for (std::size_t k = 0; k < rec.steps.size(); ++k) {
      for (std::size_t i = 0; i < rec.rolling_std.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.9g", rec.rolling_std[i][k]);
        sout << rec.run_id << ',' << rec.steps[k] << ',' << i << ',' << buf << '\n';
      }
    }
  }
  if (!sout) throw std::runtime_error("write failed: " + std_path);
}

std::vector<LoadedRun> load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "run,step,player,action,prob") {
    throw std::runtime_error("unexpected CSV header in " + path);
  }
  std::vector<LoadedRun> runs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    long run, player, action;
    unsigned long long step;
    double prob;
    std::getline(ss, field, ',');
    run = std::stol(field);
    std::getline(ss, field, ',');
    step = std::stoull(field);
    std::getline(ss, field, ',');
    player = std::stol(field);
    std::getline(ss, field, ',');
    action = std::stol(field);
    std::getline(ss, field, ',');
    prob = std::stod(field);

    if (runs.empty() || runs.back().run_id != run) {
      runs.push_back(LoadedRun{static_cast<int>(run), {}, {}});
    }
    auto& r = runs.back();
    if (r.steps.empty() || r.steps.back() != step) {
      r.steps.push_back(step);
      r.profiles.emplace_back();
    }
    auto& profile = r.profiles.back();
    if (static_cast<long>(profile.size()) <= player) profile.resize(player + 1);
    auto& x = profile[player];
    if (static_cast<long>(x.size()) != action) {
      throw std::runtime_error("CSV rows out of order in " + path);
    }
    x.push_back(prob);
  }
  return runs;
}

}  // namespace mbl
