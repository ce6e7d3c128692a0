#ifndef MBL_CSV_HPP_
#define MBL_CSV_HPP_

#include <span>
#include <string>
#include <vector>

#include "mbl/experiment.hpp"

namespace mbl {

// Long-format trajectory CSV: header `run,step,player,action,prob`, rows
// ordered by (run, step, player, action), probabilities with 9 significant
// digits. A sibling `<base>.std.csv` carries `run,step,player,std`.
void export_csv(std::span<const RunRecord> records, const std::string& path);

std::string std_sibling_path(const std::string& path);

// Parses the probability file back into (run, step) profiles; used for
// round-trip checks and by external tooling.
struct LoadedRun {
  int run_id = 0;
  std::vector<std::uint64_t> steps;
  std::vector<std::vector<std::vector<double>>> profiles;  // [record][player][action]
};
std::vector<LoadedRun> load_csv(const std::string& path);

}  // namespace mbl

#endif  // MBL_CSV_HPP_
