#ifndef MBL_SVG_PLOT_HPP_
#define MBL_SVG_PLOT_HPP_

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mbl/experiment.hpp"

namespace mbl {

// Scatter of two projected strategy components per recorded step, all runs
// overlaid on [0,1]^2. Points fade yellow -> orange -> violet -> black from
// early to late; the target is marked with a blue cross. Static SVG output.
void render_plot(std::span<const RunRecord> records,
                 const std::vector<std::pair<int, int>>& projection,
                 const MixedProfile& target, const std::string& path);

}  // namespace mbl

#endif  // MBL_SVG_PLOT_HPP_
