#pragma once

#include <string>
#include <vector>

namespace traitlab {

struct ScatterPoint {
  double x = 0;
  double y = 0;
  std::string label;
};

// Minimal standalone scatter: frame, axis captions, labeled points.
std::string scatter_svg(const std::vector<ScatterPoint>& points,
                        const std::string& x_label,
                        const std::string& y_label,
                        const std::string& title);

}  // namespace traitlab
