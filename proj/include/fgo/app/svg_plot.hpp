#ifndef FGO_APP_SVG_PLOT_HPP_
#define FGO_APP_SVG_PLOT_HPP_

#include <string>
#include <vector>

namespace fgo::app {

struct Series {
  std::string name;
  std::vector<double> values;  // y at x = 0, 1, 2, ...
};

struct PlotSpec {
  std::string title;
  std::string x_label = "step";
  std::string y_label;
  int width = 640;
  int height = 400;
};

// Standalone SVG line chart with axes, tick labels and a legend.
std::string render_line_plot(const PlotSpec& spec, const std::vector<Series>& series);

}  // namespace fgo::app

#endif  // FGO_APP_SVG_PLOT_HPP_
