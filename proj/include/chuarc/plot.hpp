// SVG rendering of the CSV artifacts. Presentational only: values are
// scaled onto the axes and nothing else.
#pragma once

#include <string>

namespace chuarc::plot {

enum class Kind { scatter, line, heatmap, histogram };

/// Picks the plot for a CSV by its header:
///   param,extremum_value       scatter
///   t,V_CD,V_L / t,ch_*         line
///   freq_hz,magnitude           line
///   r_ohms,v_center,mean_nmse   heatmap
///   index,split,...,nmse        histogram of validation NMSE
///   x,y_teacher / x,y,class     scatter
/// Throws ParseError for anything else.
Kind detect(const std::string& csv_text);

/// SVG document for the CSV; the config digest from its comment line and, for
/// histograms, the bin edges go into <metadata>.
std::string render(const std::string& csv_text, const std::string& title = "");

void render_plot(const std::string& csv_path, const std::string& svg_path);

}  // namespace chuarc::plot
