#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace dipde {

struct SvgSeries {
    std::string label;
    Eigen::ArrayXd mean;
    Eigen::ArrayXd std;  // empty for no band
    std::string color = "#1f77b4";
};

/// Line chart with a log10 y axis and a shaded mean +- std band.
/// Non-positive values are clipped to the smallest positive value shown.
std::string log_plot_svg(const std::vector<SvgSeries>& series, const std::string& title, const std::string& xlabel,
                         const std::string& ylabel);

}  // namespace dipde
