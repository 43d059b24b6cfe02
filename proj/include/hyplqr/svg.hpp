#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hyplqr::svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool step = false;     // draw as a right-continuous staircase
    bool markers = false;  // points only, no connecting line
};

struct Axes {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    bool log_y = false;
};

void line_plot(const std::string& path, const Axes& axes, const std::vector<Series>& series);

// values(r, c) drawn with row 0 at the top; x spans columns, y spans rows.
// Colors use a fixed blue-white-red map symmetric about zero.
void heatmap(const std::string& path, const Axes& axes, const Eigen::MatrixXd& values, double x0, double x1,
             double y0, double y1);

}  // namespace hyplqr::svg
