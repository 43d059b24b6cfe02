#pragma once

#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hyplqr {

// Comma-separated, '.' decimal, LF line endings, mandatory header row.
// Doubles are written with 17 significant digits so they round-trip.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    CsvWriter& row(std::initializer_list<double> values);
    CsvWriter& row(const std::vector<double>& values);

private:
    std::ofstream out_;
    std::size_t width_;
};

std::string format_double(double v);

// Dense matrix as CSV with header c0,c1,... and one row per matrix row.
void write_matrix_csv(const Eigen::MatrixXd& M, const std::string& path);
Eigen::MatrixXd read_matrix_csv(const std::string& path);

}  // namespace hyplqr
