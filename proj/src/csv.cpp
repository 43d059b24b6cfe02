#include "hyplqr/csv.hpp"

#include <charconv>
#include <sstream>

#include "hyplqr/errors.hpp"

namespace hyplqr {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary), width_(header.size()) {
    if (!out_) throw Error("cannot open " + path + " for writing");
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

CsvWriter& CsvWriter::row(std::initializer_list<double> values) {
    return row(std::vector<double>(values));
}

CsvWriter& CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != width_) throw InvalidArgument("CSV row width does not match header");
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
    out_ << '\n';
    return *this;
}

void write_matrix_csv(const Eigen::MatrixXd& M, const std::string& path) {
    std::vector<std::string> header;
    for (Eigen::Index j = 0; j < M.cols(); ++j) header.push_back("c" + std::to_string(j));
    CsvWriter w(path, header);
    std::vector<double> r(static_cast<std::size_t>(M.cols()));
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) r[static_cast<std::size_t>(j)] = M(i, j);
        w.row(r);
    }
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> r;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) r.push_back(std::stod(cell));
        if (!rows.empty() && r.size() != rows.front().size())
            throw Error("ragged CSV matrix in " + path);
        rows.push_back(std::move(r));
    }
    const auto cols = rows.empty() ? 0 : rows.front().size();
    Eigen::MatrixXd M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols; ++j)
            M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return M;
}

}  // namespace hyplqr
