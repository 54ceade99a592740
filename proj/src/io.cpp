#include "lsfm/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace lsfm {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc())
        throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, ptr);
}

namespace {

double parse_double(std::string_view s, const std::string& context) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::runtime_error(context + ": bad number '" + std::string(s) + "'");
    return v;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return in;
}

}  // namespace

void write_pgm(const Image& img, const std::string& path) {
    const int n = img.size();
    double lo = img.raw().empty() ? 0.0 : img.raw()[0], hi = lo;
    for (double v : img.raw()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
    std::ofstream out = open_out(path);
    out << "P2\n" << n << " " << n << "\n255\n";
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            int g = static_cast<int>(std::lround((img(i, j) - lo) * scale));
            out << std::clamp(g, 0, 255) << (j + 1 < n ? ' ' : '\n');
        }
    }
}

void write_pgm(const SupportMask& mask, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "P2\n" << mask.n << " " << mask.n << "\n255\n";
    for (int i = 0; i < mask.n; ++i)
        for (int j = 0; j < mask.n; ++j)
            out << (mask(i, j) ? 255 : 0) << (j + 1 < mask.n ? ' ' : '\n');
}

void write_csv(const Image& img, const std::string& path) {
    std::ofstream out = open_out(path);
    const int n = img.size();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            out << format_double(img(i, j));
            out << (j + 1 < n ? ',' : '\n');
        }
    }
}

Image read_csv_image(const std::string& path) {
    std::ifstream in = open_in(path);
    std::vector<std::vector<double>> rows;
    std::string lineText;
    while (std::getline(in, lineText)) {
        if (lineText.empty()) continue;
        std::vector<double> row;
        size_t start = 0;
        while (start <= lineText.size()) {
            size_t comma = lineText.find(',', start);
            size_t end = (comma == std::string::npos) ? lineText.size() : comma;
            row.push_back(parse_double(std::string_view(lineText).substr(start, end - start),
                                       path));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        rows.push_back(std::move(row));
    }
    const int n = static_cast<int>(rows.size());
    Image img(n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[i].size()) != n)
            throw std::runtime_error(path + ": not a square table");
        for (int j = 0; j < n; ++j) img(i, j) = rows[i][j];
    }
    return img;
}

void write_vector_csv(const std::vector<double>& v, const std::string& path) {
    std::ofstream out = open_out(path);
    for (double t : v) out << format_double(t) << '\n';
}

std::vector<double> read_vector_csv(const std::string& path) {
    std::ifstream in = open_in(path);
    std::vector<double> v;
    std::string lineText;
    while (std::getline(in, lineText))
        if (!lineText.empty()) v.push_back(parse_double(lineText, path));
    return v;
}

void write_matrix_market(const SparseOperator& op, const std::string& path) {
    if (!op.assembled())
        throw std::invalid_argument("write_matrix_market: operator is matrix-free");
    std::ofstream out = open_out(path);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << op.rows() << " " << op.cols() << " " << op.nnz() << "\n";
    for (std::int64_t r = 0; r < op.rows(); ++r)
        for (std::int64_t t = op.row_ptr()[r]; t < op.row_ptr()[r + 1]; ++t)
            out << (r + 1) << " " << (op.col_index()[t] + 1) << " "
                << format_double(op.values()[t]) << "\n";
}

}  // namespace lsfm
