#pragma once

#include <string>
#include <vector>

#include "lsfm/assembly.hpp"
#include "lsfm/grid.hpp"
#include "lsfm/image.hpp"

namespace lsfm {

// 8-bit PGM (P2) preview, min-max scaled to 0..255.
void write_pgm(const Image& img, const std::string& path);
void write_pgm(const SupportMask& mask, const std::string& path);

// Raw-value CSV with shortest-round-trip number formatting; read back gives
// bit-identical doubles.
void write_csv(const Image& img, const std::string& path);
Image read_csv_image(const std::string& path);

void write_vector_csv(const std::vector<double>& v, const std::string& path);
std::vector<double> read_vector_csv(const std::string& path);

// Matrix Market coordinate export of an assembled operator (1-based indices).
void write_matrix_market(const SparseOperator& op, const std::string& path);

// Shortest representation of a double that parses back to the same bits.
std::string format_double(double v);

}  // namespace lsfm
