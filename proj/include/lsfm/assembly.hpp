#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "lsfm/detection.hpp"
#include "lsfm/grid.hpp"
#include "lsfm/phantom.hpp"

namespace lsfm {

// Thrown when an assembled operator would exceed the configured memory cap;
// the message advises switching to matrix-free application.
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Sparse forward operator mapping a column-stacked density (n = N^2) to the
// stacked measurements (m = 2N^2; left block then right block, heights outer,
// camera pixels inner). Either holds assembled CSR storage or applies the
// physics on the fly (matrix-free); both paths produce identical results.
class SparseOperator {
  public:
    std::int64_t rows() const { return rows_; }
    std::int64_t cols() const { return cols_; }
    bool assembled() const { return assembled_; }
    std::int64_t nnz() const { return static_cast<std::int64_t>(values_.size()); }

    std::vector<double> apply(const std::vector<double>& x) const;
    std::vector<double> apply_adjoint(const std::vector<double>& y) const;

    // Column sums of |A| (SART V-weights) and row sums (SART W-weights).
    std::vector<double> column_sums() const;
    std::vector<double> row_sums() const;

    // Assembled-storage access for export and dense materialization in tests.
    const std::vector<double>& values() const { return values_; }
    const std::vector<std::int32_t>& col_index() const { return col_index_; }
    const std::vector<std::int64_t>& row_ptr() const { return row_ptr_; }

  private:
    std::int64_t rows_ = 0, cols_ = 0;
    bool assembled_ = true;
    // CSR storage (assembled path)
    std::vector<double> values_;
    std::vector<std::int32_t> col_index_;
    std::vector<std::int64_t> row_ptr_;
    // matrix-free context
    CoefficientMaps maps_;
    SupportMask mask_;
    Grid grid_;
    MeasureMode mode_ = MeasureMode::tau_weighted;

    friend SparseOperator build_system(const CoefficientMaps&, const SupportMask&, const Grid&,
                                       MeasureMode, bool, double);
    friend SparseOperator make_dense_operator(std::int64_t, std::int64_t,
                                              const std::vector<double>&);
};

// Builds the forward operator from the coefficient maps. With matrix_free
// false the rows are assembled into CSR storage; a worst-case memory estimate
// beyond memory_cap_bytes raises CapacityError.
SparseOperator build_system(const CoefficientMaps& maps, const SupportMask& mask, const Grid& grid,
                            MeasureMode mode = MeasureMode::tau_weighted, bool matrix_free = false,
                            double memory_cap_bytes = 2.5e9);

// Builds an assembled operator from explicit entries (row-major, zeros
// skipped); for small bespoke systems in tools and tests.
SparseOperator make_dense_operator(std::int64_t rows, std::int64_t cols,
                                   const std::vector<double>& entries);

// Stacks a measurement set into the right-hand-side vector: left block rows
// first, then right; within a block heights outer, camera pixels inner.
std::vector<double> assemble_rhs(const MeasurementSet& meas);

// Splits a stacked vector back into the two measurement arrays.
MeasurementSet split_rhs(const std::vector<double>& b, int n);

struct LinearSystem {
    SparseOperator op;
    std::vector<double> b;
    double noise_level = 0.0;
};

}  // namespace lsfm
