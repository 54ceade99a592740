#include "lsfm/assembly.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lsfm/excitation.hpp"

namespace lsfm {

namespace {

// Emits every matrix row as (row index, image column k, per-image-row
// values): row (side, l, k) holds c * v_l(i, k) * exp(-D(i, k)) * w at the
// flattened pixels z = k*N + i. Shared by assembly and matrix-free paths.
template <typename RowFn>
void for_each_row(const CoefficientMaps& maps, const SupportMask& mask, const Grid& grid,
                  MeasureMode mode, RowFn&& fn) {
    const int n = grid.n;
    const double w = (mode == MeasureMode::tau_weighted) ? grid.tau_y : 1.0;

    Image expd(n);
    {
        Image d = cumulative_attenuation(maps.a, grid);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) expd(i, k) = std::exp(-d(i, k));
    }

    // side 0: left illumination; side 1: right (mirrored geometry, values
    // reported in the common frame).
    const CoefficientMaps mm = maps.mirrored_columns();
    const SupportMask mmask = mask.mirrored_columns();
    for (int side = 0; side < 2; ++side) {
        const CoefficientMaps& m = (side == 0) ? maps : mm;
        const SupportMask& msk = (side == 0) ? mask : mmask;
        for (int l = 0; l < n; ++l) {
            const std::int64_t row0 =
                static_cast<std::int64_t>(side) * n * n + static_cast<std::int64_t>(l) * n;
            ExcitationField f = excitation_field(m, msk, l, Side::left, grid);
            for (int k = 0; k < n; ++k) {
                const int kf = (side == 0) ? k : n - 1 - k;  // column in the field's frame
                fn(row0 + k, k, [&](auto&& emit) {
                    if (!f.entry_col) return;
                    for (int i = 0; i < n; ++i) {
                        double vi = f.v(i, kf);
                        if (vi != 0.0) emit(i, maps.c * vi * expd(i, k) * w);
                    }
                });
            }
        }
    }
}

}  // namespace

SparseOperator build_system(const CoefficientMaps& maps, const SupportMask& mask, const Grid& grid,
                            MeasureMode mode, bool matrix_free, double memory_cap_bytes) {
    const int n = grid.n;
    SparseOperator op;
    op.rows_ = 2LL * n * n;
    op.cols_ = static_cast<std::int64_t>(n) * n;
    op.maps_ = maps;
    op.mask_ = mask;
    op.grid_ = grid;
    op.mode_ = mode;
    op.assembled_ = !matrix_free;
    if (matrix_free) return op;

    const double worst_bytes = 2.0 * n * n * (static_cast<double>(n) * 12.0 + 8.0);
    if (worst_bytes > memory_cap_bytes)
        throw CapacityError("assembled operator may need " + std::to_string(worst_bytes / 1e9) +
                            " GB (cap " + std::to_string(memory_cap_bytes / 1e9) +
                            " GB); use matrix-free mode");

    op.row_ptr_.assign(op.rows_ + 1, 0);
    for_each_row(maps, mask, grid, mode, [&](std::int64_t row, int k, auto&& values) {
        (void)k;
        values([&](int, double) { ++op.row_ptr_[row + 1]; });
    });
    for (std::int64_t r = 0; r < op.rows_; ++r) op.row_ptr_[r + 1] += op.row_ptr_[r];
    op.values_.resize(op.row_ptr_[op.rows_]);
    op.col_index_.resize(op.row_ptr_[op.rows_]);

    std::vector<std::int64_t> cursor(op.row_ptr_.begin(), op.row_ptr_.end() - 1);
    for_each_row(maps, mask, grid, mode, [&](std::int64_t row, int k, auto&& values) {
        values([&](int i, double v) {
            std::int64_t at = cursor[row]++;
            op.col_index_[at] = static_cast<std::int32_t>(flatten_index(i, k, n));
            op.values_[at] = v;
        });
    });
    return op;
}

SparseOperator make_dense_operator(std::int64_t rows, std::int64_t cols,
                                   const std::vector<double>& entries) {
    if (rows <= 0 || cols <= 0 || static_cast<std::int64_t>(entries.size()) != rows * cols)
        throw std::invalid_argument("make_dense_operator: bad shape");
    SparseOperator op;
    op.rows_ = rows;
    op.cols_ = cols;
    op.assembled_ = true;
    op.row_ptr_.assign(rows + 1, 0);
    for (std::int64_t r = 0; r < rows; ++r) {
        for (std::int64_t c = 0; c < cols; ++c) {
            double v = entries[r * cols + c];
            if (v == 0.0) continue;
            op.values_.push_back(v);
            op.col_index_.push_back(static_cast<std::int32_t>(c));
        }
        op.row_ptr_[r + 1] = static_cast<std::int64_t>(op.values_.size());
    }
    return op;
}

std::vector<double> SparseOperator::apply(const std::vector<double>& x) const {
    if (static_cast<std::int64_t>(x.size()) != cols_)
        throw std::invalid_argument("apply: length mismatch");
    std::vector<double> y(rows_, 0.0);
    if (assembled_) {
        for (std::int64_t r = 0; r < rows_; ++r) {
            double acc = 0.0;
            for (std::int64_t t = row_ptr_[r]; t < row_ptr_[r + 1]; ++t)
                acc += values_[t] * x[col_index_[t]];
            y[r] = acc;
        }
        return y;
    }
    const int n = grid_.n;
    for_each_row(maps_, mask_, grid_, mode_, [&](std::int64_t row, int k, auto&& values) {
        double acc = 0.0;
        values([&](int i, double v) { acc += v * x[flatten_index(i, k, n)]; });
        y[row] = acc;
    });
    return y;
}

std::vector<double> SparseOperator::apply_adjoint(const std::vector<double>& y) const {
    if (static_cast<std::int64_t>(y.size()) != rows_)
        throw std::invalid_argument("apply_adjoint: length mismatch");
    std::vector<double> x(cols_, 0.0);
    if (assembled_) {
        for (std::int64_t r = 0; r < rows_; ++r) {
            double yr = y[r];
            if (yr == 0.0) continue;
            for (std::int64_t t = row_ptr_[r]; t < row_ptr_[r + 1]; ++t)
                x[col_index_[t]] += values_[t] * yr;
        }
        return x;
    }
    const int n = grid_.n;
    for_each_row(maps_, mask_, grid_, mode_, [&](std::int64_t row, int k, auto&& values) {
        double yr = y[row];
        if (yr == 0.0) return;
        values([&](int i, double v) { x[flatten_index(i, k, n)] += v * yr; });
    });
    return x;
}

std::vector<double> SparseOperator::column_sums() const {
    return apply_adjoint(std::vector<double>(rows_, 1.0));
}

std::vector<double> SparseOperator::row_sums() const {
    return apply(std::vector<double>(cols_, 1.0));
}

std::vector<double> assemble_rhs(const MeasurementSet& meas) {
    const int n = meas.left.size();
    if (meas.right.size() != n) throw std::invalid_argument("assemble_rhs: shape mismatch");
    std::vector<double> b;
    b.reserve(2LL * n * n);
    // Heights outer, camera pixels inner: exactly the row-major layout.
    b.insert(b.end(), meas.left.raw().begin(), meas.left.raw().end());
    b.insert(b.end(), meas.right.raw().begin(), meas.right.raw().end());
    return b;
}

MeasurementSet split_rhs(const std::vector<double>& b, int n) {
    if (static_cast<std::int64_t>(b.size()) != 2LL * n * n)
        throw std::invalid_argument("split_rhs: length mismatch");
    MeasurementSet meas;
    meas.left = Image(n);
    meas.right = Image(n);
    std::copy(b.begin(), b.begin() + static_cast<std::int64_t>(n) * n, meas.left.raw().begin());
    std::copy(b.begin() + static_cast<std::int64_t>(n) * n, b.end(), meas.right.raw().begin());
    return meas;
}

}  // namespace lsfm
