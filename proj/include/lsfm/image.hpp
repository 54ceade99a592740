#pragma once

#include <cassert>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace lsfm {

// Column-stacked flattening of an n-by-n image: pixel (row i, col j) lands at
// z = j*n + i, so a column is contiguous in the flattened vector.
inline int flatten_index(int i, int j, int n) { return j * n + i; }
inline std::pair<int, int> unflatten_index(int z, int n) { return {z % n, z / n}; }

// Square image of doubles, row-major storage; row 0 is the top of the frame
// (largest y), column 0 the left edge (smallest x).
class Image {
  public:
    Image() : n_(0) {}
    explicit Image(int n, double fill = 0.0) : n_(n), data_(static_cast<size_t>(n) * n, fill) {
        if (n < 0) throw std::invalid_argument("Image: negative size");
    }

    int size() const { return n_; }
    double& operator()(int i, int j) {
        assert(i >= 0 && i < n_ && j >= 0 && j < n_);
        return data_[static_cast<size_t>(i) * n_ + j];
    }
    double operator()(int i, int j) const {
        assert(i >= 0 && i < n_ && j >= 0 && j < n_);
        return data_[static_cast<size_t>(i) * n_ + j];
    }

    std::vector<double>& raw() { return data_; }
    const std::vector<double>& raw() const { return data_; }

    // Column-stacked copy of the pixel values.
    std::vector<double> flatten() const {
        std::vector<double> v(data_.size());
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) v[flatten_index(i, j, n_)] = (*this)(i, j);
        return v;
    }

    static Image unflatten(const std::vector<double>& v, int n) {
        if (static_cast<size_t>(n) * n != v.size()) throw std::invalid_argument("unflatten: size mismatch");
        Image img(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) img(i, j) = v[flatten_index(i, j, n)];
        return img;
    }

    // Left-right flip, used to reuse the left-illumination pipeline for the
    // right-hand light sheet.
    Image mirrored_columns() const {
        Image out(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) out(i, j) = (*this)(i, n_ - 1 - j);
        return out;
    }

  private:
    int n_;
    std::vector<double> data_;
};

}  // namespace lsfm
