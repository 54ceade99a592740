#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace lsfm {

// Uniform grid over [x_min,x_max] x [y_min,y_max] with n interior nodes per
// axis: node spacing tau = (x_max-x_min)/(n+1) and pixel centers sit at the
// interior nodes, so left-Riemann sums over columns/rows use weight tau.
// Rows are indexed top-down: y(0) = y_max - tau_y.
struct Grid {
    int n = 0;
    double x_min = 0, x_max = 0, y_min = 0, y_max = 0;
    double tau = 0;    // x spacing
    double tau_y = 0;  // y spacing

    double x(int j) const { return x_min + (j + 1) * tau; }
    double y(int i) const { return y_max - (i + 1) * tau_y; }
    int row_of(double yv) const;  // nearest row index, clamped
};

Grid make_grid(int n, double x_min, double x_max, double y_min, double y_max);

// Boolean pixel mask marking the support of the object.
struct SupportMask {
    int n = 0;
    std::vector<unsigned char> inside;

    SupportMask() = default;
    explicit SupportMask(int n_) : n(n_), inside(static_cast<size_t>(n_) * n_, 0) {}

    bool operator()(int i, int j) const { return inside[static_cast<size_t>(i) * n + j] != 0; }
    void set(int i, int j, bool v) { inside[static_cast<size_t>(i) * n + j] = v ? 1 : 0; }
    bool any() const;
    SupportMask mirrored_columns() const;
};

// Set of row indices stored as half-open runs [begin, end).
struct RowRuns {
    std::vector<std::pair<int, int>> runs;

    bool contains(int row) const;
    int count() const;
    bool empty() const { return runs.empty(); }
    int min_row() const { return runs.front().first; }
    int max_row() const { return runs.back().second - 1; }
};

// Horizontal-entry geometry of an object section:
//  - entry_col[i]: first in-object column of row i (nullopt if the row misses
//    the object);
//  - s_minus/s_plus: first column touched by the object and the deepest
//    column s such that, for every row whose entry lies at or before s, the
//    horizontal segment from the entry to s stays inside the object;
//  - rows_reaching[s]: rows whose entry column is <= s (monotone in s);
//  - gamma[i]: x-position of the entry for rows reaching s_plus;
//  - admissible: the whole object is covered, i.e. no pixel lies beyond
//    column s_plus;
//  - gamma_decreasing_at_ends: entry depth strictly increases toward the top
//    and bottom rows of rows_reaching[s_plus].
struct AdmissibleSection {
    int s_minus = -1;
    int s_plus = -1;
    std::vector<std::optional<int>> entry_col;
    std::vector<RowRuns> rows_reaching;
    std::vector<double> gamma;
    bool admissible = false;
    bool gamma_decreasing_at_ends = false;
};

// First in-object column of the given row, scanning from the left edge.
std::optional<int> entry_depth(const SupportMask& mask, int row);

AdmissibleSection admissible_summary(const SupportMask& mask, const Grid& grid);

}  // namespace lsfm
