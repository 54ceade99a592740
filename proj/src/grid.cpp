#include "lsfm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lsfm {

int Grid::row_of(double yv) const {
    // y(i) = y_max - (i+1)*tau_y
    int i = static_cast<int>(std::lround((y_max - yv) / tau_y - 1.0));
    return std::clamp(i, 0, n - 1);
}

Grid make_grid(int n, double x_min, double x_max, double y_min, double y_max) {
    if (n < 2) throw std::invalid_argument("make_grid: N must be at least 2");
    if (!(x_min < x_max) || !(y_min < y_max))
        throw std::invalid_argument("make_grid: domain extent must be positive");
    Grid g;
    g.n = n;
    g.x_min = x_min;
    g.x_max = x_max;
    g.y_min = y_min;
    g.y_max = y_max;
    g.tau = (x_max - x_min) / (n + 1);
    g.tau_y = (y_max - y_min) / (n + 1);
    return g;
}

bool SupportMask::any() const {
    return std::any_of(inside.begin(), inside.end(), [](unsigned char c) { return c != 0; });
}

SupportMask SupportMask::mirrored_columns() const {
    SupportMask out(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out.set(i, j, (*this)(i, n - 1 - j));
    return out;
}

bool RowRuns::contains(int row) const {
    for (const auto& [b, e] : runs)
        if (row >= b && row < e) return true;
    return false;
}

int RowRuns::count() const {
    int c = 0;
    for (const auto& [b, e] : runs) c += e - b;
    return c;
}

std::optional<int> entry_depth(const SupportMask& mask, int row) {
    if (row < 0 || row >= mask.n) throw std::invalid_argument("entry_depth: row out of range");
    for (int j = 0; j < mask.n; ++j)
        if (mask(row, j)) return j;
    return std::nullopt;
}

namespace {

RowRuns runs_from_flags(const std::vector<bool>& flags) {
    RowRuns rr;
    const int n = static_cast<int>(flags.size());
    int i = 0;
    while (i < n) {
        if (flags[i]) {
            int b = i;
            while (i < n && flags[i]) ++i;
            rr.runs.emplace_back(b, i);
        } else {
            ++i;
        }
    }
    return rr;
}

}  // namespace

AdmissibleSection admissible_summary(const SupportMask& mask, const Grid& grid) {
    const int n = mask.n;
    if (n != grid.n) throw std::invalid_argument("admissible_summary: mask/grid size mismatch");
    if (!mask.any()) throw std::invalid_argument("admissible_summary: empty mask");

    AdmissibleSection sec;
    sec.entry_col.resize(n);

    // Per-row entry column and contiguous in-object run length from entry.
    std::vector<int> exit_col(n, -1);  // last column of the contiguous run starting at entry
    int max_mask_col = -1;
    for (int i = 0; i < n; ++i) {
        sec.entry_col[i] = entry_depth(mask, i);
        if (!sec.entry_col[i]) continue;
        int j = *sec.entry_col[i];
        while (j + 1 < n && mask(i, j + 1)) ++j;
        exit_col[i] = j;
        for (int jj = 0; jj < n; ++jj)
            if (mask(i, jj)) max_mask_col = std::max(max_mask_col, jj);
    }

    // Per-column reachable row sets Y_s (monotone in s) and s_minus, the
    // first column with a nonempty reachable set.
    sec.rows_reaching.resize(n);
    std::vector<bool> reach(n, false);
    for (int s = 0; s < n; ++s) {
        for (int i = 0; i < n; ++i)
            if (sec.entry_col[i] && *sec.entry_col[i] == s) reach[i] = true;
        sec.rows_reaching[s] = runs_from_flags(reach);
        if (sec.s_minus < 0 && !sec.rows_reaching[s].empty()) sec.s_minus = s;
    }

    // s is admissible when [entry, s] stays inside the mask for every row
    // reaching s, i.e. s <= exit_col over all active rows.
    int min_exit = std::numeric_limits<int>::max();
    sec.s_plus = -1;
    for (int s = sec.s_minus; s < n; ++s) {
        for (int i = 0; i < n; ++i)
            if (sec.entry_col[i] && *sec.entry_col[i] == s) min_exit = std::min(min_exit, exit_col[i]);
        if (min_exit >= s)
            sec.s_plus = s;
        else
            break;
    }

    // gamma samples for rows in Y_{s+}
    sec.gamma.assign(n, std::numeric_limits<double>::quiet_NaN());
    if (sec.s_plus >= 0) {
        for (int i = 0; i < n; ++i)
            if (sec.entry_col[i] && *sec.entry_col[i] <= sec.s_plus) sec.gamma[i] = grid.x(*sec.entry_col[i]);
    }

    // The object is admissible when nothing lies beyond s_plus.
    sec.admissible = (sec.s_plus >= 0) && (max_mask_col <= sec.s_plus);

    // One-sided check that gamma strictly decreases toward both ends of
    // Y_{s+} (rows at the extremes enter later than their inner neighbors).
    if (sec.s_plus >= 0 && !sec.rows_reaching[sec.s_plus].empty()) {
        const RowRuns& ys = sec.rows_reaching[sec.s_plus];
        int top = ys.min_row(), bot = ys.max_row();
        auto entry_at = [&](int r) { return sec.entry_col[r] ? *sec.entry_col[r] : n; };
        bool ok_bot = bot > top && entry_at(bot) > entry_at(bot - 1);
        bool ok_top = bot > top && entry_at(top) > entry_at(top + 1);
        sec.gamma_decreasing_at_ends = ok_bot && ok_top;
    }

    return sec;
}

}  // namespace lsfm
