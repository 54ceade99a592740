#include "lsfm/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "lsfm/image.hpp"

namespace lsfm {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

double max_abs(const std::vector<double>& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

void clamp_nonneg(std::vector<double>& x) {
    for (double& v : x) v = std::max(v, 0.0);
}

std::vector<double> initial_guess(const LinearSystem& sys, const SolverConfig& cfg,
                                  double floor_value) {
    std::vector<double> x(sys.op.cols(), floor_value);
    if (!cfg.x0.empty()) {
        if (static_cast<std::int64_t>(cfg.x0.size()) != sys.op.cols())
            throw std::invalid_argument("solver: x0 length mismatch");
        for (size_t i = 0; i < x.size(); ++i) x[i] = std::max(cfg.x0[i], floor_value);
    }
    return x;
}

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void record(SolverResult& res, const SolverConfig& cfg, int iter, double res_rel,
            const std::vector<double>& x) {
    res.residual_history.push_back(res_rel);
    if (cfg.on_iterate) cfg.on_iterate(iter, res_rel, x);
}

}  // namespace

const char* stop_reason_name(StopReason r) {
    switch (r) {
        case StopReason::discrepancy: return "discrepancy";
        case StopReason::max_iter: return "max_iter";
        case StopReason::stabilized: return "stabilized";
    }
    return "unknown";
}

bool discrepancy_stop(double residual_rel, const SolverConfig& cfg) {
    if (residual_rel < 0) throw std::invalid_argument("discrepancy_stop: negative residual");
    // Tiny absolute floor so noise-free runs stop once the fit is exact to
    // floating-point precision.
    return residual_rel <= cfg.eta * cfg.noise_level + 1e-12;
}

std::pair<double, std::vector<double>> tv(const std::vector<double>& x, const Grid& grid,
                                          double tv_epsilon) {
    const int n = grid.n;
    if (static_cast<std::int64_t>(x.size()) != static_cast<std::int64_t>(n) * n)
        throw std::invalid_argument("tv: length mismatch");
    double value = 0.0;
    std::vector<double> g(x.size(), 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const int z = flatten_index(i, j, n);
            const double dx = (j + 1 < n) ? x[flatten_index(i, j + 1, n)] - x[z] : 0.0;
            const double dy = (i + 1 < n) ? x[flatten_index(i + 1, j, n)] - x[z] : 0.0;
            const double phi = std::sqrt(dx * dx + dy * dy + tv_epsilon * tv_epsilon);
            value += phi;
            if (phi > 0) {
                g[z] += (-dx - dy) / phi;
                if (j + 1 < n) g[flatten_index(i, j + 1, n)] += dx / phi;
                if (i + 1 < n) g[flatten_index(i + 1, j, n)] += dy / phi;
            }
        }
    }
    return {value, std::move(g)};
}

SolverResult solve_mrnsd(const LinearSystem& sys, const SolverConfig& cfg) {
    Stopwatch clock;
    SolverResult res;
    const double normb = norm2(sys.b);
    if (normb == 0) throw std::invalid_argument("mrnsd: zero right-hand side");
    const double eps_pos = 1e-8 * max_abs(sys.b);
    std::vector<double> x = initial_guess(sys, cfg, eps_pos);

    std::vector<double> ax = sys.op.apply(x);
    std::vector<double> r(ax.size());
    for (size_t i = 0; i < r.size(); ++i) r[i] = ax[i] - sys.b[i];
    double res_rel = norm2(r) / normb;
    res.stop_reason = StopReason::max_iter;
    if (discrepancy_stop(res_rel, cfg)) {
        res.stop_reason = StopReason::discrepancy;
        res.x = std::move(x);
        res.wall_time = clock.seconds();
        return res;
    }

    std::vector<double> g = sys.op.apply_adjoint(r);
    for (int k = 1; k <= cfg.max_iter; ++k) {
        // d = -x .* g; gamma = <g, x .* g>
        std::vector<double> d(x.size());
        double gamma = 0.0;
        for (size_t i = 0; i < x.size(); ++i) {
            d[i] = -x[i] * g[i];
            gamma += g[i] * x[i] * g[i];
        }
        if (gamma <= 1e-30 * normb * normb) {
            res.stop_reason = StopReason::stabilized;
            break;
        }
        std::vector<double> ad = sys.op.apply(d);
        double ad2 = dot(ad, ad);
        if (ad2 <= 0) {
            res.stop_reason = StopReason::stabilized;
            break;
        }
        double alpha = gamma / ad2;
        // Largest feasible step keeping x >= 0.
        for (size_t i = 0; i < x.size(); ++i)
            if (d[i] < 0) alpha = std::min(alpha, -x[i] / d[i]);
        for (size_t i = 0; i < x.size(); ++i) x[i] = std::max(x[i] + alpha * d[i], 0.0);
        for (size_t i = 0; i < r.size(); ++i) r[i] += alpha * ad[i];
        g = sys.op.apply_adjoint(r);
        res_rel = norm2(r) / normb;
        res.iterations = k;
        record(res, cfg, k, res_rel, x);
        if (discrepancy_stop(res_rel, cfg)) {
            res.stop_reason = StopReason::discrepancy;
            break;
        }
    }
    res.x = std::move(x);
    res.wall_time = clock.seconds();
    return res;
}

SolverResult solve_sart(const LinearSystem& sys, const SolverConfig& cfg) {
    Stopwatch clock;
    SolverResult res;
    const double normb = norm2(sys.b);
    if (normb == 0) throw std::invalid_argument("sart: zero right-hand side");
    std::vector<double> rowsum = sys.op.row_sums();
    std::vector<double> colsum = sys.op.column_sums();
    if (max_abs(colsum) == 0) throw std::invalid_argument("sart: all-zero operator");
    const double row_tiny = 1e-14 * max_abs(rowsum);
    const double col_tiny = 1e-14 * max_abs(colsum);

    std::vector<double> x = initial_guess(sys, cfg, 0.0);
    std::vector<double> ax = sys.op.apply(x);
    double res_rel;
    {
        double s = 0.0;
        for (size_t i = 0; i < ax.size(); ++i) s += (sys.b[i] - ax[i]) * (sys.b[i] - ax[i]);
        res_rel = std::sqrt(s) / normb;
    }
    res.stop_reason = StopReason::max_iter;
    if (discrepancy_stop(res_rel, cfg)) {
        res.stop_reason = StopReason::discrepancy;
        res.x = std::move(x);
        res.wall_time = clock.seconds();
        return res;
    }

    std::vector<double> u(ax.size());
    for (int k = 1; k <= cfg.max_iter; ++k) {
        for (size_t i = 0; i < u.size(); ++i)
            u[i] = (rowsum[i] > row_tiny) ? (sys.b[i] - ax[i]) / rowsum[i] : 0.0;
        std::vector<double> g = sys.op.apply_adjoint(u);
        for (size_t j = 0; j < x.size(); ++j)
            if (colsum[j] > col_tiny)
                x[j] = std::max(x[j] + cfg.relaxation * g[j] / colsum[j], 0.0);
        ax = sys.op.apply(x);
        double s = 0.0;
        for (size_t i = 0; i < ax.size(); ++i) s += (sys.b[i] - ax[i]) * (sys.b[i] - ax[i]);
        res_rel = std::sqrt(s) / normb;
        res.iterations = k;
        record(res, cfg, k, res_rel, x);
        if (discrepancy_stop(res_rel, cfg)) {
            res.stop_reason = StopReason::discrepancy;
            break;
        }
    }
    res.x = std::move(x);
    res.wall_time = clock.seconds();
    return res;
}

namespace {

// Largest-eigenvalue estimate of A^T A by power iteration; deterministic
// start vector.
double lipschitz_estimate(const SparseOperator& op) {
    std::vector<double> v(op.cols());
    for (size_t j = 0; j < v.size(); ++j) v[j] = 1.0 + 0.01 * static_cast<double>(j % 7);
    double lam = 0.0;
    for (int it = 0; it < 20; ++it) {
        double nv = norm2(v);
        if (nv == 0) return 0.0;
        for (double& t : v) t /= nv;
        std::vector<double> w = op.apply_adjoint(op.apply(v));
        double lam_new = dot(v, w);
        bool settled = it > 0 && std::abs(lam_new - lam) <= 1e-4 * std::abs(lam_new);
        lam = lam_new;
        v = std::move(w);
        if (settled) break;
    }
    return lam;
}

}  // namespace

SolverResult solve_fista(const LinearSystem& sys, const SolverConfig& cfg) {
    Stopwatch clock;
    SolverResult res;
    const double normb = norm2(sys.b);
    if (normb == 0) throw std::invalid_argument("fista: zero right-hand side");
    double lip = lipschitz_estimate(sys.op);
    if (lip <= 0) throw std::invalid_argument("fista: zero operator");

    std::vector<double> x = initial_guess(sys, cfg, 0.0);
    clamp_nonneg(x);
    std::vector<double> y = x;
    double t = 1.0;

    auto resid = [&](const std::vector<double>& z) {
        std::vector<double> az = sys.op.apply(z);
        for (size_t i = 0; i < az.size(); ++i) az[i] -= sys.b[i];
        return az;  // A z - b
    };
    std::vector<double> rx = resid(x);
    double fx = dot(rx, rx);
    double res_rel = std::sqrt(fx) / normb;
    res.stop_reason = StopReason::max_iter;
    if (discrepancy_stop(res_rel, cfg)) {
        res.stop_reason = StopReason::discrepancy;
        res.x = std::move(x);
        res.wall_time = clock.seconds();
        return res;
    }

    for (int k = 1; k <= cfg.max_iter; ++k) {
        std::vector<double> ry = resid(y);
        std::vector<double> g = sys.op.apply_adjoint(ry);
        std::vector<double> xc(x.size());
        for (size_t i = 0; i < x.size(); ++i) xc[i] = std::max(y[i] - g[i] / lip, 0.0);
        std::vector<double> rc = resid(xc);
        double fc = dot(rc, rc);
        if (fc > fx) {
            // Momentum restart: plain projected-gradient step from x, halving
            // the step while the objective still increases (guards an
            // underestimated Lipschitz constant).
            t = 1.0;
            std::vector<double> gx = sys.op.apply_adjoint(rx);
            for (int tries = 0; tries < 60; ++tries) {
                for (size_t i = 0; i < x.size(); ++i) xc[i] = std::max(x[i] - gx[i] / lip, 0.0);
                rc = resid(xc);
                fc = dot(rc, rc);
                if (fc <= fx) break;
                lip *= 2.0;
            }
        }
        double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        for (size_t i = 0; i < x.size(); ++i) {
            double step = xc[i] + (t - 1.0) / t_next * (xc[i] - x[i]);
            y[i] = step;
        }
        x = std::move(xc);
        rx = std::move(rc);
        fx = fc;
        t = t_next;
        res_rel = std::sqrt(fx) / normb;
        res.iterations = k;
        record(res, cfg, k, res_rel, x);
        if (discrepancy_stop(res_rel, cfg)) {
            res.stop_reason = StopReason::discrepancy;
            break;
        }
    }
    res.x = std::move(x);
    res.wall_time = clock.seconds();
    return res;
}

SolverResult solve_nnfcgls(const LinearSystem& sys, const SolverConfig& cfg) {
    Stopwatch clock;
    SolverResult res;
    const double normb = norm2(sys.b);
    if (normb == 0) throw std::invalid_argument("nnfcgls: zero right-hand side");
    const double eps_pos = 1e-8 * max_abs(sys.b);

    std::vector<double> x = initial_guess(sys, cfg, 0.0);
    clamp_nonneg(x);

    int iter = 0;
    int barren_restarts = 0;
    res.stop_reason = StopReason::max_iter;

    while (iter < cfg.max_iter) {
        // (Re)start a flexible CG sweep from the current iterate.
        std::vector<double> ax = sys.op.apply(x);
        std::vector<double> r(ax.size());
        for (size_t i = 0; i < r.size(); ++i) r[i] = sys.b[i] - ax[i];
        double res_rel = norm2(r) / normb;
        if (iter == 0 && discrepancy_stop(res_rel, cfg)) {
            res.stop_reason = StopReason::discrepancy;
            break;
        }
        double res_at_restart = res_rel;

        std::vector<double> s = sys.op.apply_adjoint(r);
        std::vector<double> z(x.size());
        for (size_t i = 0; i < x.size(); ++i) z[i] = std::max(x[i], eps_pos) * s[i];
        std::vector<double> p = z;
        double gamma = dot(s, z);
        bool advanced = false, stop = false, restart = false;

        while (iter < cfg.max_iter && !stop && !restart) {
            if (gamma <= 0) break;  // preconditioner lost descent: restart
            std::vector<double> q = sys.op.apply(p);
            double q2 = dot(q, q);
            if (q2 <= 0) break;
            double alpha = gamma / q2;
            bool left_orthant = false;
            for (size_t i = 0; i < x.size(); ++i) {
                x[i] += alpha * p[i];
                if (x[i] < 0) left_orthant = true;
            }
            ++iter;
            if (left_orthant) {
                clamp_nonneg(x);
                std::vector<double> ax2 = sys.op.apply(x);
                for (size_t i = 0; i < r.size(); ++i) r[i] = sys.b[i] - ax2[i];
                restart = true;
            } else {
                for (size_t i = 0; i < r.size(); ++i) r[i] -= alpha * q[i];
            }
            res_rel = norm2(r) / normb;
            res.iterations = iter;
            record(res, cfg, iter, res_rel, x);
            if (discrepancy_stop(res_rel, cfg)) {
                res.stop_reason = StopReason::discrepancy;
                stop = true;
                break;
            }
            if (res_rel < res_at_restart * (1.0 - 1e-12)) advanced = true;
            if (restart) break;

            std::vector<double> s_new = sys.op.apply_adjoint(r);
            std::vector<double> z_new(x.size());
            for (size_t i = 0; i < x.size(); ++i)
                z_new[i] = std::max(x[i], eps_pos) * s_new[i];
            // Flexible (Polak-Ribiere style) update, robust to the varying
            // preconditioner.
            double beta = (dot(s_new, z_new) - dot(s, z_new)) / gamma;
            if (!(beta >= -1e12 && beta <= 1e12)) break;
            gamma = dot(s_new, z_new);
            s = std::move(s_new);
            z = std::move(z_new);
            for (size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
        }
        if (stop) break;
        barren_restarts = advanced ? 0 : barren_restarts + 1;
        if (barren_restarts >= 3) {
            res.stop_reason = StopReason::stabilized;
            break;
        }
    }
    res.x = std::move(x);
    res.wall_time = clock.seconds();
    return res;
}

SolverResult solve_htv(const LinearSystem& sys, const SolverConfig& cfg, const Grid& grid) {
    Stopwatch clock;
    SolverResult res;
    const double normb = norm2(sys.b);
    if (normb == 0) throw std::invalid_argument("htv: zero right-hand side");
    const int n = grid.n;
    if (static_cast<std::int64_t>(n) * n != sys.op.cols())
        throw std::invalid_argument("htv: grid does not match operator");

    std::vector<double> x = initial_guess(sys, cfg, 0.0);
    clamp_nonneg(x);

    const double target = cfg.eta * cfg.noise_level + 1e-12;
    auto res_of = [&](const std::vector<double>& z) {
        std::vector<double> az = sys.op.apply(z);
        double s = 0.0;
        for (size_t i = 0; i < az.size(); ++i) s += (az[i] - sys.b[i]) * (az[i] - sys.b[i]);
        return std::sqrt(s) / normb;
    };

    double res_rel = res_of(x);
    if (discrepancy_stop(res_rel, cfg)) {
        res.stop_reason = StopReason::discrepancy;
        res.x = std::move(x);
        res.wall_time = clock.seconds();
        return res;
    }

    // Initial penalty weight: balances the smoothness term against the
    // misfit level the discrepancy principle aims for.
    double tv0 = tv(x, grid, cfg.tv_epsilon).first;
    double lambda_reg = cfg.lambda_reg0;
    if (lambda_reg <= 0) {
        double delta = target * normb;
        lambda_reg = 0.1 * delta * delta / std::max(tv0, 1e-12);
        lambda_reg = std::max(lambda_reg, 1e-30);
    }

    double prev_norm = std::max(norm2(x), 1e-30);
    double prev_tv = std::max(tv0, 1e-30);
    double prev_lambda = lambda_reg;
    res.stop_reason = StopReason::max_iter;

    for (int outer = 1; outer <= cfg.max_iter; ++outer) {
        // Reweighted quadratic surrogate of TV at the current iterate:
        // weights 1/phi per pixel, split over the dx and dy differences.
        std::vector<double> wts(x.size(), 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const int z = flatten_index(i, j, n);
                double dx = (j + 1 < n) ? x[flatten_index(i, j + 1, n)] - x[z] : 0.0;
                double dy = (i + 1 < n) ? x[flatten_index(i + 1, j, n)] - x[z] : 0.0;
                wts[z] = 1.0 / std::sqrt(dx * dx + dy * dy + cfg.tv_epsilon * cfg.tv_epsilon);
            }
        const double sl = std::sqrt(lambda_reg);

        // CGLS on the stacked operator [A; sqrt(lambda) B] with data [b; 0].
        auto apply_aug = [&](const std::vector<double>& v, std::vector<double>& top,
                             std::vector<double>& bx, std::vector<double>& by) {
            top = sys.op.apply(v);
            bx.assign(v.size(), 0.0);
            by.assign(v.size(), 0.0);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const int z = flatten_index(i, j, n);
                    const double w = sl * std::sqrt(wts[z]);
                    if (j + 1 < n) bx[z] = w * (v[flatten_index(i, j + 1, n)] - v[z]);
                    if (i + 1 < n) by[z] = w * (v[flatten_index(i + 1, j, n)] - v[z]);
                }
        };
        auto adjoint_aug = [&](const std::vector<double>& top, const std::vector<double>& bx,
                               const std::vector<double>& by) {
            std::vector<double> out = sys.op.apply_adjoint(top);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const int z = flatten_index(i, j, n);
                    const double w = sl * std::sqrt(wts[z]);
                    if (j + 1 < n) {
                        out[z] -= w * bx[z];
                        out[flatten_index(i, j + 1, n)] += w * bx[z];
                    }
                    if (i + 1 < n) {
                        out[z] -= w * by[z];
                        out[flatten_index(i + 1, j, n)] += w * by[z];
                    }
                }
            return out;
        };

        std::vector<double> rt, rbx, rby;
        apply_aug(x, rt, rbx, rby);
        for (size_t i = 0; i < rt.size(); ++i) rt[i] = sys.b[i] - rt[i];
        for (auto& v : rbx) v = -v;
        for (auto& v : rby) v = -v;
        std::vector<double> s = adjoint_aug(rt, rbx, rby);
        std::vector<double> p = s;
        double gamma = dot(s, s);
        const double gamma0 = gamma;
        for (int inner = 0; inner < cfg.htv_inner && gamma > 1e-28 * gamma0; ++inner) {
            std::vector<double> qt, qbx, qby;
            apply_aug(p, qt, qbx, qby);
            double q2 = dot(qt, qt) + dot(qbx, qbx) + dot(qby, qby);
            if (q2 <= 0) break;
            double alpha = gamma / q2;
            for (size_t i = 0; i < x.size(); ++i) x[i] += alpha * p[i];
            for (size_t i = 0; i < rt.size(); ++i) rt[i] -= alpha * qt[i];
            for (size_t i = 0; i < rbx.size(); ++i) rbx[i] -= alpha * qbx[i];
            for (size_t i = 0; i < rby.size(); ++i) rby[i] -= alpha * qby[i];
            s = adjoint_aug(rt, rbx, rby);
            double gamma_new = dot(s, s);
            double beta = gamma_new / gamma;
            gamma = gamma_new;
            for (size_t i = 0; i < p.size(); ++i) p[i] = s[i] + beta * p[i];
        }
        const bool subproblem_converged = gamma <= 1e-28 * std::max(gamma0, 1e-300);
        clamp_nonneg(x);

        res_rel = res_of(x);
        res.iterations = outer;
        record(res, cfg, outer, res_rel, x);

        double cur_norm = std::max(norm2(x), 1e-30);
        double cur_tv = std::max(tv(x, grid, cfg.tv_epsilon).first, 1e-30);
        bool stable = outer >= 2 &&
                      std::abs(cur_norm - prev_norm) < cfg.tol_outer * prev_norm &&
                      std::abs(cur_tv - prev_tv) < cfg.tol_outer * prev_tv &&
                      std::abs(lambda_reg - prev_lambda) <
                          cfg.tol_outer * std::max(prev_lambda, 1e-30);
        prev_norm = cur_norm;
        prev_tv = cur_tv;
        prev_lambda = lambda_reg;

        if (stable || (res_rel <= target && subproblem_converged)) {
            res.stop_reason =
                res_rel <= target ? StopReason::discrepancy : StopReason::stabilized;
            break;
        }

        // Discrepancy-driven weight update: overshooting residual lowers the
        // penalty, overfitting raises it.
        double ratio = target > 0 ? target / std::max(res_rel, 1e-30) : 0.2;
        lambda_reg *= std::clamp(ratio, 0.2, 5.0);
    }
    res.x = std::move(x);
    res.wall_time = clock.seconds();
    return res;
}

SolverResult solve_by_name(const std::string& name, const LinearSystem& sys,
                           const SolverConfig& cfg, const Grid& grid) {
    if (name == "mrnsd") return solve_mrnsd(sys, cfg);
    if (name == "sart") return solve_sart(sys, cfg);
    if (name == "fista") return solve_fista(sys, cfg);
    if (name == "nnfcgls") return solve_nnfcgls(sys, cfg);
    if (name == "htv") return solve_htv(sys, cfg, grid);
    throw std::invalid_argument("unknown solver '" + name +
                                "' (expected mrnsd, sart, fista, nnfcgls, htv)");
}

}  // namespace lsfm
