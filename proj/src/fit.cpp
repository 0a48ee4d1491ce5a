#include "cdsurf/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace cdsurf {

namespace {

double effective_sigma(const CurvePoint& pt) {
    if (pt.stderr_ > 0) return pt.stderr_;
    // Zero-failure points: floor the uncertainty at the one-count level.
    const double t = std::max<long>(pt.trials, 1);
    const double pf = std::clamp(pt.p_fail, 0.5 / t, 1.0 - 0.5 / t);
    return std::sqrt(pf * (1.0 - pf) / t);
}

struct LinearSolve {
    double b[3] = {0, 0, 0};
    double chi2 = std::numeric_limits<double>::infinity();
    bool ok = false;
};

// Weighted least squares of y on (1, x, x^2).
LinearSolve solve_quadratic(const std::vector<double>& x, const std::vector<double>& y,
                            const std::vector<double>& w) {
    double a[3][4] = {};
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double basis[3] = {1.0, x[i], x[i] * x[i]};
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) a[r][c] += w[i] * basis[r] * basis[c];
            a[r][3] += w[i] * basis[r] * y[i];
        }
    }
    // Gaussian elimination with partial pivoting on the 3x4 system.
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        if (std::abs(a[pivot][col]) < 1e-14) return {};
        if (pivot != col) std::swap(a[pivot], a[col]);
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < 4; ++c) a[r][c] -= f * a[col][c];
        }
    }
    LinearSolve out;
    for (int r = 0; r < 3; ++r) out.b[r] = a[r][3] / a[r][r];
    out.ok = true;
    return out;
}

struct FitData {
    std::vector<double> p, dpow_base, y, w;  // dpow_base holds d as double
};

double evaluate(const FitData& data, double p_th, double nu, LinearSolve& solve) {
    std::vector<double> x(data.p.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = (data.p[i] - p_th) * std::pow(data.dpow_base[i], 1.0 / nu);
    }
    solve = solve_quadratic(x, data.y, data.w);
    if (!solve.ok) return std::numeric_limits<double>::infinity();
    double chi2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = solve.b[0] + solve.b[1] * x[i] + solve.b[2] * x[i] * x[i];
        chi2 += data.w[i] * (data.y[i] - f) * (data.y[i] - f);
    }
    solve.chi2 = chi2;
    return chi2;
}

bool invert5(const double in[5][5], double out[5][5]) {
    double a[5][10] = {};
    for (int r = 0; r < 5; ++r) {
        for (int c = 0; c < 5; ++c) a[r][c] = in[r][c];
        a[r][5 + r] = 1.0;
    }
    for (int col = 0; col < 5; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 5; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        if (std::abs(a[pivot][col]) < 1e-300) return false;
        if (pivot != col) {
            for (int c = 0; c < 10; ++c) std::swap(a[pivot][c], a[col][c]);
        }
        const double inv = 1.0 / a[col][col];
        for (int c = 0; c < 10; ++c) a[col][c] *= inv;
        for (int r = 0; r < 5; ++r) {
            if (r == col) continue;
            const double f = a[r][col];
            for (int c = 0; c < 10; ++c) a[r][c] -= f * a[col][c];
        }
    }
    for (int r = 0; r < 5; ++r) {
        for (int c = 0; c < 5; ++c) out[r][c] = a[r][5 + c];
    }
    return true;
}

}  // namespace

ThresholdFit fit_threshold(const std::vector<CurvePoint>& points, const FitWindow& window) {
    FitData data;
    std::set<int> dset;
    std::set<double> pset;
    for (const auto& pt : points) {
        if (pt.p < window.p_lo - 1e-12 || pt.p > window.p_hi + 1e-12) continue;
        data.p.push_back(pt.p);
        data.dpow_base.push_back(pt.d);
        data.y.push_back(pt.p_fail);
        const double s = effective_sigma(pt);
        data.w.push_back(1.0 / (s * s));
        dset.insert(pt.d);
        pset.insert(pt.p);
    }
    if (dset.size() < 3) throw std::invalid_argument("threshold fit needs >= 3 distances in window");
    if (pset.size() < 4) throw std::invalid_argument("threshold fit needs >= 4 p points in window");

    // Multi-start grid over (p_th, nu).
    double best_chi2 = std::numeric_limits<double>::infinity();
    double best_pth = 0.0, best_nu = 1.0;
    const int np = 61, nn = 21;
    for (int i = 0; i <= np; ++i) {
        const double pth = window.p_lo + (window.p_hi - window.p_lo) * i / np;
        for (int k = 0; k <= nn; ++k) {
            const double nu = 0.5 + (2.5 - 0.5) * k / nn;
            LinearSolve solve;
            const double chi2 = evaluate(data, pth, nu, solve);
            if (chi2 < best_chi2) {
                best_chi2 = chi2;
                best_pth = pth;
                best_nu = nu;
            }
        }
    }
    if (!std::isfinite(best_chi2)) throw std::runtime_error("threshold fit failed: degenerate data");

    // Nelder-Mead refinement in (p_th, nu).
    struct Vertex {
        double pth, nu, chi2;
    };
    auto eval = [&](double pth, double nu) {
        if (nu < 0.05 || nu > 20.0) return std::numeric_limits<double>::infinity();
        LinearSolve solve;
        return evaluate(data, pth, nu, solve);
    };
    const double dp = std::max(1e-4, (window.p_hi - window.p_lo) / 50.0);
    std::array<Vertex, 3> simplex{{{best_pth, best_nu, 0},
                                   {best_pth + dp, best_nu, 0},
                                   {best_pth, best_nu + 0.1, 0}}};
    for (auto& v : simplex) v.chi2 = eval(v.pth, v.nu);
    for (int iter = 0; iter < 400; ++iter) {
        std::sort(simplex.begin(), simplex.end(),
                  [](const Vertex& a, const Vertex& b) { return a.chi2 < b.chi2; });
        if (std::abs(simplex[2].chi2 - simplex[0].chi2) < 1e-12 * (1.0 + simplex[0].chi2)) break;
        const double cx = (simplex[0].pth + simplex[1].pth) / 2;
        const double cn = (simplex[0].nu + simplex[1].nu) / 2;
        Vertex refl{cx + (cx - simplex[2].pth), cn + (cn - simplex[2].nu), 0};
        refl.chi2 = eval(refl.pth, refl.nu);
        if (refl.chi2 < simplex[0].chi2) {
            Vertex exp_{cx + 2 * (cx - simplex[2].pth), cn + 2 * (cn - simplex[2].nu), 0};
            exp_.chi2 = eval(exp_.pth, exp_.nu);
            simplex[2] = exp_.chi2 < refl.chi2 ? exp_ : refl;
        } else if (refl.chi2 < simplex[1].chi2) {
            simplex[2] = refl;
        } else {
            Vertex contr{cx + 0.5 * (simplex[2].pth - cx), cn + 0.5 * (simplex[2].nu - cn), 0};
            contr.chi2 = eval(contr.pth, contr.nu);
            if (contr.chi2 < simplex[2].chi2) {
                simplex[2] = contr;
            } else {
                for (int i = 1; i < 3; ++i) {
                    simplex[i].pth = simplex[0].pth + 0.5 * (simplex[i].pth - simplex[0].pth);
                    simplex[i].nu = simplex[0].nu + 0.5 * (simplex[i].nu - simplex[0].nu);
                    simplex[i].chi2 = eval(simplex[i].pth, simplex[i].nu);
                }
            }
        }
    }
    std::sort(simplex.begin(), simplex.end(),
              [](const Vertex& a, const Vertex& b) { return a.chi2 < b.chi2; });

    ThresholdFit fit;
    fit.p_th = simplex[0].pth;
    fit.nu = simplex[0].nu;
    fit.window = window;
    LinearSolve solve;
    fit.chi2 = evaluate(data, fit.p_th, fit.nu, solve);
    fit.b0 = solve.b[0];
    fit.b1 = solve.b[1];
    fit.b2 = solve.b[2];
    fit.ndof = static_cast<int>(data.p.size()) - 5;
    fit.distances.assign(dset.begin(), dset.end());

    const double edge_tol = 1e-6 * std::max(1.0, window.p_hi - window.p_lo);
    if (fit.p_th <= window.p_lo + edge_tol || fit.p_th >= window.p_hi - edge_tol) {
        throw std::runtime_error("threshold fit failed: crossing outside window");
    }
    if (std::abs(fit.b1) < 1e-9) {
        throw std::runtime_error("threshold fit failed: no crossing (flat curves)");
    }

    // Gauss-Newton covariance from the full five-parameter Jacobian.
    double jtj[5][5] = {};
    for (std::size_t i = 0; i < data.p.size(); ++i) {
        const double dpow = std::pow(data.dpow_base[i], 1.0 / fit.nu);
        const double x = (data.p[i] - fit.p_th) * dpow;
        const double dfdx = fit.b1 + 2.0 * fit.b2 * x;
        const double jac[5] = {
            -dfdx * dpow,
            dfdx * (data.p[i] - fit.p_th) * dpow * std::log(data.dpow_base[i]) * (-1.0 / (fit.nu * fit.nu)),
            1.0,
            x,
            x * x,
        };
        for (int r = 0; r < 5; ++r) {
            for (int c = 0; c < 5; ++c) jtj[r][c] += data.w[i] * jac[r] * jac[c];
        }
    }
    double cov[5][5];
    if (!invert5(jtj, cov)) {
        throw std::runtime_error("threshold fit failed: singular covariance");
    }
    for (int r = 0; r < 5; ++r) {
        for (int c = 0; c < 5; ++c) fit.covariance[r][c] = cov[r][c];
    }
    return fit;
}

SlopeFit subthreshold_scan(const std::vector<CurvePoint>& points) {
    SlopeFit out;
    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    for (const auto& pt : points) {
        if (pt.p_fail <= 0) {
            ++out.points_dropped;
            continue;
        }
        const double y = std::log(pt.p_fail);
        const double sigma_y = effective_sigma(pt) / pt.p_fail;
        const double w = 1.0 / (sigma_y * sigma_y);
        const double x = pt.d;
        sw += w;
        swx += w * x;
        swy += w * y;
        swxx += w * x * x;
        swxy += w * x * y;
        ++out.points_used;
    }
    if (out.points_used < 2) throw std::invalid_argument("subthreshold scan needs >= 2 nonzero points");
    const double det = sw * swxx - swx * swx;
    if (std::abs(det) < 1e-12) throw std::runtime_error("subthreshold scan: degenerate design");
    out.slope = (sw * swxy - swx * swy) / det;
    out.intercept = (swxx * swy - swx * swxy) / det;
    out.slope_stderr = std::sqrt(sw / det);
    return out;
}

}  // namespace cdsurf
