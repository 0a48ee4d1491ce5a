#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace cdsurf {

struct CurvePoint {
    int d = 0;
    double p = 0.0;
    double p_fail = 0.0;
    double stderr_ = 0.0;
    long trials = 0;
};

struct FitWindow {
    double p_lo = 0.0;
    double p_hi = 1.0;
};

// Critical-exponent finite-size scaling fit: p_fail ~ B0 + B1 x + B2 x^2 with
// x = (p - p_th) d^(1/nu). Parameter order in the covariance:
// (p_th, nu, B0, B1, B2).
struct ThresholdFit {
    double p_th = 0.0;
    double nu = 0.0;
    double b0 = 0.0, b1 = 0.0, b2 = 0.0;
    std::array<std::array<double, 5>, 5> covariance{};
    FitWindow window;
    double chi2 = 0.0;
    int ndof = 0;
    std::vector<int> distances;

    double p_th_stderr() const { return std::sqrt(covariance[0][0]); }
    double nu_stderr() const { return std::sqrt(covariance[1][1]); }
};

// Weighted nonlinear fit: grid multi-start over (p_th, nu) with an inner
// linear solve for the B's, then Nelder-Mead refinement. Throws
// std::invalid_argument on insufficient data and std::runtime_error when the
// fit does not converge or the crossing leaves the window.
ThresholdFit fit_threshold(const std::vector<CurvePoint>& points, const FitWindow& window);

struct SlopeFit {
    double slope = 0.0;
    double slope_stderr = 0.0;
    double intercept = 0.0;
    int points_used = 0;
    int points_dropped = 0;  // p_fail = 0 points skipped with a warning
};

// Weighted linear regression of ln(p_fail) on d at fixed p.
SlopeFit subthreshold_scan(const std::vector<CurvePoint>& points);

}  // namespace cdsurf
