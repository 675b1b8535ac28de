#pragma once

// Reference computations used by the tests. None of these call into the library.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline double simpson_rec(const std::function<double(double)>& g, double a, double b, double fa, double fm,
                          double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = g(lm), frm = g(rm);
    const double left = (m - a) / 6 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6 * (fm + 4 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15 * tol)
        return left + right + (left + right - whole) / 15;
    return simpson_rec(g, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           simpson_rec(g, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

// Adaptive Simpson on [a, b].
inline double simpson(const std::function<double(double)>& g, double a, double b, double tol = 1e-13) {
    if (a == b) return 0.0;
    const double fa = g(a), fb = g(b), fm = g(0.5 * (a + b));
    const double whole = (b - a) / 6 * (fa + 4 * fm + fb);
    return simpson_rec(g, a, b, fa, fm, fb, whole, tol, 50);
}

// Root of a sign-changing function on [lo, hi].
inline double bisect(const std::function<double(double)>& g, double lo, double hi, int iters = 200) {
    double glo = g(lo);
    for (int k = 0; k < iters && hi - lo > 0; ++k) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((gm < 0) == (glo < 0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Periodic Green's function of -v'' + c v by its truncated Fourier series.
// The dropped tail is below 2 / (4 pi^2 K).
inline double fourier_green(double c, double r, double s, int K = 4000) {
    const double two_pi = 2 * std::numbers::pi;
    const double d = r - s;
    double sum = 1.0 / c;
    for (int k = 1; k <= K; ++k) sum += 2 * std::cos(two_pi * k * d) / (c + two_pi * two_pi * k * k);
    return sum;
}

inline double cosh_green(double c, double r, double s) {
    const double q = std::sqrt(c);
    double d = std::abs(r - s);
    d -= std::floor(d);
    return std::cosh(q * (d - 0.5)) / (2 * q * std::sinh(q / 2));
}

// Local extrema of samples of a periodic function: indices where the discrete slope changes sign.
inline std::vector<double> scan_extrema(const std::function<double(double)>& g, int n) {
    std::vector<double> vals(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) vals[static_cast<std::size_t>(i)] = g(static_cast<double>(i) / n);
    std::vector<double> out;
    for (int i = 0; i < n; ++i) {
        const double prev = vals[static_cast<std::size_t>((i + n - 1) % n)];
        const double here = vals[static_cast<std::size_t>(i)];
        const double next = vals[static_cast<std::size_t>((i + 1) % n)];
        if ((here > prev && here >= next) || (here < prev && here <= next)) out.push_back(static_cast<double>(i) / n);
    }
    return out;
}

inline double periodic_distance(double x, double y) {
    double d = std::abs(x - y);
    d -= std::floor(d);
    return std::min(d, 1 - d);
}

}  // namespace oracle
