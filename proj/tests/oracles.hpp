#ifndef MCC_TEST_ORACLES_HPP
#define MCC_TEST_ORACLES_HPP

// Brute-force reference routines for the tests. Independent of the library's
// solver paths on purpose: dense scans and finite differences only.

#include <utility>

namespace oracle {

template <typename F>
double dense_argmin(F&& f, double lo, double hi, int points) {
    double best_x = lo, best_v = f(lo);
    for (int i = 1; i < points; ++i) {
        const double x = lo + (hi - lo) * i / double(points - 1);
        const double v = f(x);
        if (v < best_v) {
            best_v = v;
            best_x = x;
        }
    }
    return best_x;
}

template <typename F>
double dense_argmax(F&& f, double lo, double hi, int points) {
    return dense_argmin([&](double x) { return -f(x); }, lo, hi, points);
}

/// Two-stage scan: coarse pass over [lo, hi], then a fine pass around the
/// winner. Resolution of the result is (hi-lo)/(points-1)^2 * 4.
template <typename F>
double zoomed_argmin(F&& f, double lo, double hi, int points) {
    const double coarse = dense_argmin(f, lo, hi, points);
    const double step = (hi - lo) / double(points - 1);
    return dense_argmin(f, coarse - 2.0 * step, coarse + 2.0 * step, points);
}

template <typename F>
double central_difference(F&& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace oracle

#endif
