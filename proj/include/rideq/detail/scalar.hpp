#pragma once

// Small scalar root-finding / maximization helpers shared by the solvers.
// Everything here assumes the caller has established the required bracket
// or unimodality; no global searching is done.

#include <cmath>

namespace rideq::detail {

// Bisection for f with f(lo) and f(hi) of opposite sign. Stops when the
// bracket width falls below tol or after max_iter halvings.
template <class F>
double bisect(F&& f, double lo, double hi, double tol, int max_iter = 200) {
    double flo = f(lo);
    for (int it = 0; it < max_iter && (hi - lo) > tol; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if ((fm >= 0.0) == (flo >= 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Bisection on a boolean predicate: pred(lo) true, pred(hi) false; returns
// the boundary point. Used for feasibility frontiers.
template <class P>
double bisect_predicate(P&& pred, double lo, double hi, double tol, int max_iter = 200) {
    for (int it = 0; it < max_iter && (hi - lo) > tol; ++it) {
        double mid = 0.5 * (lo + hi);
        if (pred(mid))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

// Golden-section maximization of a unimodal f on [lo, hi].
template <class F>
double golden_max(F&& f, double lo, double hi, double tol, int max_iter = 200) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

} // namespace rideq::detail
