#pragma once

#include <complex>

#include "plsm/point.hpp"

namespace plsm {

/// Stopping rule for the infinite series evaluators (disk scattering series,
/// Graf re-expansion). A series stops once the last term's magnitude drops
/// below rel_tol relative to the partial sum, or when max_terms is reached.
struct TruncationPolicy {
    double rel_tol = 1e-14;
    int max_terms = 200;
};

/// Reports how a truncated series evaluation ended.
struct SeriesStatus {
    int terms_used = 0;
    bool hit_cap = false;  // stopped by max_terms, not by rel_tol
};

/// Bessel function of the first kind, integer order. Negative orders are
/// routed through J_{-n}(x) = (-1)^n J_n(x) so the symmetry holds exactly.
/// Requires x >= 0 and finite.
double bessel_j(int n, double x);

/// Hankel function of the first kind H_n^(1)(x) = J_n(x) + i Y_n(x), x > 0.
/// Negative orders use H_{-n} = (-1)^n H_n. If Y_n overflows the double
/// range (tiny x, large n) the imaginary part is returned as -infinity.
Complex hankel1(int n, double x);

/// Free-space Green function of the 2D Helmholtz operator,
/// phi(x, z) = (i/4) H_0^(1)(k |x - z|). Requires x != z, k > 0.
Complex green2d(const Point2& x, const Point2& z, double k);

/// Graf re-expansion of H_0^(1)(k|x - z|) about the pole y:
///
///   sum_n H_n^(1)(k|y-z|) J_n(k|x-y|) e^{-i n (mu + pi)} e^{i n theta},
///
/// where theta is the angle of x-y and mu the angle of y-z. Converges for
/// |x - y| < |y - z|; a violation throws std::domain_error.
Complex graf_h0(const Point2& x, const Point2& y, const Point2& z, double k,
                const TruncationPolicy& policy = {}, SeriesStatus* status = nullptr);

namespace detail {

/// Bessel function of the second kind (internal building block; overflow at
/// small arguments maps to -infinity with the correct sign).
double bessel_y(int n, double x);

/// One-line rate-limited warning to stderr (used when a series hits its cap).
void warn_truncation(const char* where);

}  // namespace detail

}  // namespace plsm
