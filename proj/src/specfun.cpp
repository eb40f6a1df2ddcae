#include "plsm/specfun.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_bessel.h>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace plsm {

namespace {

const bool g_gsl_handler_off = [] {
    gsl_set_error_handler_off();
    return true;
}();

int parity_sign(int n) { return (n & 1) ? -1 : 1; }

}  // namespace

double bessel_j(int n, double x) {
    if (!std::isfinite(x) || x < 0.0)
        throw std::domain_error("bessel_j: argument must be finite and nonnegative");
    if (n < 0) return parity_sign(n) * bessel_j(-n, x);

    gsl_sf_result r;
    const int status = gsl_sf_bessel_Jn_e(n, x, &r);
    if (status == GSL_SUCCESS) return r.val;
    if (status == GSL_EUNDRFLW) return 0.0;
    throw std::runtime_error(std::string("bessel_j: GSL failure: ") + gsl_strerror(status));
}

double detail::bessel_y(int n, double x) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw std::domain_error("bessel_y: argument must be positive and finite");
    if (n < 0) return parity_sign(n) * detail::bessel_y(-n, x);

    gsl_sf_result r;
    const int status = gsl_sf_bessel_Yn_e(n, x, &r);
    if (status == GSL_SUCCESS) return r.val;
    // Y_n(x) -> -(n-1)!/pi (2/x)^n as x -> 0+, so the overflowing branch is
    // negative for every n >= 0.
    if (status == GSL_EOVRFLW) return -std::numeric_limits<double>::infinity();
    throw std::runtime_error(std::string("bessel_y: GSL failure: ") + gsl_strerror(status));
}

Complex hankel1(int n, double x) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw std::domain_error("hankel1: argument must be positive and finite (log singularity at 0)");
    if (n < 0) return double(parity_sign(n)) * hankel1(-n, x);
    return {bessel_j(n, x), detail::bessel_y(n, x)};
}

Complex green2d(const Point2& x, const Point2& z, double k) {
    if (!(k > 0.0)) throw std::domain_error("green2d: wavenumber must be positive");
    const double r = distance(x, z);
    if (r == 0.0) throw std::domain_error("green2d: singular evaluation at x == z");
    return Complex(0.0, 0.25) * hankel1(0, k * r);
}

Complex graf_h0(const Point2& x, const Point2& y, const Point2& z, double k,
                const TruncationPolicy& policy, SeriesStatus* status) {
    if (!(k > 0.0)) throw std::domain_error("graf_h0: wavenumber must be positive");
    if (!(policy.rel_tol > 0.0) || policy.max_terms < 1)
        throw std::invalid_argument("graf_h0: policy requires rel_tol > 0 and max_terms >= 1");
    const Point2 xy = x - y;
    const Point2 yz = y - z;
    const double r_xy = xy.norm();
    const double r_yz = yz.norm();
    if (!(r_xy < r_yz))
        throw std::domain_error("graf_h0: requires |x - y| < |y - z| for convergence");

    const double theta = xy.angle();
    const double mu = yz.angle();

    // n = 0 term; J_n(0) = 0 for n != 0 collapses the series when x == y.
    Complex sum = hankel1(0, k * r_yz) * bessel_j(0, k * r_xy);
    SeriesStatus st{1, false};
    if (r_xy > 0.0) {
        st.hit_cap = true;
        int small_run = 0;
        for (int n = 1; n < policy.max_terms; ++n) {
            // The +/-n pair shares J_n H_n up to sign and conjugate phases.
            const Complex hn = hankel1(n, k * r_yz);
            const double jn = bessel_j(n, k * r_xy);
            const double phase = double(n) * (theta - mu - M_PI);
            sum += 2.0 * hn * jn * std::cos(phase);
            ++st.terms_used;
            // A lone small term may be a Bessel zero inside the oscillatory
            // regime; require two consecutive small pairs.
            small_run = (std::abs(hn * jn) * 2.0 < policy.rel_tol * std::abs(sum)) ? small_run + 1 : 0;
            if (small_run >= 2) {
                st.hit_cap = false;
                break;
            }
        }
        if (st.hit_cap) detail::warn_truncation("graf_h0");
    }
    if (status) *status = st;
    return sum;
}

void detail::warn_truncation(const char* where) {
    static std::atomic<int> count{0};
    if (count.fetch_add(1) < 8)
        std::fprintf(stderr, "[plsm] warning: %s hit its truncation cap before reaching rel_tol\n", where);
}

}  // namespace plsm
