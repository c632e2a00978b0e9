#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hetnet::numerics {

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Controls the adaptive Gauss-Kronrod integrator.  A semi-infinite upper
// limit is mapped onto [0,1) with t = lo + tail_scale*u/(1-u) by default;
// TruncateAtBound instead stops at lo + truncation_bound.
struct QuadratureSpec {
    double relative_tolerance = 1e-8;
    double absolute_tolerance = 1e-12;
    int max_subdivisions = 4000;

    enum class TailRule { MapToUnitInterval, TruncateAtBound };
    TailRule upper_truncation_policy = TailRule::MapToUnitInterval;
    double tail_scale = 1.0;       // sets where the u-grid resolves mass
    double truncation_bound = 1e9; // TruncateAtBound only

    void check() const {
        if (!(relative_tolerance > 0) || !(absolute_tolerance > 0))
            throw std::invalid_argument("QuadratureSpec: tolerances must be positive");
        if (max_subdivisions < 1)
            throw std::invalid_argument("QuadratureSpec: max_subdivisions must be >= 1");
    }
};

enum class QuadStatus { Converged, MaxSubdivisions, BadIntegrand };

struct QuadResult {
    double value = 0.0;
    double error_bound = std::numeric_limits<double>::infinity();
    QuadStatus status = QuadStatus::BadIntegrand;
    int subdivisions = 0;

    bool converged() const { return status == QuadStatus::Converged; }
};

namespace detail {

// QUADPACK dqk15 nodes/weights on [-1,1].
inline constexpr double kGk15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
inline constexpr double kGk15KronrodW[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double kGk15GaussW[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
bool gk15(F&& f, double a, double b, Segment& out) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    fv[7] = f(c);
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kGk15Nodes[i];
        fv[i] = f(c + dx);
        fv[14 - i] = f(c - dx);
    }
    double resk = 0.0, resg = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double pair = (i == 7) ? fv[7] : fv[i] + fv[14 - i];
        resk += kGk15KronrodW[i] * pair;
        if (i % 2 == 1) resg += kGk15GaussW[i / 2] * pair;
    }
    // scale-aware error estimate a la QUADPACK (resasc damping)
    const double reskh = 0.5 * resk;
    double resasc = kGk15KronrodW[7] * std::abs(fv[7] - reskh);
    for (int i = 0; i < 7; ++i)
        resasc += kGk15KronrodW[i] *
                  (std::abs(fv[i] - reskh) + std::abs(fv[14 - i] - reskh));
    resasc *= std::abs(h);
    double err = std::abs((resk - resg) * h) * 200.0;
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(err / resasc, 1.5));
    out = Segment{a, b, resk * h, err};
    for (int i = 0; i < 15; ++i)
        if (!std::isfinite(fv[i])) return false;
    return true;
}

template <class F>
QuadResult adaptive(F&& f, const std::vector<double>& breaks,
                    const QuadratureSpec& spec) {
    std::vector<Segment> heap;
    heap.reserve(64);
    double total = 0.0, toterr = 0.0;
    int used = 0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        Segment s;
        if (!gk15(f, breaks[i], breaks[i + 1], s))
            return {0.0, std::numeric_limits<double>::infinity(),
                    QuadStatus::BadIntegrand, used};
        ++used;
        total += s.value;
        toterr += s.error;
        heap.push_back(s);
        std::push_heap(heap.begin(), heap.end());
    }
    auto tol = [&] {
        return std::max(spec.absolute_tolerance,
                        spec.relative_tolerance * std::abs(total));
    };
    while (toterr > tol() && used < spec.max_subdivisions) {
        std::pop_heap(heap.begin(), heap.end());
        Segment worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(worst.a < mid && mid < worst.b)) { // interval at rounding floor
            heap.push_back(Segment{worst.a, worst.b, worst.value, 0.0});
            std::push_heap(heap.begin(), heap.end());
            toterr -= worst.error;
            continue;
        }
        Segment left, right;
        if (!gk15(f, worst.a, mid, left) || !gk15(f, mid, worst.b, right))
            return {total, toterr, QuadStatus::BadIntegrand, used};
        ++used;
        total += left.value + right.value - worst.value;
        toterr += left.error + right.error - worst.error;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end());
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end());
    }
    QuadResult r;
    r.value = total;
    r.error_bound = toterr;
    r.subdivisions = used;
    r.status = (toterr <= tol()) ? QuadStatus::Converged : QuadStatus::MaxSubdivisions;
    return r;
}

} // namespace detail

// Integrate f over consecutive intervals [points[0], points[1], ...].
// The last point may be +infinity.  Interior points seed the subdivision so
// narrow features (e.g. a Rician bump far from the origin) are never missed
// by the first coarse pass.
template <class F>
QuadResult integrate(F&& f, std::vector<double> points,
                     const QuadratureSpec& spec = {}) {
    spec.check();
    if (points.size() < 2) throw std::invalid_argument("integrate: need lo < hi");
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
        if (!(points[i] < points[i + 1]))
            throw std::invalid_argument("integrate: points must be increasing");
    if (!std::isfinite(points.front()))
        throw std::invalid_argument("integrate: lower limit must be finite");

    if (std::isinf(points.back())) {
        const double lo = points.front();
        if (spec.upper_truncation_policy == QuadratureSpec::TailRule::TruncateAtBound) {
            points.back() = lo + spec.truncation_bound;
            return detail::adaptive(f, points, spec);
        }
        const double scale = (spec.tail_scale > 0) ? spec.tail_scale : 1.0;
        std::vector<double> u(points.size());
        u.front() = 0.0;
        u.back() = 1.0;
        for (std::size_t i = 1; i + 1 < points.size(); ++i)
            u[i] = (points[i] - lo) / (scale + points[i] - lo);
        auto g = [&f, lo, scale](double v) {
            const double om = 1.0 - v;
            const double t = lo + scale * v / om;
            return f(t) * scale / (om * om);
        };
        return detail::adaptive(g, u, spec);
    }
    return detail::adaptive(f, points, spec);
}

template <class F>
QuadResult integrate(F&& f, double lo, double hi, const QuadratureSpec& spec = {}) {
    return integrate(std::forward<F>(f), std::vector<double>{lo, hi}, spec);
}

template <class F>
double integrate_or_throw(F&& f, std::vector<double> points,
                          const QuadratureSpec& spec, const std::string& what) {
    QuadResult r = integrate(std::forward<F>(f), std::move(points), spec);
    if (r.status == QuadStatus::BadIntegrand)
        throw QuadratureError(what + ": integrand evaluated to a non-finite value");
    if (r.status == QuadStatus::MaxSubdivisions)
        throw QuadratureError(what + ": accuracy not reached (estimate " +
                              std::to_string(r.value) + ", error bound " +
                              std::to_string(r.error_bound) + ")");
    return r.value;
}

template <class F>
double integrate_or_throw(F&& f, double lo, double hi, const QuadratureSpec& spec,
                          const std::string& what) {
    return integrate_or_throw(std::forward<F>(f), std::vector<double>{lo, hi},
                              spec, what);
}

// Modified Bessel function of the first kind, order zero.  Overflows to +inf
// for x > ~709; use bessel_i0_scaled there.
double bessel_i0(double x);

// exp(-x) * I0(x); finite for all x >= 0.
double bessel_i0_scaled(double x);

// Marcum Q-function Q1(a,b), computed by adaptive quadrature of the defining
// integral with exponentially-scaled Bessel terms.
double marcum_q1(double a, double b);

// sin(2*pi/alpha) / (2*pi/alpha), the normalized sinc at 2/alpha.
double sinc_alpha(double alpha);

// Gauss-Legendre nodes/weights on [-1,1] (Newton iteration on P_n).
std::vector<std::pair<double, double>> gauss_legendre(int n);

// Fritsch-Carlson monotone cubic interpolant.
class PchipInterpolant {
  public:
    PchipInterpolant() = default;
    PchipInterpolant(std::vector<double> x, std::vector<double> y);
    double operator()(double x) const;
    bool in_range(double x) const {
        return !x_.empty() && x >= x_.front() && x <= x_.back();
    }
    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

  private:
    std::vector<double> x_, y_, d_; // d_ = endpoint derivatives
};

} // namespace hetnet::numerics
