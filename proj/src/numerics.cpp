#include "hetnet/numerics.hpp"

#include <cmath>

namespace hetnet::numerics {

namespace {

// power series sum_k (x^2/4)^k / (k!)^2; all terms positive, full precision
// up to the asymptotic crossover
double i0_series(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 400; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return sum;
}

// asymptotic expansion of exp(-x) I0(x) for large x
double i0_scaled_asymptotic(double x) {
    const double inv8x = 1.0 / (8.0 * x);
    double term = 1.0, sum = 1.0;
    for (int k = 0; k < 60; ++k) {
        const double m = 2.0 * k + 1.0;
        const double next = term * m * m * inv8x / (k + 1.0);
        if (next >= term) break; // divergent tail reached
        term = next;
        sum += term;
        if (term < sum * 1e-18) break;
    }
    return sum / std::sqrt(2.0 * M_PI * x);
}

constexpr double kSeriesCutoff = 30.0;

void check_nonnegative_finite(double x, const char* fn) {
    if (std::isnan(x) || std::isinf(x) || x < 0.0)
        throw std::domain_error(std::string(fn) + ": argument must be finite and >= 0");
}

} // namespace

double bessel_i0(double x) {
    check_nonnegative_finite(x, "bessel_i0");
    if (x < kSeriesCutoff) return i0_series(x);
    return std::exp(x) * i0_scaled_asymptotic(x);
}

double bessel_i0_scaled(double x) {
    check_nonnegative_finite(x, "bessel_i0_scaled");
    if (x < kSeriesCutoff) return std::exp(-x) * i0_series(x);
    return i0_scaled_asymptotic(x);
}

double marcum_q1(double a, double b) {
    check_nonnegative_finite(a, "marcum_q1");
    check_nonnegative_finite(b, "marcum_q1");
    if (b == 0.0) return 1.0;

    // integrand t exp(-(t^2+a^2)/2) I0(at) = t exp(-(t-a)^2/2) [e^{-at} I0(at)]
    auto f = [a](double t) {
        const double d = t - a;
        return t * std::exp(-0.5 * d * d) * bessel_i0_scaled(a * t);
    };
    QuadratureSpec spec;
    spec.relative_tolerance = 1e-11;
    spec.absolute_tolerance = 1e-300; // pure relative control
    spec.max_subdivisions = 2000;
    spec.tail_scale = std::max(1.0, a);
    std::vector<double> pts{b};
    if (a - 8.0 > b) pts.push_back(a - 8.0);
    if (a + 10.0 > b) pts.push_back(a + 10.0); // bracket the Gaussian bump
    pts.push_back(std::numeric_limits<double>::infinity());
    const double q =
        integrate_or_throw(f, std::move(pts), spec, "marcum_q1");
    return std::clamp(q, 0.0, 1.0);
}

double sinc_alpha(double alpha) {
    if (std::isnan(alpha) || alpha <= 2.0)
        throw std::domain_error("sinc_alpha: path-loss exponent must exceed 2");
    const double y = 2.0 * M_PI / alpha;
    if (y < 1e-8) return 1.0 - y * y / 6.0;
    return std::sin(y) / y;
}

std::vector<std::pair<double, double>> gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    std::vector<std::pair<double, double>> nw(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Tricomi initial guess, then Newton on P_n
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        nw[i] = {-x, w};
        nw[n - 1 - i] = {x, w};
    }
    if (n % 2 == 1) nw[n / 2].first = 0.0;
    return nw;
}

PchipInterpolant::PchipInterpolant(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
        throw std::invalid_argument("PchipInterpolant: need >= 2 matching points");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(x_[i] < x_[i + 1]))
            throw std::invalid_argument("PchipInterpolant: x must be increasing");

    std::vector<double> h(n - 1), slope(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        slope[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    d_.assign(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (slope[i - 1] * slope[i] <= 0.0) {
            d_[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            d_[i] = (w1 + w2) / (w1 / slope[i - 1] + w2 / slope[i]);
        }
    }
    auto end_slope = [](double h0, double h1, double s0, double s1) {
        double d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
        if (d * s0 <= 0.0) d = 0.0;
        else if (s0 * s1 <= 0.0 && std::abs(d) > 3.0 * std::abs(s0)) d = 3.0 * s0;
        return d;
    };
    if (n == 2) {
        d_[0] = d_[1] = slope[0];
    } else {
        d_[0] = end_slope(h[0], h[1], slope[0], slope[1]);
        d_[n - 1] = end_slope(h[n - 2], h[n - 3], slope[n - 2], slope[n - 3]);
    }
}

double PchipInterpolant::operator()(double x) const {
    if (x_.empty()) throw std::logic_error("PchipInterpolant: empty");
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = (it == x_.begin()) ? 0 : (it - x_.begin() - 1);
    if (i + 1 >= x_.size()) i = x_.size() - 2;
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * y_[i] + h * h10 * d_[i] + h01 * y_[i + 1] + h * h11 * d_[i + 1];
}

} // namespace hetnet::numerics
