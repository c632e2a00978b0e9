#pragma once

#include <functional>
#include <memory>

#include "hetnet/numerics.hpp"
#include "hetnet/rng.hpp"

namespace hetnet {

struct Vec2 {
    double x = 0.0, y = 0.0;
    double norm() const { return std::hypot(x, y); }
};

// Displacement density of offspring points around their cluster center.
// Only isotropic kernels are supported: every conditional distance law below
// depends on the center through its distance alone, which requires the
// kernel to be rotation invariant.  Custom kernels are probed at
// construction and rejected if the sampled angular variation exceeds 1e-6.
class ClusterKernel {
  public:
    enum class Kind { Gaussian, Custom };

    static ClusterKernel gaussian(double sigma_km);

    // pdf2d must integrate to 1 over the plane (checked by quadrature within
    // 1e-6).  scale_km seeds the quadrature and the sampling table; pass the
    // radius holding the bulk of the mass (sigma for a Gaussian-like kernel).
    static ClusterKernel custom(std::function<double(double, double)> pdf2d,
                                double scale_km);

    Kind kind() const { return kind_; }
    bool is_gaussian() const { return kind_ == Kind::Gaussian; }
    double sigma() const;      // Gaussian only
    double scale() const { return scale_; }
    double pdf2d(double y1, double y2) const;

    // radius below which all but ~1e-12 of the kernel mass lies
    double radial_extent() const { return extent_; }

    Vec2 sample_offset(Rng& rng) const;

  private:
    ClusterKernel() = default;

    Kind kind_ = Kind::Gaussian;
    double sigma_ = 0.0;
    double scale_ = 0.0;
    double extent_ = 0.0;
    std::function<double(double, double)> pdf_;
    // inverse radial CDF table for sampling custom kernels
    std::shared_ptr<const numerics::PchipInterpolant> inv_radial_cdf_;
};

// Conditional distance law container: pdf/cdf of a distance t given the
// conditioning distance nu (ignored by unconditional laws).
struct ConditionalDistanceLaw {
    std::function<double(double, double)> pdf; // (t, nu)
    std::function<double(double, double)> cdf;
};

// F_U(u|nu0): distance from a point at distance nu0 of the cluster center to
// an offspring of that cluster.  Gaussian kernels use the Rician/Marcum
// closed form; custom kernels integrate the radial density.
double distance_cdf_general(const ClusterKernel& kernel, double u, double nu0);

// f_U(u|nu0); Gaussian fast path is the Rician density with scaled Bessel.
double distance_pdf(const ClusterKernel& kernel, double u, double nu0);

// f_V0(nu0): distance from the typical user to its own cluster center;
// Rayleigh for a Gaussian kernel.
double user_center_distance_pdf(const ClusterKernel& user_kernel, double nu0);

// f_Ts(t|nu): distance to an offspring of a cluster centered nu away.  Same
// functional form as distance_pdf; named separately so the interference code
// reads like the derivation it implements.
double intercluster_distance_pdf(const ClusterKernel& sbs_kernel, double t,
                                 double nu);

ConditionalDistanceLaw make_distance_law(const ClusterKernel& kernel);

namespace detail {
// Alternative evaluation routes kept for cross-checking the production paths.
double distance_cdf_cartesian(const ClusterKernel& kernel, double u, double nu0);
double distance_cdf_polar(const ClusterKernel& kernel, double u, double nu0);
} // namespace detail

} // namespace hetnet
