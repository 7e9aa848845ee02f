#ifndef FRACMAP_QUADRATURE_HPP
#define FRACMAP_QUADRATURE_HPP

#include <functional>
#include <span>
#include <vector>

#include "fracmap/complexutil.hpp"

namespace fracmap::quad {

struct QuadratureResult {
    cplx value{0.0, 0.0};
    double error_estimate = 0.0; // absolute, complex modulus
    long evaluations = 0;
    bool converged = false;
};

// Integrand for the double-exponential engine. Arguments are the abscissa x
// and the distances (x - a), (b - x) computed without cancellation, so that
// endpoint factors like (x - a)^(-1/2 + i*beta) can be evaluated accurately
// down to distances near the underflow threshold.
using LineIntegrand = std::function<cplx(double x, double dist_a, double dist_b)>;

// Tanh-sinh quadrature of f over [a, b]. Handles integrable endpoint
// singularities (any exponent with real part > -1, including oscillatory
// imaginary parts) without explicit weight functions.
QuadratureResult tanh_sinh_line(const LineIntegrand& f, double a, double b,
                                double tol, long max_evaluations = 1 << 14);

// Convenience overload for integrands that do not need endpoint distances.
QuadratureResult tanh_sinh_line(const std::function<cplx(double)>& f, double a,
                                double b, double tol,
                                long max_evaluations = 1 << 14);

// Gauss-Legendre nodes/weights on [-1, 1]; cached per n.
const std::vector<std::pair<double, double>>& gauss_legendre(int n);

// Gauss-Jacobi nodes/weights on [0, 1] for the weight x^beta, beta > -1;
// cached per (n, beta). Returned pairs are (node, weight) with the weight
// x^beta factored OUT of the integrand.
std::vector<std::pair<double, double>> gauss_jacobi01(int n, double beta);

// Arc of the unit circle with a smooth density of the angle and known
// endpoint factors (t - a)^{p} (t - b)^{q}, Re p, Re q > -1, where
// a = e^{i theta_start}, b = e^{i theta_end}. The integral computed is
//   int_{theta_start}^{theta_end} density(theta) (t-a)^p (t-b)^q dtheta
// with principal branches for both factors.
struct ArcIntegrand {
    double theta_start = 0.0;
    double theta_end = 0.0; // CCW; must exceed theta_start, span <= 2*pi
    std::function<cplx(double)> density;
    cplx exponent_start{0.0, 0.0};
    cplx exponent_end{0.0, 0.0};
};

QuadratureResult integrate_singular(const ArcIntegrand& f, double tol);

// Density on the full unit circle, smooth except at listed angles.
struct CircleDensity {
    std::vector<double> breakpoints; // ascending angles in [0, 2*pi)
    std::function<cplx(double)> g;   // value at angle theta
};

// (1 / 2 pi i) * contour integral of g(t) / (t - zeta) dt over the circle.
// Switches to singularity subtraction when zeta is within `near_delta` of the
// circle; valid for dist(zeta, circle) >= 1e-6.
cplx cauchy_off_circle(const CircleDensity& g, cplx zeta, double tol,
                       double near_delta = 1e-3);

// Derivative kernel: (1 / 2 pi i) * integral of g(t) / (t - zeta)^2 dt.
cplx cauchy_deriv_off_circle(const CircleDensity& g, cplx zeta, double tol,
                             double near_delta = 1e-3);

// Principal value (1 / 2 pi i) PV integral of g(t) / (t - t0) dt at
// t0 = e^{i theta0} on the circle. Plemelj: interior limit = PV + g/2,
// exterior limit = PV - g/2.
cplx cauchy_pv_on_circle(const CircleDensity& g, double theta0, double tol);

} // namespace fracmap::quad

#endif
