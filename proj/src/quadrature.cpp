#include "fracmap/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <map>
#include <mutex>

namespace fracmap::quad {

namespace {

// Node of the tanh-sinh rule on (-1, 1): s = tanh(w), w = (pi/2) sinh(u).
// Complements 1 -+ s are carried explicitly so endpoint distances survive in
// double precision down to ~1e-300.
struct DeNode {
    double weight;     // (pi/2) cosh(u) / cosh^2(w)
    double comp_left;  // 1 + s
    double comp_right; // 1 - s
};

DeNode de_node(double u)
{
    const double w = 0.5 * pi * std::sinh(u);
    const double e2w = std::exp(2.0 * w);
    DeNode n;
    n.comp_right = 2.0 / (1.0 + e2w);
    n.comp_left = 2.0 / (1.0 + 1.0 / e2w);
    // 1 - s^2 = comp_left * comp_right, no cancellation.
    n.weight = 0.5 * pi * std::cosh(u) * n.comp_left * n.comp_right;
    return n;
}

constexpr double kUmax = 6.1;

} // namespace

QuadratureResult tanh_sinh_line(const LineIntegrand& f, double a, double b,
                                double tol, long max_evaluations)
{
    QuadratureResult res;
    if (!(b > a)) throw numerical_error("tanh_sinh_line: requires b > a");
    const double half = 0.5 * (b - a);

    auto eval_at = [&](double u) -> cplx {
        const DeNode n = de_node(u);
        const double da = half * n.comp_left;
        const double db = half * n.comp_right;
        const double x = (da < db) ? a + da : b - db;
        res.evaluations++;
        return f(x, da, db) * n.weight;
    };

    double h = 1.0;
    cplx sum = eval_at(0.0);
    for (int k = 1; k * h <= kUmax; ++k) sum += eval_at(k * h) + eval_at(-k * h);
    cplx integral = sum * (h * half);

    double err = std::abs(integral);
    for (int level = 1; level <= 12; ++level) {
        h *= 0.5;
        const long new_nodes = 2 * static_cast<long>(kUmax / h / 2.0 + 1.0);
        if (res.evaluations + new_nodes > max_evaluations) break;
        cplx add{0.0, 0.0};
        for (int k = 1; k * h <= kUmax; k += 2) add += eval_at(k * h) + eval_at(-k * h);
        const cplx next = 0.5 * integral + add * (h * half);
        err = std::abs(next - integral);
        integral = next;
        if (level >= 2 && err <= tol * std::max(1.0, std::abs(integral))) {
            res.converged = true;
            break;
        }
    }
    res.value = integral;
    res.error_estimate = err;
    return res;
}

QuadratureResult tanh_sinh_line(const std::function<cplx(double)>& f, double a,
                                double b, double tol, long max_evaluations)
{
    return tanh_sinh_line(
        [&f](double x, double, double) { return f(x); }, a, b, tol,
        max_evaluations);
}

namespace {

std::mutex g_rule_mutex;

std::vector<std::pair<double, double>> golub_welsch(
    const std::vector<double>& diag, const std::vector<double>& offdiag,
    double mu0)
{
    const int n = static_cast<int>(diag.size());
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        J(i, i) = diag[i];
        if (i + 1 < n) {
            J(i, i + 1) = offdiag[i];
            J(i + 1, i) = offdiag[i];
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    std::vector<std::pair<double, double>> rule(n);
    for (int i = 0; i < n; ++i) {
        const double v0 = es.eigenvectors()(0, i);
        rule[i] = {es.eigenvalues()(i), mu0 * v0 * v0};
    }
    std::sort(rule.begin(), rule.end());
    return rule;
}

} // namespace

const std::vector<std::pair<double, double>>& gauss_legendre(int n)
{
    static std::map<int, std::vector<std::pair<double, double>>> cache;
    std::lock_guard<std::mutex> lock(g_rule_mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<double> diag(n, 0.0), off(n - 1);
    for (int k = 1; k < n; ++k) off[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
    auto rule = golub_welsch(diag, off, 2.0);
    return cache.emplace(n, std::move(rule)).first->second;
}

std::vector<std::pair<double, double>> gauss_jacobi01(int n, double beta)
{
    static std::map<std::pair<int, double>,
                    std::vector<std::pair<double, double>>>
        cache;
    std::lock_guard<std::mutex> lock(g_rule_mutex);
    auto key = std::make_pair(n, beta);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    if (beta <= -1.0) throw numerical_error("gauss_jacobi01: beta <= -1");

    // Jacobi weight (1+u)^beta on [-1,1] (alpha = 0), then map to [0,1].
    std::vector<double> diag(n), off(n - 1);
    diag[0] = beta / (beta + 2.0);
    for (int k = 1; k < n; ++k) {
        const double den = (2.0 * k + beta) * (2.0 * k + beta + 2.0);
        diag[k] = beta * beta / den;
        const double num = 2.0 * k * (k + beta) / (2.0 * k + beta);
        off[k - 1] = num / std::sqrt((2.0 * k + beta + 1.0) * (2.0 * k + beta - 1.0));
    }
    const double mu0 = std::pow(2.0, beta + 1.0) / (beta + 1.0);
    auto rule = golub_welsch(diag, off, mu0);
    const double scale = std::pow(0.5, beta + 1.0);
    for (auto& [x, w] : rule) {
        x = 0.5 * (1.0 + x);
        w *= scale;
    }
    cache.emplace(key, rule);
    return rule;
}

QuadratureResult integrate_singular(const ArcIntegrand& f, double tol)
{
    const double span = f.theta_end - f.theta_start;
    if (!(span > 0.0) || span > 2.0 * pi + 1e-12)
        throw numerical_error("integrate_singular: bad arc span");
    if (f.exponent_start.real() <= -1.0 || f.exponent_end.real() <= -1.0)
        throw numerical_error("integrate_singular: endpoint exponent not integrable");

    const bool has_p = f.exponent_start != cplx{0.0, 0.0};
    const bool has_q = f.exponent_end != cplx{0.0, 0.0};
    auto integrand = [&](double theta, double da, double db) -> cplx {
        cplx v = f.density(theta);
        if (has_p) {
            // t - a = 2 i sin(da/2) e^{i(theta_start + da/2)}
            const cplx ta = 2.0 * I * std::sin(0.5 * da) * unit(f.theta_start + 0.5 * da);
            v *= std::pow(ta, f.exponent_start);
        }
        if (has_q) {
            const cplx tb = -2.0 * I * std::sin(0.5 * db) * unit(f.theta_end - 0.5 * db);
            v *= std::pow(tb, f.exponent_end);
        }
        return v;
    };
    return tanh_sinh_line(integrand, f.theta_start, f.theta_end, tol);
}

namespace {

// Sub-arcs of the circle delimited by the density breakpoints, each returned
// as an angle interval with end > start.
std::vector<std::pair<double, double>> circle_arcs(
    const std::vector<double>& breakpoints, double extra,
    bool have_extra)
{
    std::vector<double> pts;
    for (double b : breakpoints) pts.push_back(wrap_2pi(b));
    if (have_extra) pts.push_back(wrap_2pi(extra));
    if (pts.empty()) pts = {0.0, 0.5 * pi, pi, 1.5 * pi};
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-14; }),
              pts.end());
    std::vector<std::pair<double, double>> arcs;
    const int n = static_cast<int>(pts.size());
    for (int i = 0; i < n; ++i) {
        const double s = pts[i];
        const double e = (i + 1 < n) ? pts[i + 1] : pts[0] + 2.0 * pi;
        if (e - s > 1e-13) arcs.emplace_back(s, e);
    }
    return arcs;
}

cplx sum_arcs(const std::vector<std::pair<double, double>>& arcs,
              const std::function<cplx(double)>& h, double tol)
{
    cplx total{0.0, 0.0};
    const double arc_tol = tol / std::max<size_t>(1, arcs.size());
    for (auto [s, e] : arcs)
        total += tanh_sinh_line(h, s, e, arc_tol).value;
    return total;
}

// Near-singular circle kernels need t - t0 without rounding in the angle;
// the maker receives (theta, t - t0 stable) per node.
cplx sum_arcs_near(const std::vector<std::pair<double, double>>& arcs,
                   double theta0,
                   const std::function<cplx(double, cplx)>& h, double tol)
{
    cplx total{0.0, 0.0};
    const double arc_tol = tol / std::max<size_t>(1, arcs.size());
    const double t0w = wrap_2pi(theta0);
    for (auto [s, e] : arcs) {
        const bool at_start = std::abs(wrap_pi(s - t0w)) < 1e-13;
        const bool at_end = std::abs(wrap_pi(e - t0w)) < 1e-13;
        auto f = [&, s, e, at_start, at_end](double th, double da, double db) {
            cplx tmt0;
            if (at_start)
                tmt0 = 2.0 * I * std::sin(0.5 * da) * unit(s + 0.5 * da);
            else if (at_end)
                tmt0 = -2.0 * I * std::sin(0.5 * db) * unit(e - 0.5 * db);
            else
                tmt0 = unit(th) - unit(t0w);
            return h(th, tmt0);
        };
        total += tanh_sinh_line(f, s, e, arc_tol).value;
    }
    return total;
}

} // namespace

cplx cauchy_off_circle(const CircleDensity& g, cplx zeta, double tol,
                       double near_delta)
{
    const double rho = std::abs(zeta);
    if (rho == 1.0)
        throw numerical_error("cauchy_off_circle: zeta on the circle, use PV");
    const bool interior = rho < 1.0;
    const bool near = std::abs(rho - 1.0) < near_delta;

    if (!near) {
        auto arcs = circle_arcs(g.breakpoints, 0.0, false);
        auto h = [&](double th) {
            const cplx t = unit(th);
            return g.g(th) * t / (t - zeta) / (2.0 * pi);
        };
        return sum_arcs(arcs, h, tol);
    }

    const double th0 = std::arg(zeta);
    const cplx g0 = g.g(th0);
    const cplx off = unit(th0) * (1.0 - rho); // t0 - zeta, exact to rounding
    auto arcs = circle_arcs(g.breakpoints, th0, true);
    auto h = [&](double th, cplx tmt0) {
        const cplx t = unit(th);
        return (g.g(th) - g0) * t / (tmt0 + off) / (2.0 * pi);
    };
    cplx v = sum_arcs_near(arcs, th0, h, tol);
    if (interior) v += g0;
    return v;
}

cplx cauchy_deriv_off_circle(const CircleDensity& g, cplx zeta, double tol,
                             double near_delta)
{
    const double rho = std::abs(zeta);
    if (rho == 1.0)
        throw numerical_error("cauchy_deriv_off_circle: zeta on the circle");
    const bool near = std::abs(rho - 1.0) < near_delta;

    if (!near) {
        auto arcs = circle_arcs(g.breakpoints, 0.0, false);
        auto h = [&](double th) {
            const cplx t = unit(th);
            const cplx d = t - zeta;
            return g.g(th) * t / (d * d) / (2.0 * pi);
        };
        return sum_arcs(arcs, h, tol);
    }

    // The constant term drops: contour integral of (t - zeta)^{-2} dt is zero
    // on either side of the circle.
    const double th0 = std::arg(zeta);
    const cplx g0 = g.g(th0);
    const cplx off = unit(th0) * (1.0 - rho);
    auto arcs = circle_arcs(g.breakpoints, th0, true);
    auto h = [&](double th, cplx tmt0) {
        const cplx t = unit(th);
        const cplx d = tmt0 + off;
        return (g.g(th) - g0) * t / (d * d) / (2.0 * pi);
    };
    return sum_arcs_near(arcs, th0, h, tol);
}

cplx cauchy_pv_on_circle(const CircleDensity& g, double theta0, double tol)
{
    const double th0 = wrap_2pi(theta0);
    for (double b : g.breakpoints)
        if (std::abs(wrap_pi(b - th0)) < 1e-12)
            throw numerical_error("cauchy_pv_on_circle: t0 at an arc endpoint");

    const cplx g0 = g.g(th0);
    auto arcs = circle_arcs(g.breakpoints, th0, true);
    auto h = [&](double th, cplx tmt0) {
        const cplx t = unit(th);
        return (g.g(th) - g0) * t / tmt0 / (2.0 * pi);
    };
    return sum_arcs_near(arcs, th0, h, tol) + 0.5 * g0;
}

} // namespace fracmap::quad
