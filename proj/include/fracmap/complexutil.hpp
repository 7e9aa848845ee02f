#ifndef FRACMAP_COMPLEXUTIL_HPP
#define FRACMAP_COMPLEXUTIL_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracmap {

using cplx = std::complex<double>;
using std::numbers::pi;

constexpr cplx I{0.0, 1.0};

inline cplx unit(double angle) { return std::polar(1.0, angle); }

// e^{i b} - e^{i a} without cancellation for small |b - a|.
inline cplx circ_diff(double b, double a)
{
    return 2.0 * I * std::sin(0.5 * (b - a)) * unit(0.5 * (a + b));
}

// Wrap an angle into [0, 2*pi).
inline double wrap_2pi(double a)
{
    double w = std::fmod(a, 2.0 * pi);
    if (w < 0.0) w += 2.0 * pi;
    return w;
}

// Wrap into (-pi, pi].
inline double wrap_pi(double a)
{
    double w = wrap_2pi(a);
    if (w > pi) w -= 2.0 * pi;
    return w;
}

struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct geometry_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Horner evaluation of a Taylor series sum_m c[m] z^m.
inline cplx eval_series(const std::vector<cplx>& c, cplx z)
{
    cplx acc{0.0, 0.0};
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
    return acc;
}

} // namespace fracmap

#endif
