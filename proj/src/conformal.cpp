#include "fracmap/conformal.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <sstream>

#include "fracmap/quadrature.hpp"

namespace fracmap::conf {

using nlohmann::json;

std::pair<cplx, cplx> DiskMap::reflection_boundary(cplx t) const
{
    const cplx tb = std::conj(t);
    return {std::conj(eval(t)), -tb * tb * std::conj(deriv(t))};
}

cplx DiskMap::reflection_deriv(cplx xi) const
{
    const cplx zi = 1.0 / std::conj(xi);
    return -std::conj(deriv(zi)) / (xi * xi);
}

cplx DiskMap::reflection_deriv2(cplx xi) const
{
    const cplx zi = 1.0 / std::conj(xi);
    const cplx xi2 = xi * xi;
    return 2.0 * std::conj(deriv(zi)) / (xi2 * xi) +
           std::conj(deriv2(zi)) / (xi2 * xi2);
}

AffineMap::AffineMap(cplx a, cplx b) : a_(a), b_(b), taylor_{a, b} {}

std::vector<cplx> AffineMap::deriv_taylor(int len) const
{
    std::vector<cplx> c(len, cplx{0.0, 0.0});
    if (len > 0) c[0] = b_;
    return c;
}

namespace {

// z^e for the SC exponents; sqrt fast paths cover slit/square corners.
cplx pow_frac(cplx z, double e)
{
    if (std::abs(e) < 1e-14) return {1.0, 0.0};
    if (std::abs(e - 0.5) < 1e-14) return std::sqrt(z);
    if (std::abs(e + 0.5) < 1e-14) return 1.0 / std::sqrt(z);
    if (std::abs(e - 1.0) < 1e-14) return z;
    return std::pow(z, e);
}

void fft_inplace(std::vector<cplx>& a, bool inverse)
{
    const size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const cplx wl = unit(ang);
        for (size_t i = 0; i < n; i += len) {
            cplx w{1.0, 0.0};
            for (size_t k = 0; k < len / 2; ++k) {
                const cplx u = a[i + k];
                const cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= static_cast<double>(n);
}

double dist_point_segment(cplx p, cplx a, cplx b)
{
    const cplx d = b - a;
    const double L2 = std::norm(d);
    if (L2 == 0.0) return std::abs(p - a);
    double t = ((std::conj(d) * (p - a)).real()) / L2;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(p - (a + t * d));
}

} // namespace

cplx ConformalDiskMap::integrand(cplx zeta) const
{
    cplx prod{1.0, 0.0};
    const size_t n = prevertices_.size();
    for (size_t k = 0; k < n; ++k)
        prod *= pow_frac(1.0 - zeta / prevertices_[k], alphas_[k] - 1.0);
    return prod;
}

cplx ConformalDiskMap::segment_integral(cplx a, cplx b, int sing_a, int sing_b) const
{
    if (a == b) return {0.0, 0.0};
    const size_t n = prevertices_.size();

    auto nearest_foreign = [&](cplx p, int skip) {
        double r = std::numeric_limits<double>::max();
        for (size_t j = 0; j < n; ++j) {
            if (static_cast<int>(j) == skip) continue;
            if (std::abs(alphas_[j] - 1.0) < 1e-14) continue; // no singularity
            r = std::min(r, std::abs(prevertices_[j] - p));
        }
        return r;
    };

    auto panel = [&](cplx pa, cplx pb, int sing) -> cplx {
        const cplx d = pb - pa;
        if (sing >= 0) {
            const double beta = alphas_[sing] - 1.0;
            cplx acc{0.0, 0.0};
            if (std::abs(beta) < 1e-14) {
                for (auto [x, w] : quad::gauss_legendre(opts_.gj_nodes))
                    acc += w * integrand(pa + d * (0.5 + 0.5 * x));
                return 0.5 * d * acc;
            }
            const cplx zk = prevertices_[sing];
            const cplx front = pow_frac(-d / zk, beta);
            for (auto [x, w] : quad::gauss_jacobi01(opts_.gj_nodes, beta)) {
                const cplx s = pa + d * x;
                cplx rest{1.0, 0.0};
                for (size_t j = 0; j < n; ++j) {
                    if (static_cast<int>(j) == sing) continue;
                    rest *= pow_frac(1.0 - s / prevertices_[j], alphas_[j] - 1.0);
                }
                acc += w * rest;
            }
            return d * front * acc;
        }
        cplx acc{0.0, 0.0};
        for (auto [x, w] : quad::gauss_legendre(opts_.gl_nodes))
            acc += w * integrand(pa + d * (0.5 + 0.5 * x));
        return 0.5 * d * acc;
    };

    // directed compound integral with an optional singularity at the start
    auto dir_integral = [&](cplx from, cplx to, int sing) -> cplx {
        cplx total{0.0, 0.0};
        cplx cur = from;
        int cur_sing = sing;
        const double full = std::abs(to - from);
        for (int guard = 0; guard < 4096; ++guard) {
            const double rem = std::abs(to - cur);
            if (rem <= full * 1e-15) return total; // vanishing sliver
            const double R = nearest_foreign(cur, cur_sing);
            const double len = std::min(rem, opts_.panel_ratio * R);
            const bool final = len >= rem * (1.0 - 1e-9);
            const cplx nxt = final ? to : cur + (to - cur) * (len / rem);
            total += panel(cur, nxt, cur_sing);
            if (final) return total;
            cur = nxt;
            cur_sing = -1;
        }
        std::ostringstream os;
        os << "crowding-induced quadrature underflow near prevertex";
        double best = std::numeric_limits<double>::max();
        size_t bi = 0, bj = 0;
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j)
                if (std::abs(prevertices_[i] - prevertices_[j]) < best) {
                    best = std::abs(prevertices_[i] - prevertices_[j]);
                    bi = i;
                    bj = j;
                }
        os << " pair (" << bi << ", " << bj << "), gap " << best;
        throw numerical_error(os.str());
    };

    if (sing_a >= 0 && sing_b >= 0) {
        const cplx mid = 0.5 * (a + b);
        return dir_integral(a, mid, sing_a) - dir_integral(b, mid, sing_b);
    }
    if (sing_b >= 0) return -dir_integral(b, a, sing_b);
    return dir_integral(a, b, sing_a);
}

cplx ConformalDiskMap::eval(cplx zeta) const
{
    if (std::abs(zeta) > 1.0 + 1e-12)
        throw numerical_error("map_eval: point outside the closed disk");
    const size_t n = prevertices_.size();
    int sing_b = -1;
    for (size_t k = 0; k < n; ++k)
        if (std::abs(zeta - prevertices_[k]) < 1e-9) {
            sing_b = static_cast<int>(k);
            break;
        }
    if (std::abs(zeta) <= 0.5)
        return conformal_center_ + sc_constant_ * segment_integral(0.0, zeta, -1, sing_b);
    int anchor = -1;
    double best = std::numeric_limits<double>::max();
    for (size_t k = 0; k < n; ++k) {
        if (static_cast<int>(k) == sing_b) continue;
        const double d = std::abs(zeta - prevertices_[k]);
        if (d < best) {
            best = d;
            anchor = static_cast<int>(k);
        }
    }
    if (best > 0.6)
        return conformal_center_ + sc_constant_ * segment_integral(0.0, zeta, -1, sing_b);
    return vertices_[anchor] +
           sc_constant_ * segment_integral(prevertices_[anchor], zeta, anchor, sing_b);
}

cplx ConformalDiskMap::deriv(cplx zeta) const
{
    return sc_constant_ * integrand(zeta);
}

cplx ConformalDiskMap::deriv2(cplx zeta) const
{
    cplx s{0.0, 0.0};
    for (size_t k = 0; k < prevertices_.size(); ++k)
        s += (alphas_[k] - 1.0) / (zeta - prevertices_[k]);
    return deriv(zeta) * s;
}

std::vector<cplx> ConformalDiskMap::deriv_taylor(int len) const
{
    // omega'' / omega' = sum (alpha_k - 1)/(zeta - z_k); exponentiate the
    // log series term by term.
    std::vector<cplx> l(len, cplx{0.0, 0.0});
    for (int j = 1; j < len; ++j) {
        cplx cj{0.0, 0.0};
        for (size_t k = 0; k < prevertices_.size(); ++k)
            cj += (alphas_[k] - 1.0) * std::pow(prevertices_[k], -static_cast<double>(j));
        l[j] = -cj / static_cast<double>(j);
    }
    std::vector<cplx> b(len, cplx{0.0, 0.0});
    b[0] = {1.0, 0.0};
    for (int m = 1; m < len; ++m) {
        cplx acc{0.0, 0.0};
        for (int j = 1; j <= m; ++j)
            acc += static_cast<double>(j) * l[j] * b[m - j];
        b[m] = acc / static_cast<double>(m);
    }
    for (auto& x : b) x *= sc_constant_;
    return b;
}

cplx ConformalDiskMap::eval_boundary(double theta) const
{
    const size_t n = prevertices_.size();
    const double a0 = angles_[0];
    double th = a0 + wrap_2pi(theta - a0);
    size_t k = 0;
    for (size_t i = 0; i < n; ++i)
        if (angles_[i] <= th + 1e-15) k = i;
    const cplx t = unit(th);
    int sing_b = -1;
    for (size_t j = 0; j < n; ++j)
        if (std::abs(t - prevertices_[j]) < 1e-9) sing_b = static_cast<int>(j);
    if (sing_b == static_cast<int>(k)) return vertices_[k];
    return vertices_[k] +
           sc_constant_ * segment_integral(prevertices_[k], t, static_cast<int>(k), sing_b);
}

void ConformalDiskMap::measure_residual()
{
    const size_t n = prevertices_.size();
    const double diam = [&] {
        double d = 0.0;
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j)
                d = std::max(d, std::abs(vertices_[i] - vertices_[j]));
        return d;
    }();
    double worst = 0.0;
    const int m = opts_.residual_samples_per_side;
    for (size_t k = 0; k < n; ++k) {
        const size_t k1 = (k + 1) % n;
        const double a = angles_[k];
        const double b = (k1 == 0) ? angles_[0] + 2.0 * pi : angles_[k1];
        for (int j = 1; j <= m; ++j) {
            const double th = a + (b - a) * j / (m + 1.0);
            const cplx z = vertices_[k] + sc_constant_ * segment_integral(
                                              prevertices_[k], unit(th),
                                              static_cast<int>(k), -1);
            worst = std::max(worst, dist_point_segment(z, vertices_[k], vertices_[k1]));
        }
        const cplx zend = vertices_[k] + sc_constant_ * segment_integral(
                                             prevertices_[k], prevertices_[k1],
                                             static_cast<int>(k), static_cast<int>(k1));
        worst = std::max(worst, std::abs(zend - vertices_[k1]));
    }
    residual_ = worst / diam;
}

void ConformalDiskMap::compute_taylor(int M)
{
    const int N = opts_.fft_size;
    std::vector<cplx> samples(N);
    const size_t n = prevertices_.size();

    // Sweep the circle once on a half-offset grid (never exactly on a
    // prevertex), anchoring each arc at its starting vertex. Grid angles are
    // measured from sweep_anchor_ so mirrored geometries sample at mirrored
    // points.
    auto grid_angle = [&](int g) {
        return sweep_anchor_ + 2.0 * pi * (g + 0.5) / N;
    };
    auto grid_after = [&](double ang) {
        return static_cast<int>(
            std::ceil((ang - sweep_anchor_) * N / (2.0 * pi) - 0.5 + 1e-12));
    };
    int grid_start = grid_after(angles_[0]);
    for (size_t k = 0; k < n; ++k) {
        const double b = (k + 1 < n) ? angles_[k + 1] : angles_[0] + 2.0 * pi;
        const int g_end = grid_after(b);
        cplx acc = vertices_[k];
        cplx prev = prevertices_[k];
        bool first = true;
        for (int g = grid_start; g < g_end; ++g) {
            const double th = grid_angle(g);
            const cplx t = unit(th);
            const int sb = (std::abs(th - b) < 1e-12) ? static_cast<int>((k + 1) % n) : -1;
            acc += sc_constant_ *
                   segment_integral(prev, t, first ? static_cast<int>(k) : -1, sb);
            samples[((g % N) + N) % N] = acc;
            prev = t;
            first = false;
        }
        grid_start = g_end;
    }

    std::vector<cplx> spec = samples;
    fft_inplace(spec, false);
    taylor_.assign(M + 1, cplx{0.0, 0.0});
    for (int k = 0; k <= M && k < N; ++k)
        taylor_[k] = unit(-k * (sweep_anchor_ + pi / N)) * spec[k] /
                     static_cast<double>(N);

    // boundary deviation of the truncated expansion
    std::vector<cplx> trunc(N, cplx{0.0, 0.0});
    for (int k = 0; k <= M && k < N; ++k) trunc[k] = spec[k];
    fft_inplace(trunc, true);
    double err = 0.0;
    for (int j = 0; j < N; ++j) err = std::max(err, std::abs(trunc[j] - samples[j]));
    taylor_error_ = err;

    corr_.samples.clear();
    const int stride = std::max(1, N / 512);
    for (int j = 0; j < N; j += stride) {
        const double th = grid_angle(j);
        const double rel = angles_[0] + wrap_2pi(th - angles_[0]);
        int side = 0;
        for (size_t i = 0; i < n; ++i)
            if (angles_[i] <= rel) side = static_cast<int>(i);
        corr_.samples.push_back({wrap_2pi(th), samples[((j % N) + N) % N], side});
    }
}

namespace {

std::vector<double> gaps_to_angles(const Eigen::VectorXd& y)
{
    const int n = static_cast<int>(y.size()) + 1;
    std::vector<double> gap(n);
    double denom = 1.0;
    for (int k = 0; k < n - 1; ++k) denom += std::exp(y[k]);
    for (int k = 0; k < n - 1; ++k) gap[k] = 2.0 * pi * std::exp(y[k]) / denom;
    gap[n - 1] = 2.0 * pi / denom;
    std::vector<double> th(n);
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
        acc += gap[k];
        th[k] = acc; // th[n-1] = 2*pi
    }
    return th;
}

} // namespace

ConformalDiskMap build_map(const geo::SlitPolygon& polygon, cplx normalization,
                           double tol, const SCOptions& opts,
                           const std::vector<double>* warm_start)
{
    const int n = static_cast<int>(polygon.vertices.size());
    if (n < 3) throw geometry_error("polygon needs >= 3 vertices");
    if (!polygon.is_simple() || polygon.signed_area() <= 0.0)
        throw geometry_error("build_map: polygon must be simple and CCW");
    if (!geo::point_in_polygon(polygon.vertices, normalization))
        throw geometry_error("build_map: normalization point not interior");

    ConformalDiskMap m;
    m.opts_ = opts;
    m.vertices_ = polygon.vertices;
    m.alphas_ = polygon.interior_angle_fractions();
    m.conformal_center_ = normalization;

    auto apply_angles = [&](const std::vector<double>& th) {
        m.angles_ = th;
        m.prevertices_.resize(n);
        for (int k = 0; k < n; ++k) m.prevertices_[k] = unit(th[k]);
    };

    const auto& W = m.vertices_;
    auto residual_vec = [&](const Eigen::VectorXd& y) {
        apply_angles(gaps_to_angles(y));
        m.sc_constant_ = {1.0, 0.0};
        std::vector<cplx> I(n);
        for (int k = 0; k < n - 2; ++k)
            I[k] = m.segment_integral(m.prevertices_[k], m.prevertices_[k + 1], k, k + 1);
        const cplx Ic = m.segment_integral(0.0, m.prevertices_[0], -1, 0);
        Eigen::VectorXd r(n - 1);
        const double L0 = std::abs(W[1] - W[0]);
        for (int j = 1; j <= n - 3; ++j)
            r[j - 1] = std::log(std::abs(I[j]) / std::abs(I[0])) -
                       std::log(std::abs(W[j + 1] - W[j]) / L0);
        const cplx target = (W[0] - normalization) / (W[1] - W[0]);
        const cplx got = Ic / I[0];
        r[n - 3] = got.real() - target.real();
        r[n - 2] = got.imag() - target.imag();
        return r;
    };

    Eigen::VectorXd y = Eigen::VectorXd::Zero(n - 1);
    if (warm_start) {
        if (static_cast<int>(warm_start->size()) != n)
            throw numerical_error("warm start size mismatch");
        std::vector<double> gap(n);
        for (int k = 0; k < n; ++k) {
            const double prev = (k == 0) ? (*warm_start)[n - 1] - 2.0 * pi
                                         : (*warm_start)[k - 1];
            gap[k] = (*warm_start)[k] - prev;
        }
        for (int k = 0; k < n - 1; ++k) y[k] = std::log(gap[k] / gap[n - 1]);
    }

    Eigen::VectorXd r = residual_vec(y);
    double rn = r.lpNorm<Eigen::Infinity>();
    int iter = 0;
    for (; iter < opts.max_iterations && rn > opts.newton_tol; ++iter) {
        Eigen::MatrixXd J(n - 1, n - 1);
        for (int j = 0; j < n - 1; ++j) {
            const double h = 1e-6 * std::max(1.0, std::abs(y[j]));
            Eigen::VectorXd yp = y;
            yp[j] += h;
            J.col(j) = (residual_vec(yp) - r) / h;
        }
        Eigen::VectorXd step = J.colPivHouseholderQr().solve(-r);
        double lam = 1.0;
        Eigen::VectorXd ynew;
        Eigen::VectorXd rnew;
        double rn_new = rn;
        for (int bt = 0; bt < 24; ++bt) {
            ynew = y + lam * step;
            try {
                rnew = residual_vec(ynew);
                rn_new = rnew.lpNorm<Eigen::Infinity>();
            } catch (const numerical_error&) {
                rn_new = std::numeric_limits<double>::infinity();
            }
            if (rn_new < rn * (1.0 - 0.25 * lam) || rn_new < opts.newton_tol) break;
            lam *= 0.5;
        }
        if (rn_new >= rn && rn <= 1e3 * opts.newton_tol) break; // stagnated near tol
        if (rn_new >= rn) {
            std::ostringstream os;
            os << "SC parameter problem stalled: residual " << rn << " after "
               << iter << " iterations";
            throw numerical_error(os.str());
        }
        y = ynew;
        r = rnew;
        rn = rn_new;
    }
    if (rn > 1e3 * opts.newton_tol) {
        std::ostringstream os;
        os << "SC parameter problem did not converge: residual " << rn
           << " after " << iter << " iterations";
        throw numerical_error(os.str());
    }

    // finalize at the solution
    apply_angles(gaps_to_angles(y));
    m.sc_constant_ = {1.0, 0.0};
    const cplx I0 = m.segment_integral(m.prevertices_[0], m.prevertices_[1], 0, 1);
    cplx C = (W[1] - W[0]) / I0;

    // rotate prevertices so that omega'(0) = |C| > 0
    const double psi = std::arg(C);
    std::vector<double> th(n);
    const double base = wrap_2pi(m.angles_[0] + psi);
    th[0] = base;
    for (int k = 1; k < n; ++k) th[k] = th[k - 1] + (m.angles_[k] - m.angles_[k - 1]);
    apply_angles(th);
    m.sc_constant_ = std::abs(C);

    m.measure_residual();
    if (m.residual_ > tol) {
        std::ostringstream os;
        os << "SC map residual " << m.residual_ << " exceeds tolerance " << tol;
        throw numerical_error(os.str());
    }
    // univalence spot check: omega' must not vanish inside the disk
    for (double r : {0.35, 0.7, 0.95})
        for (int j = 0; j < 32; ++j)
            if (std::abs(m.deriv(r * unit(2.0 * pi * (j + 0.5) / 32.0))) == 0.0)
                throw numerical_error("map derivative vanishes inside the disk");
    // anchor the surrogate sweep at the mid-angle of the tip face when the
    // polygon identifies one; mirrored geometries then mirror exactly
    if (polygon.tip_index >= 0 && polygon.tip_index + 1 < n) {
        m.sweep_anchor_ = 0.5 * (m.angles_[polygon.tip_index] +
                                 m.angles_[polygon.tip_index + 1]);
    } else {
        m.sweep_anchor_ = m.angles_[0];
    }
    m.compute_taylor(opts.surrogate_degree);
    return m;
}

cplx default_normalization(const geo::AnalyticalDomain& domain)
{
    const cplx tip = domain.crack.tip();
    const cplx dir = domain.crack.tip_direction();
    // march to the outer boundary along the tip heading
    double lo = 0.0, hi = domain.diameter();
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (domain.boundary_clearance(tip + mid * dir) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return tip + 0.7 * lo * dir;
}

ConformalDiskMap build_map_for_domain(const geo::AnalyticalDomain& domain,
                                      cplx normalization, double tol,
                                      const SCOptions& opts)
{
    if (std::isnan(normalization.real()))
        normalization = default_normalization(domain);

    const double w_target = domain.slit_half_width;
    double min_seg = std::numeric_limits<double>::max();
    for (size_t i = 1; i < domain.crack.points.size(); ++i)
        min_seg = std::min(min_seg,
                           std::abs(domain.crack.points[i] - domain.crack.points[i - 1]));
    double min_cl = std::numeric_limits<double>::max();
    for (size_t i = 1; i < domain.crack.points.size(); ++i)
        min_cl = std::min(min_cl, domain.boundary_clearance(domain.crack.points[i]));

    double w0 = std::min({0.02 * domain.diameter(), 0.45 * min_cl, 0.3 * min_seg});
    if (w_target >= w0)
        return build_map(geo::widen_slit(domain), normalization, tol, opts);

    std::vector<double> widths;
    for (double w = w0; w > w_target * 3.999; w *= 0.25) widths.push_back(w);
    widths.push_back(w_target);

    std::vector<double> warm;
    const std::vector<double>* warm_ptr = nullptr;
    geo::AnalyticalDomain d = domain;
    for (size_t i = 0; i < widths.size(); ++i) {
        d.slit_half_width = widths[i];
        const bool last = (i + 1 == widths.size());
        auto map = build_map(geo::widen_slit(d), normalization,
                             last ? tol : std::max(tol, 1e-4), opts, warm_ptr);
        if (last) return map;
        warm = map.prevertex_angles();
        warm_ptr = &warm;
    }
    throw numerical_error("continuation produced no map");
}

std::string ConformalDiskMap::to_json() const
{
    json j;
    auto put = [](json& node, cplx v) {
        node.push_back({{"re", v.real()}, {"im", v.imag()}});
    };
    j["prevertices"] = json::array();
    for (cplx z : prevertices_) put(j["prevertices"], z);
    j["prevertex_angles"] = angles_;
    j["angle_fractions"] = alphas_;
    j["vertices"] = json::array();
    for (cplx z : vertices_) put(j["vertices"], z);
    j["normalization"] = {{"re", conformal_center_.real()},
                          {"im", conformal_center_.imag()}};
    j["sc_constant"] = {{"re", sc_constant_.real()}, {"im", sc_constant_.imag()}};
    j["taylor"] = json::array();
    for (cplx z : taylor_) put(j["taylor"], z);
    j["taylor_error"] = taylor_error_;
    j["residual"] = residual_;
    j["sweep_anchor"] = sweep_anchor_;
    return j.dump(2);
}

ConformalDiskMap ConformalDiskMap::from_json(const std::string& text)
{
    const json j = json::parse(text);
    auto get = [](const json& node) {
        return cplx{node.at("re").get<double>(), node.at("im").get<double>()};
    };
    ConformalDiskMap m;
    for (const auto& e : j.at("prevertices")) m.prevertices_.push_back(get(e));
    m.angles_ = j.at("prevertex_angles").get<std::vector<double>>();
    m.alphas_ = j.at("angle_fractions").get<std::vector<double>>();
    for (const auto& e : j.at("vertices")) m.vertices_.push_back(get(e));
    m.conformal_center_ = get(j.at("normalization"));
    m.sc_constant_ = get(j.at("sc_constant"));
    for (const auto& e : j.at("taylor")) m.taylor_.push_back(get(e));
    m.taylor_error_ = j.at("taylor_error").get<double>();
    m.residual_ = j.at("residual").get<double>();
    if (j.contains("sweep_anchor"))
        m.sweep_anchor_ = j.at("sweep_anchor").get<double>();
    return m;
}

} // namespace fracmap::conf
