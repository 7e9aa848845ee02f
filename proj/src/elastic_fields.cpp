#include "fracmap/elastic_fields.hpp"

#include <ostream>

#include "fracmap/quadrature.hpp"

namespace fracmap::fields {

cplx FieldEvaluator::map_point(cplx zeta) const
{
    return sol_.omega_series_point(zeta);
}

FieldSample FieldEvaluator::stresses_at(cplx zeta) const
{
    if (std::abs(zeta) >= 1.0)
        throw numerical_error("stresses_at: needs |zeta| < 1");
    FieldSample smp;
    smp.zeta = zeta;
    smp.z = map_point(zeta);

    const cplx ph = sol_.phi(zeta);
    const cplx php = sol_.phi_prime(zeta);
    const cplx ps = sol_.psi(zeta);
    const cplx wp = sol_.map().deriv(zeta);
    const cplx w = smp.z;

    // Cartesian first: the mapped-frame rotation cancels analytically,
    //   s11 + s22 = 4 Re Phi,  s22 - s11 + 2 i s12 = 2 [conj(omega) Phi'/omega' + Psi]
    const double trace = 4.0 * ph.real();
    const cplx dcart = 2.0 * (std::conj(w) * php / wp + ps);
    smp.s11 = 0.5 * (trace - dcart.real());
    smp.s22 = 0.5 * (trace + dcart.real());
    smp.s12 = 0.5 * dcart.imag();

    // mapped-polar components by rotating into the curvilinear frame
    // alpha = arg(e^{i phi} omega'); degenerate at the origin, where the
    // Cartesian values are reported in both frames
    if (std::abs(zeta) > 1e-14) {
        const cplx e2ia_num = (zeta / std::abs(zeta)) * wp;
        const cplx e2ia = (e2ia_num * e2ia_num) / std::norm(e2ia_num);
        const cplx dcurv = e2ia * dcart;
        smp.srr = 0.5 * (trace - dcurv.real());
        smp.sff = 0.5 * (trace + dcurv.real());
        smp.srf = 0.5 * dcurv.imag();
    } else {
        smp.srr = smp.s11;
        smp.sff = smp.s22;
        smp.srf = smp.s12;
    }
    return smp;
}

cplx FieldEvaluator::displacement_at(cplx zeta) const
{
    const auto& mat = sol_.material();
    const cplx u =
        (mat.kappa * sol_.eta(zeta) - map_point(zeta) * std::conj(sol_.phi(zeta)) -
         std::conj(sol_.chi(zeta))) /
        (2.0 * mat.mu);
    return u + sol_.displacement_offset();
}

FieldSample FieldEvaluator::sample(cplx zeta) const
{
    FieldSample smp = stresses_at(zeta);
    const cplx u = displacement_at(zeta);
    smp.u1 = u.real();
    smp.u2 = u.imag();
    return smp;
}

cplx FieldEvaluator::traction_at(double theta, double r) const
{
    // traction on r = const curves: components (srr, srf) in the curvilinear
    // frame; rotate to physical axes with e^{i alpha}
    const cplx zeta = r * unit(theta);
    const FieldSample smp = stresses_at(zeta);
    const cplx dirn = unit(theta) * sol_.map().deriv(zeta);
    const cplx eia = dirn / std::abs(dirn);
    return eia * cplx{smp.srr, smp.srf};
}

cplx displacement_by_path(const rh::RiemannHilbertSolution& sol, cplx zeta,
                          const std::vector<cplx>& waypoints)
{
    const auto& mat = sol.material();
    std::vector<cplx> pts{cplx{0.0, 0.0}};
    for (cplx w : waypoints) pts.push_back(w);
    pts.push_back(zeta);

    cplx eta{0.0, 0.0}, chi{0.0, 0.0};
    const auto& rule = quad::gauss_legendre(24);
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        const cplx a = pts[i], b = pts[i + 1];
        const int panels = 6;
        for (int p = 0; p < panels; ++p) {
            const cplx pa = a + (b - a) * (static_cast<double>(p) / panels);
            const cplx pb = a + (b - a) * (static_cast<double>(p + 1) / panels);
            for (auto [x, wq] : rule) {
                const cplx s = 0.5 * (pa + pb) + 0.5 * (pb - pa) * x;
                const cplx wp = sol.map().deriv(s);
                eta += 0.5 * (pb - pa) * wq * sol.phi(s) * wp;
                chi += 0.5 * (pb - pa) * wq * sol.psi(s) * wp;
            }
        }
    }
    const cplx u = (mat.kappa * eta - sol.omega_series_point(zeta) *
                                          std::conj(sol.phi(zeta)) -
                    std::conj(chi)) /
                   (2.0 * mat.mu);
    return u + sol.displacement_offset();
}

cplx series_displacement(const std::vector<cplx>& a, double r, double phi,
                         const rh::MaterialParams& mat)
{
    // 2 mu (u1 + i u2) as the even/odd sums with exponents n/2
    cplx acc{0.0, 0.0};
    for (size_t n = 0; n < a.size(); ++n) {
        const double half = 0.5 * static_cast<double>(n);
        const double rp = std::pow(r, half);
        if (rp == 0.0 && n > 0) continue;
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        const cplx lead = a[n] * (mat.kappa * unit(phi * half) +
                                  sign * unit(-phi * half));
        const cplx trail = half * std::conj(a[n]) *
                           (unit(-phi * half) - unit(-phi * (half - 2.0)));
        acc += rp * (lead + trail);
    }
    return acc / (2.0 * mat.mu);
}

std::pair<int, int> interpolation_truncation(int nodes)
{
    if (nodes < 3) throw config_error("interpolation_fn: needs n >= 3");
    if (nodes % 2 == 0) return {nodes - 2, nodes - 1};
    return {nodes - 1, nodes - 2};
}

cplx interpolation_fn(int nodes, const std::vector<cplx>& a, double phi,
                      double r_A, const rh::MaterialParams& mat)
{
    const auto [N1, N2] = interpolation_truncation(nodes);
    cplx acc{0.0, 0.0};
    for (int k = 0; k <= std::max(N1, N2); ++k) {
        if (k >= static_cast<int>(a.size())) break;
        if (k % 2 == 0 && k > N1) continue;
        if (k % 2 == 1 && k > N2) continue;
        const double half = 0.5 * k;
        const double rp = std::pow(r_A, half);
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        const cplx lead = a[k] * (mat.kappa * unit(phi * half) +
                                  sign * unit(-phi * half));
        const cplx trail = half * std::conj(a[k]) *
                           (unit(-phi * half) - unit(-phi * (half - 2.0)));
        acc += rp * (lead + trail);
    }
    return acc;
}

cplx mode_I_displacement(double r, double phi, double p, double a,
                         const rh::MaterialParams& mat)
{
    const double c = p * std::sqrt(2.0 * r * a) / (8.0 * mat.mu);
    const double u1 = c * ((2.0 * mat.kappa - 1.0) * std::cos(0.5 * phi) -
                           std::cos(1.5 * phi));
    const double u2 = c * ((2.0 * mat.kappa + 1.0) * std::sin(0.5 * phi) -
                           std::sin(1.5 * phi));
    return {u1, u2};
}

cplx ModeIField::pot_phi(cplx w) const
{
    return 0.5 * p * std::sqrt(2.0 * a) * std::sqrt(w);
}
cplx ModeIField::pot_phi_prime(cplx w) const
{
    return 0.25 * p * std::sqrt(2.0 * a) / std::sqrt(w);
}
cplx ModeIField::pot_phi_second(cplx w) const
{
    return -0.125 * p * std::sqrt(2.0 * a) / (w * std::sqrt(w));
}
cplx ModeIField::pot_psi(cplx w) const
{
    return 0.25 * p * std::sqrt(2.0 * a) * std::sqrt(w);
}
cplx ModeIField::pot_psi_prime(cplx w) const
{
    return 0.125 * p * std::sqrt(2.0 * a) / std::sqrt(w);
}

cplx ModeIField::displacement(cplx z) const
{
    const cplx w = (z - tip) / dir;
    const cplx u_loc =
        (mat.kappa * pot_phi(w) - w * std::conj(pot_phi_prime(w)) -
         std::conj(pot_psi(w))) /
        (2.0 * mat.mu);
    return dir * u_loc;
}

rh::BoundaryData ModeIField::boundary_data(
    std::shared_ptr<const conf::DiskMap> map) const
{
    ModeIField self = *this;
    auto u = [self, map](double theta) {
        return self.displacement(map->eval(unit(theta)));
    };
    auto du = [self, map](double theta) {
        const cplx t = unit(theta);
        const cplx w = (map->eval(t) - self.tip) / self.dir;
        const cplx wdot = I * t * map->deriv(t) / self.dir;
        const cplx dU_dw = (self.mat.kappa * self.pot_phi_prime(w) -
                            std::conj(self.pot_phi_prime(w))) /
                           (2.0 * self.mat.mu);
        const cplx dU_dwb = (-w * std::conj(self.pot_phi_second(w)) -
                             std::conj(self.pot_psi_prime(w))) /
                            (2.0 * self.mat.mu);
        return self.dir * (dU_dw * wdot + dU_dwb * std::conj(wdot));
    };
    return rh::BoundaryData::traction_free_with(std::move(u), std::move(du));
}

std::vector<cplx> make_grid(const FieldGridSpec& spec)
{
    std::vector<cplx> grid;
    grid.reserve(static_cast<size_t>(spec.radial) * spec.angular);
    const auto& rr = quad::gauss_legendre(spec.radial);
    for (auto [x, w] : rr) {
        (void)w;
        const double r = 0.5 * spec.r_max * (1.0 + x);
        for (int j = 0; j < spec.angular; ++j) {
            double frac = (j + 0.5) / spec.angular;
            double th;
            if (spec.grade_to_tip) {
                // cubic clustering of angles around the tip prevertex
                const double s = 2.0 * frac - 1.0; // (-1, 1)
                th = spec.tip_angle + pi * s * s * s;
            } else {
                th = 2.0 * pi * frac;
            }
            grid.push_back(r * unit(th));
        }
    }
    return grid;
}

void write_field_csv(std::ostream& os, const FieldEvaluator& ev,
                     const std::vector<cplx>& grid)
{
    os << "zeta_re,zeta_im,x,y,srr,sff,srf,s11,s22,s12,u1,u2\n";
    os.precision(17);
    for (cplx zeta : grid) {
        const FieldSample s = ev.sample(zeta);
        os << zeta.real() << ',' << zeta.imag() << ',' << s.z.real() << ','
           << s.z.imag() << ',' << s.srr << ',' << s.sff << ',' << s.srf << ','
           << s.s11 << ',' << s.s22 << ',' << s.s12 << ',' << s.u1 << ','
           << s.u2 << '\n';
    }
}

} // namespace fracmap::fields
