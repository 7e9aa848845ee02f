#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "fracmap/elastic_fields.hpp"
#include "manufactured.hpp"

using namespace fracmap;
using namespace fracmap::fields;

namespace {

// direct Cartesian stresses from the manufactured potentials on omega = R z
void oracle_stresses(const mfg::Case& mf, cplx zeta, double& s11, double& s22,
                     double& s12)
{
    const cplx ph = mf.phi_at(zeta);
    const cplx php = mf.phi_prime_at(zeta);
    const cplx ps = mf.psi_at(zeta);
    const double trace = 4.0 * ph.real();
    const cplx d = 2.0 * (std::conj(zeta) * php + ps); // conj(omega)/omega' = conj(z) R/R
    s11 = 0.5 * (trace - d.real());
    s22 = 0.5 * (trace + d.real());
    s12 = 0.5 * d.imag();
}

} // namespace

TEST_CASE("constant potential gives a hydrostatic-like state")
{
    mfg::Case mf;
    mf.phi = {cplx{0.7, 0.0}};
    mf.psi = {cplx{0.0, 0.0}};
    auto sol = solve(mf.map(), mf.partition(), mf.mat, mf.data());
    FieldEvaluator ev(sol);
    for (cplx z : {cplx{0.2, 0.1}, cplx{-0.4, 0.5}}) {
        const auto s = ev.stresses_at(z);
        CHECK(s.srr + s.sff == doctest::Approx(4.0 * 0.7).epsilon(1e-8));
        CHECK(s.srf == doctest::Approx(0.0).epsilon(1e-8));
        CHECK(s.srr == doctest::Approx(2.0 * 0.7).epsilon(1e-8));
    }
}

TEST_CASE("manufactured stresses match the symbolic oracle")
{
    mfg::Case mf;
    auto sol = solve(mf.map(), mf.partition(), mf.mat, mf.data());
    FieldEvaluator ev(sol);
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0.0, worst_trace = 0.0;
    for (int i = 0; i < 60; ++i) {
        const double r = 0.92 * std::sqrt(U(rng));
        const cplx zeta = r * unit(2.0 * pi * U(rng));
        const auto s = ev.stresses_at(zeta);
        double o11, o22, o12;
        oracle_stresses(mf, zeta, o11, o22, o12);
        worst = std::max({worst, std::abs(s.s11 - o11), std::abs(s.s22 - o22),
                          std::abs(s.s12 - o12)});
        worst_trace = std::max(worst_trace,
                               std::abs(s.s11 + s.s22 - (s.srr + s.sff)));
    }
    CHECK(worst < 1e-8);
    CHECK(worst_trace < 1e-12); // trace invariance under the frame rotation
}

TEST_CASE("displacements: rigid translation and manufactured agreement")
{
    mfg::Case mf;
    // zero potentials, constant imposed displacement
    rh::BoundaryData d;
    const cplx shift{0.25, -0.4};
    d.u_star = [shift](double) { return shift; };
    d.du_star_dtheta = [](double) { return cplx{0.0, 0.0}; };
    auto sol0 = solve(mf.map(), mf.partition(), mf.mat, d);
    FieldEvaluator ev0(sol0);
    CHECK(std::abs(ev0.displacement_at(cplx{0.3, -0.2}) - shift) < 1e-9);

    auto sol = solve(mf.map(), mf.partition(), mf.mat, mf.data());
    FieldEvaluator ev(sol);
    double worst = 0.0;
    for (cplx z : {cplx{0.5, 0.2}, cplx{-0.1, -0.7}, cplx{0.0, 0.0}}) {
        // the manufactured displacement field, offset-free by construction
        const cplx truth =
            (mf.mat.kappa * mf.eta_at(z) - mf.R * z * std::conj(mf.phi_at(z)) -
             std::conj(mf.chi_at(z))) /
            (2.0 * mf.mat.mu);
        worst = std::max(worst, std::abs(ev.displacement_at(z) - truth));
    }
    CHECK(worst < 1e-6);

    // imposed boundary displacement is reproduced on gamma_u
    const double th = sol.partition().mid_angle() + 0.8;
    const cplx ub = ev.displacement_at(0.999 * unit(th));
    CHECK(std::abs(ub - mf.u_star(th)) < 5e-3 * std::abs(mf.u_star(th)) + 5e-4);
}

TEST_CASE("path independence of the displacement integral")
{
    mfg::Case mf;
    auto sol = solve(mf.map(), mf.partition(), mf.mat, mf.data());
    const cplx target{0.45, 0.3};
    const cplx via1 = displacement_by_path(sol, target, {cplx{0.5, -0.4}});
    const cplx via2 = displacement_by_path(sol, target, {cplx{-0.5, 0.2}, cplx{0.0, 0.6}});
    CHECK(std::abs(via1 - via2) < 1e-8);
    // and both agree with the series evaluator
    FieldEvaluator ev(sol);
    CHECK(std::abs(via1 - ev.displacement_at(target)) < 1e-7);
}

TEST_CASE("series displacement basics")
{
    rh::MaterialParams mat{1.5, 2.2};
    // only a0: rigid translation a0 (kappa + 1) / (2 mu)
    std::vector<cplx> a{{0.3, -0.2}};
    const cplx u = series_displacement(a, 0.7, 1.1, mat);
    CHECK(std::abs(u - a[0] * (mat.kappa + 1.0) / (2.0 * mat.mu)) < 1e-14);

    // r = 0 kills every n >= 1 contribution
    std::vector<cplx> b{{0.0, 0.0}, {1.0, 0.5}, {-0.3, 0.2}, {0.1, 0.1}};
    CHECK(std::abs(series_displacement(b, 0.0, 0.4, mat)) < 1e-14);

    // single a1 term: sqrt(r) opening discontinuity across the faces
    std::vector<cplx> c{{0.0, 0.0}, {0.4, -0.1}};
    const double r = 0.36;
    const cplx jump = series_displacement(c, r, pi, mat) -
                      series_displacement(c, r, -pi, mat);
    const cplx expect = std::sqrt(r) * 2.0 * I * (mat.kappa + 1.0) * c[1] /
                        (2.0 * mat.mu);
    CHECK(std::abs(jump - expect) < 1e-13);
    CHECK(std::abs(jump) > 0.1); // genuinely discontinuous
}

TEST_CASE("interpolation function truncation rules")
{
    CHECK(interpolation_truncation(4) == std::pair<int, int>{2, 3});
    CHECK(interpolation_truncation(5) == std::pair<int, int>{4, 3});
    CHECK(interpolation_truncation(6) == std::pair<int, int>{4, 5});

    rh::MaterialParams mat{1.0, 2.0};
    std::vector<cplx> zeros(8, cplx{0.0, 0.0});
    CHECK(std::abs(interpolation_fn(5, zeros, 0.3, 2.0, mat)) == 0.0);

    // only terms allowed by the parity table contribute
    std::vector<cplx> a(8, cplx{0.0, 0.0});
    a[3] = {1.0, 0.0};
    // n = 4: N2 = 3, so k = 3 contributes
    CHECK(std::abs(interpolation_fn(4, a, 0.5, 1.0, mat)) > 0.0);
    a[3] = {0.0, 0.0};
    a[5] = {1.0, 0.0};
    // n = 4: N2 = 3 < 5, so k = 5 does not contribute
    CHECK(std::abs(interpolation_fn(4, a, 0.5, 1.0, mat)) == 0.0);
}

TEST_CASE("mode I reference field")
{
    rh::MaterialParams mat{1.0, 2.0};
    CHECK(std::abs(mode_I_displacement(0.5, 0.0, 1.0, 1.0, mat).imag()) < 1e-15);

    const cplx u_pi = mode_I_displacement(1.0, pi, 1.0, 1.0, mat);
    CHECK(u_pi.real() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(u_pi.imag() == doctest::Approx(3.0 * std::sqrt(2.0) / 4.0).epsilon(1e-12));

    // sqrt(r) scaling
    const cplx u1 = mode_I_displacement(0.2, 0.9, 1.3, 0.7, mat);
    const cplx u4 = mode_I_displacement(0.8, 0.9, 1.3, 0.7, mat);
    CHECK(std::abs(u4 - 2.0 * u1) < 1e-14);

    // the potential form reproduces the closed-form displacements
    ModeIField f;
    f.mat = mat;
    for (double phi : {-2.8, -1.0, 0.3, 2.9}) {
        const cplx z = 0.6 * unit(phi);
        const cplx ur = mode_I_displacement(0.6, phi, f.p, f.a, mat);
        CHECK(std::abs(f.displacement(z) - ur) < 1e-13);
    }

    // traction-free crack faces: sigma_22 and sigma_12 vanish on the cut
    for (double x : {-0.5, -1.5}) {
        for (double eps : {1e-7, -1e-7}) {
            const cplx w{x, eps};
            const cplx ph = f.pot_phi_prime(w);
            const cplx d = 2.0 * (std::conj(w) * f.pot_phi_second(w) + f.pot_psi_prime(w));
            const double trace = 4.0 * ph.real();
            const double s22 = 0.5 * (trace + d.real());
            const double s12 = 0.5 * d.imag();
            CHECK(std::abs(s22) < 1e-6);
            CHECK(std::abs(s12) < 1e-6);
        }
    }
}

TEST_CASE("equilibrium and boundedness at the origin")
{
    mfg::Case mf;
    auto sol = solve(mf.map(), mf.partition(), mf.mat, mf.data());
    FieldEvaluator ev(sol);

    // divergence of the Cartesian stress field by central differences along
    // physical directions; the construction satisfies it analytically
    double field_scale = 0.0, worst_div = 0.0;
    const double h = 1e-4;
    for (cplx zeta : {cplx{0.3, 0.1}, cplx{-0.2, 0.5}, cplx{0.4, -0.4}}) {
        const cplx wp = sol.map().deriv(zeta);
        const cplx dzx = h / wp, dzy = h * I / wp;
        const auto xp = ev.stresses_at(zeta + dzx);
        const auto xm = ev.stresses_at(zeta - dzx);
        const auto yp = ev.stresses_at(zeta + dzy);
        const auto ym = ev.stresses_at(zeta - dzy);
        const double div1 = (xp.s11 - xm.s11 + yp.s12 - ym.s12) / (2.0 * h);
        const double div2 = (xp.s12 - xm.s12 + yp.s22 - ym.s22) / (2.0 * h);
        worst_div = std::max({worst_div, std::abs(div1), std::abs(div2)});
        field_scale = std::max({field_scale, std::abs(xp.s11), std::abs(xp.s22)});
    }
    CHECK(worst_div < 1e-4 * field_scale / h * h + 1e-4 * field_scale);

    // no stress singularity at the origin: bounded by ten times the values
    // a tenth of the way out
    const auto s0 = ev.stresses_at(cplx{0.0, 0.0});
    const auto s1 = ev.stresses_at(cplx{0.1, 0.0});
    const double m0 = std::abs(s0.s11) + std::abs(s0.s22) + std::abs(s0.s12);
    const double m1 = std::abs(s1.s11) + std::abs(s1.s22) + std::abs(s1.s12);
    CHECK(m0 <= 10.0 * m1 + 1e-12);
}

TEST_CASE("field CSV export carries the fixed header")
{
    mfg::Case mf;
    auto sol = solve(mf.map(), mf.partition(), mf.mat, mf.data());
    FieldEvaluator ev(sol);
    FieldGridSpec spec;
    spec.radial = 4;
    spec.angular = 8;
    std::ostringstream os;
    write_field_csv(os, ev, make_grid(spec));
    const std::string text = os.str();
    CHECK(text.rfind("zeta_re,zeta_im,x,y,srr,sff,srf,s11,s22,s12,u1,u2\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 4 * 8);
}
