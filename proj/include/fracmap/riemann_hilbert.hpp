#ifndef FRACMAP_RIEMANN_HILBERT_HPP
#define FRACMAP_RIEMANN_HILBERT_HPP

#include <functional>
#include <memory>
#include <optional>

#include "fracmap/conformal.hpp"
#include "fracmap/quadrature.hpp"

namespace fracmap::rh {

struct MaterialParams {
    double mu = 1.0;     // shear modulus
    double kappa = 2.0;  // Kolosov constant, in (1, 3)
    double lambda = std::numeric_limits<double>::quiet_NaN(); // optional
    double g_c = std::numeric_limits<double>::quiet_NaN();    // fracture energy

    double poisson() const { return (3.0 - kappa) / 4.0; } // plane strain
    void validate(bool need_gc = false) const;
};

// beta = log(kappa) / (2 pi); kappa must lie in (1, 3)
double beta(double kappa);

// Partition of the unit circle: gamma_u is the single displacement arc from
// angle `theta_start` CCW to `theta_end` (unwrapped, end > start); the
// complementary arcs (the crack faces) form gamma_sigma. Prevertex angles
// interior to either part are recorded so quadrature can split there.
struct BoundaryPartition {
    double theta_start = 0.0; // z_n, start of gamma_u
    double theta_end = 0.0;   // z_1, end of gamma_u (> theta_start)
    std::vector<double> u_breaks;     // prevertex angles inside gamma_u
    std::vector<double> sigma_breaks; // prevertex angles inside gamma_sigma

    double mid_angle() const { return 0.5 * (theta_start + theta_end); }
    double central_angle() const { return theta_end - theta_start; }
    bool on_gamma_u(double theta) const;

    // Build from a map over a widened slit polygon: the slit corners carry
    // traction-free faces, the outer boundary carries displacement data.
    static BoundaryPartition from_slit_map(const conf::ConformalDiskMap& map,
                                           int slit_vertex_count);
};

// Canonical Plemelj weight for the single displacement arc:
//   X0(zeta) = (zeta - z_end)^(-1/2 - i beta) (zeta - z_start)^(-1/2 + i beta)
// branch cut along gamma_u, single-valued elsewhere, X0 ~ 1/zeta at infinity.
// The branch satisfies X0+/X0- = -kappa on gamma_u and X0+/X0- = 1 on
// gamma_sigma, which fixes X0(0) = -e^{-i phi0 + beta omega0}.
class PlemeljWeight {
public:
    PlemeljWeight(const BoundaryPartition& part, double kappa);

    cplx at(cplx zeta) const; // off the cut (either side of the circle)
    // one-sided limits at a gamma_u angle (exact, not numerically limited)
    cplx boundary_u(double theta, bool interior) const;
    // value on gamma_sigma (continuous across the circle there)
    cplx boundary_sigma(double theta) const;
    cplx x0_zero() const { return x0_zero_; }
    double beta_value() const { return beta_; }
    cplx arc_start() const { return a_; }
    cplx arc_end() const { return b_; }

    // Taylor coefficients about 0 and expansion coefficients at infinity
    // (X0 = sum_{m>=1} y_m zeta^{-m}); both by exp-series recurrences.
    std::vector<cplx> taylor(int len) const;
    std::vector<cplx> infinity_series(int len) const;

private:
    cplx a_, b_;          // arc start / end on the circle
    double theta_a_, theta_b_;
    double beta_ = 0.0;
    cplx e_a_, e_b_;      // exponents at a and b
    double ray_angle_ = 0.0;
    double sheet_plus_ = 0.0; // 2*pi*s for the interior-side boundary value
    cplx x0_zero_{0.0, 0.0};

    cplx from_log(cplx zeta, double chi) const;
};

// Boundary data for the mixed problem. Displacements (Cartesian, physical
// plane) are functions of the circle angle on gamma_u; imposed tractions
// (polar components in the zeta plane) live on gamma_sigma and default to
// traction-free crack faces.
struct BoundaryData {
    std::function<cplx(double)> u_star;           // u1 + i u2 on gamma_u
    std::function<cplx(double)> du_star_dtheta;   // its angle derivative
    std::function<cplx(double)> sigma_star;       // sigma_rr - i sigma_rphi
    double load_scale = 1.0;

    static BoundaryData traction_free_with(std::function<cplx(double)> u,
                                           std::function<cplx(double)> du);
};

struct SolverOptions {
    int series_len = 768;            // Taylor length carried for the fields
    int correction_max_power = 1;    // highest power in the correction basis
    int correction_min_power = 2;    // any value > max selects auto: -(M_eff + 1)
    int max_surrogate_terms = 192;   // cap on reflection terms used
    double r_series = 0.98;          // series vs pointwise switch radius
    double quad_tol = 1e-11;
    double field_quad_tol = 1e-9;    // near-boundary field evaluations
    int gl_nodes = 16;
    double endpoint_exclusion = 1e-4; // sampling keeps clear of z_1, z_n
    double osc_span = 5.0;            // panel length <= osc_span / m_max
    bool two_term_coefficient_system = false; // literal 4x4 for (C0, C1)
    double condition_limit = 1e12;
    int jump_samples = 64;
};

struct SolveDiagnostics {
    double condition_residual = 0.0;  // back-substitution of the solved system
    double condition_number = 0.0;
    double closure_residual = 0.0;    // displacement closure over gamma_u
    double surrogate_error = 0.0;     // carried from the map
    bool surrogate_warning = false;
    double scale = 0.0;               // max |f| over the boundary
    int corrections = 0;
};

struct JumpResidualReport {
    double sigma_max = 0.0; // max |Omega+ - Omega- - f| on gamma_sigma
    double u_max = 0.0;     // max |Omega+ + kappa Omega- - f| on gamma_u
    double scale = 0.0;     // max |f|
};

class RiemannHilbertSolution {
public:
    // evaluators (pointwise routes; series-accelerated under r_series)
    cplx omega0(cplx zeta) const;      // X0-weighted Cauchy part
    cplx omega(cplx zeta) const;       // Omega0 + X0 * R
    cplx phi(cplx zeta) const;         // recovered Phi, |zeta| < 1
    cplx phi_prime(cplx zeta) const;
    cplx psi(cplx zeta) const;         // recovered Psi, |zeta| < 1
    cplx eta(cplx zeta) const;         // eta' = Phi omega'
    cplx chi(cplx zeta) const;         // chi' = Psi omega'
    cplx omega_series_point(cplx zeta) const; // omega(zeta), series-accelerated
    cplx f_at(double theta) const;     // assembled boundary function
    cplx imposed_u(double theta) const; // load-scaled u* on gamma_u
    // radius up to which the field series are geometrically converged
    double series_radius() const { return r_series_eff_; }
    // weighted density g = f / X0+ as a circle density (panel interpolant)
    quad::CircleDensity g_density() const;
    // physical boundary traction t1 + i t2, from the exact one-sided limits
    // of Omega (sigma_rr - i sigma_rphi = [Omega+ - Omega-] / conj(omega'))
    cplx boundary_traction(double theta) const;
    cplx displacement_offset() const { return u_offset_; }

    JumpResidualReport jump_residual(int samples = 0) const; // 0: options value

    const MaterialParams& material() const { return material_; }
    const conf::DiskMap& map() const { return *map_; }
    const BoundaryPartition& partition() const { return partition_; }
    const PlemeljWeight& weight() const { return *weight_; }
    const std::vector<cplx>& corrections() const { return corrections_; }
    int correction_min_power() const { return kmin_; }
    const SolveDiagnostics& diagnostics() const { return diag_; }
    const SolverOptions& options() const { return opts_; }

    std::string to_json() const;

    friend RiemannHilbertSolution solve(std::shared_ptr<const conf::DiskMap>,
                                        const BoundaryPartition&,
                                        const MaterialParams&,
                                        const BoundaryData&,
                                        const SolverOptions&);

private:
    std::shared_ptr<const conf::DiskMap> map_;
    BoundaryPartition partition_;
    MaterialParams material_;
    BoundaryData data_;
    SolverOptions opts_;
    std::shared_ptr<PlemeljWeight> weight_;

    // quadrature nodes on the data-carrying arcs
    struct Node {
        double theta;
        double weight; // d(theta) weight
        cplx t;
        cplx g; // f / X0+
        cplx f;
    };
    std::vector<Node> nodes_;
    std::vector<double> breaks_; // all non-smooth angles of g

    std::vector<cplx> corrections_; // C_k, k = kmin_ .. kmax_
    int kmin_ = 0;
    int kmax_ = 1;

    // series bundle about the origin
    std::vector<cplx> phi_series_;
    std::vector<cplx> psi_num_series_; // Psi * omega' Taylor coefficients
    std::vector<cplx> eta_series_;
    std::vector<cplx> chi_series_;
    std::vector<cplx> omega_series_;
    std::vector<cplx> omega_deriv_series_;

    cplx u_offset_{0.0, 0.0};
    double r_series_eff_ = 0.9;
    double panel_ell_ = 0.01; // mid-arc panel length scale
    SolveDiagnostics diag_;

    std::function<cplx(double)> g_interp_; // panel interpolant of g

    cplx f_value(double theta) const;
    cplx cauchy_F(cplx zeta) const;       // (1/2 pi i) int g/(t - zeta) dt
    cplx cauchy_F_prime(cplx zeta) const;
    cplx F_pv(double theta) const;        // principal value of the same
    cplx correction_poly(cplx zeta) const;
    cplx correction_deriv(cplx zeta) const;
    cplx weight_at_deriv(cplx zeta) const;
    int effective_M() const;
    friend struct SolverScratch;
};

RiemannHilbertSolution solve(std::shared_ptr<const conf::DiskMap> map,
                             const BoundaryPartition& partition,
                             const MaterialParams& material,
                             const BoundaryData& data,
                             const SolverOptions& opts = {});

} // namespace fracmap::rh

#endif
