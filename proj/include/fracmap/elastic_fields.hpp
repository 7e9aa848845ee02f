#ifndef FRACMAP_ELASTIC_FIELDS_HPP
#define FRACMAP_ELASTIC_FIELDS_HPP

#include <iosfwd>

#include "fracmap/riemann_hilbert.hpp"

namespace fracmap::fields {

struct FieldSample {
    cplx zeta;             // disk point
    cplx z;                // physical point omega(zeta)
    double srr = 0.0, sff = 0.0, srf = 0.0; // mapped-polar components
    double s11 = 0.0, s22 = 0.0, s12 = 0.0; // physical Cartesian components
    double u1 = 0.0, u2 = 0.0;              // displacements
};

class FieldEvaluator {
public:
    explicit FieldEvaluator(const rh::RiemannHilbertSolution& sol) : sol_(sol) {}

    // stresses; |zeta| < 1 (the origin is handled through the Cartesian
    // form, where the mapped frame degeneracy cancels)
    FieldSample stresses_at(cplx zeta) const;
    cplx displacement_at(cplx zeta) const; // u1 + i u2
    FieldSample sample(cplx zeta) const;   // stresses + displacements

    // physical traction t1 + i t2 on the image of the circle of radius r at
    // angle theta (outward normal of the physical domain)
    cplx traction_at(double theta, double r) const;

    // map helpers (series-accelerated)
    cplx map_point(cplx zeta) const;
    cplx map_deriv(cplx zeta) const { return sol_.map().deriv(zeta); }

    const rh::RiemannHilbertSolution& solution() const { return sol_; }

private:
    const rh::RiemannHilbertSolution& sol_;
};

// Independent displacement route for verification: integrates eta' = Phi
// omega' and chi' = Psi omega' along the polyline 0 -> waypoints -> zeta with
// adaptive Gauss panels, then applies the same one-point offset match.
cplx displacement_by_path(const rh::RiemannHilbertSolution& sol, cplx zeta,
                          const std::vector<cplx>& waypoints = {});

// Straight-crack displacement series with exponents k/2 and traction-free
// faces built in; a_n are the series coefficients.
cplx series_displacement(const std::vector<cplx>& a, double r, double phi,
                         const rh::MaterialParams& mat);

// Interface interpolation function restricted to r = r_A with the truncation
// pair (N1, N2) tied to the node count n: even n -> (n-2, n-1),
// odd n -> (n-1, n-2).
std::pair<int, int> interpolation_truncation(int nodes);
cplx interpolation_fn(int nodes, const std::vector<cplx>& a, double phi,
                      double r_A, const rh::MaterialParams& mat);

// Near-tip opening reference field: polar coordinates centered at the crack
// tip, crack along the negative x-axis.
cplx mode_I_displacement(double r, double phi, double p, double a,
                         const rh::MaterialParams& mat);

// The same field as a function of the physical point, with its complex
// potentials; frame anchored at `tip` with the crack arriving along
// direction `dir` (unit complex).
struct ModeIField {
    double p = 1.0;
    double a = 1.0;
    rh::MaterialParams mat;
    cplx tip{0.0, 0.0};
    cplx dir{1.0, 0.0};

    cplx displacement(cplx z) const;
    // Kolosov potentials of the local frame evaluated at the local point
    cplx pot_phi(cplx w) const;
    cplx pot_phi_prime(cplx w) const;
    cplx pot_phi_second(cplx w) const;
    cplx pot_psi(cplx w) const;
    cplx pot_psi_prime(cplx w) const;

    // boundary data closures over a disk map (u* and its angle derivative)
    rh::BoundaryData boundary_data(std::shared_ptr<const conf::DiskMap> map) const;
};

// Polar evaluation grid in the disk, graded toward the crack-tip prevertex.
struct FieldGridSpec {
    int radial = 24;
    int angular = 96;
    double r_max = 0.97;
    double tip_angle = 0.0; // prevertex angle that receives angular grading
    bool grade_to_tip = false;
};

std::vector<cplx> make_grid(const FieldGridSpec& spec);

// CSV export, row-major over the grid
void write_field_csv(std::ostream& os, const FieldEvaluator& ev,
                     const std::vector<cplx>& grid);

} // namespace fracmap::fields

#endif
