#ifndef FRACMAP_CONFORMAL_HPP
#define FRACMAP_CONFORMAL_HPP

#include <memory>
#include <string>
#include <vector>

#include "fracmap/geometry.hpp"

namespace fracmap::conf {

// Disk-map interface consumed by the Riemann-Hilbert solver. A numerically
// built Schwarz-Christoffel map and the exact affine map (used by the
// manufactured-solution oracles) both implement it.
class DiskMap {
public:
    virtual ~DiskMap() = default;

    virtual cplx eval(cplx zeta) const = 0;   // omega(zeta), |zeta| <= 1
    virtual cplx deriv(cplx zeta) const = 0;  // omega'
    virtual cplx deriv2(cplx zeta) const = 0; // omega''
    virtual cplx center() const = 0;          // omega(0)

    // Taylor surrogate omega_0..omega_M standing in for the entire-plane
    // idealization; exact for polynomial maps.
    virtual const std::vector<cplx>& taylor() const = 0;
    virtual double taylor_error() const = 0; // max boundary deviation

    // Taylor coefficients of omega' about 0, at least `len` terms.
    virtual std::vector<cplx> deriv_taylor(int len) const = 0;

    // Exact boundary values of the holomorphic reflection at |t| = 1:
    // omega_R(t) = conj(omega(t)), omega_R'(t) = -conj(t)^2 conj(omega'(t)).
    std::pair<cplx, cplx> reflection_boundary(cplx t) const;

    // Reflection at strictly exterior points, via interior evaluations only.
    cplx reflection_deriv(cplx xi) const;  // -xi^-2 conj(omega'(1/conj xi))
    cplx reflection_deriv2(cplx xi) const; // derivative of the above
};

// omega(zeta) = a + b zeta. Exact in every respect; taylor() = {a, b}.
class AffineMap final : public DiskMap {
public:
    AffineMap(cplx a, cplx b);
    cplx eval(cplx zeta) const override { return a_ + b_ * zeta; }
    cplx deriv(cplx) const override { return b_; }
    cplx deriv2(cplx) const override { return {0.0, 0.0}; }
    cplx center() const override { return a_; }
    const std::vector<cplx>& taylor() const override { return taylor_; }
    double taylor_error() const override { return 0.0; }
    std::vector<cplx> deriv_taylor(int len) const override;

private:
    cplx a_, b_;
    std::vector<cplx> taylor_;
};

struct SCOptions {
    double newton_tol = 1e-11;
    int max_iterations = 100;
    int gl_nodes = 24;
    int gj_nodes = 20;
    double panel_ratio = 0.5; // half rule for compound quadrature
    int surrogate_degree = 128;
    int fft_size = 8192;
    int residual_samples_per_side = 8;
};

struct BoundaryCorrespondence {
    struct Sample {
        double theta; // angle on the unit circle
        cplx z;       // boundary point of the polygon
        int side;     // polygon side index (vertex i -> i+1)
    };
    std::vector<Sample> samples;
};

// Numerically constructed Schwarz-Christoffel map from the unit disk onto a
// straight-sided polygon, normalized by omega(0) = interior point and
// omega'(0) > 0.
class ConformalDiskMap final : public DiskMap {
public:
    cplx eval(cplx zeta) const override;
    cplx deriv(cplx zeta) const override;
    cplx deriv2(cplx zeta) const override;
    cplx center() const override { return conformal_center_; }
    const std::vector<cplx>& taylor() const override { return taylor_; }
    double taylor_error() const override { return taylor_error_; }
    std::vector<cplx> deriv_taylor(int len) const override;

    const std::vector<cplx>& prevertices() const { return prevertices_; }
    const std::vector<double>& prevertex_angles() const { return angles_; }
    const std::vector<cplx>& vertices() const { return vertices_; }
    const std::vector<double>& angle_fractions() const { return alphas_; }
    cplx sc_constant() const { return sc_constant_; }
    double residual() const { return residual_; }
    const BoundaryCorrespondence& correspondence() const { return corr_; }

    // Boundary value anchored at the prevertex starting the arc containing t.
    cplx eval_boundary(double theta) const;

    // (Re)compute the degree-M Taylor surrogate from boundary samples.
    void compute_taylor(int M);

    std::string to_json() const;
    static ConformalDiskMap from_json(const std::string& text);

    friend ConformalDiskMap build_map(const geo::SlitPolygon&, cplx, double,
                                      const SCOptions&,
                                      const std::vector<double>*);

private:
    std::vector<cplx> prevertices_;
    std::vector<double> angles_; // ascending, last = 2*pi
    std::vector<double> alphas_;
    std::vector<cplx> vertices_;
    cplx conformal_center_{0.0, 0.0};
    cplx sc_constant_{1.0, 0.0};
    std::vector<cplx> taylor_;
    double taylor_error_ = 0.0;
    double residual_ = 0.0;
    double sweep_anchor_ = 0.0; // geometry-anchored FFT grid origin: mirrored
                                // polygons then produce mirrored surrogates
    SCOptions opts_;
    BoundaryCorrespondence corr_;

    cplx integrand(cplx zeta) const;
    cplx segment_integral(cplx a, cplx b, int sing_a, int sing_b) const;
    void measure_residual();
};

// Solve the parameter problem for the polygon and return the finished map.
// `warm_start` optionally supplies initial prevertex angles (same length as
// the vertex count) from a previously solved nearby geometry.
ConformalDiskMap build_map(const geo::SlitPolygon& polygon, cplx normalization,
                           double tol, const SCOptions& opts = {},
                           const std::vector<double>* warm_start = nullptr);

// build_map with continuation in the slit width: wide slits are easy, the
// target width is reached by geometric shrinking with warm starts. The
// normalization point defaults (NaN) to 70% of the way from the crack tip to
// the far boundary along the tip heading.
ConformalDiskMap build_map_for_domain(const geo::AnalyticalDomain& domain,
                                      cplx normalization = {
                                          std::numeric_limits<double>::quiet_NaN(), 0.0},
                                      double tol = 1e-6,
                                      const SCOptions& opts = {});

cplx default_normalization(const geo::AnalyticalDomain& domain);

} // namespace fracmap::conf

#endif
