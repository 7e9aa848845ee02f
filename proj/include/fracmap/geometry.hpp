#ifndef FRACMAP_GEOMETRY_HPP
#define FRACMAP_GEOMETRY_HPP

#include <optional>
#include <vector>

#include "fracmap/complexutil.hpp"

namespace fracmap::geo {

// Planar points are complex numbers in the physical (z) plane.

struct Kink {
    double theta = 0.0; // radians, in [-pi/2, pi/2], relative to prior heading
    double d = 0.0;     // segment length, > 0 for applied kinks
};

// Polyline crack. The first point is the mouth (on the outer boundary), the
// last point is the tip. Segment lengths are positive and the path is simple.
struct CrackPath {
    std::vector<cplx> points;
    std::vector<Kink> kinks; // extensions applied after the initial geometry

    cplx tip() const { return points.back(); }
    cplx mouth() const { return points.front(); }
    double length() const;
    cplx tip_direction() const; // unit vector of the last segment
    bool is_prefix_of(const CrackPath& other, double tol = 1e-12) const;
    std::uint64_t hash() const; // stable content hash, used as cache key
};

enum class OuterShape { square, disk };

struct AnalyticalDomain {
    OuterShape shape = OuterShape::square;
    cplx center{0.0, 0.0};
    double size = 0.0;      // side length L (square) or radius r_A (disk)
    int disk_vertices = 64; // polygon count approximating a disk boundary
    CrackPath crack;
    double slit_half_width = 0.0; // w

    // Vertices of the outer boundary polygon, counter-clockwise.
    std::vector<cplx> outer_polygon() const;
    double diameter() const;
    // Signed clearance of a point from the outer boundary (positive inside).
    double boundary_clearance(cplx p) const;
    void validate() const; // throws geometry_error on violated invariants
};

struct SlitPolygon {
    std::vector<cplx> vertices; // counter-clockwise, simple
    int tip_index = -1;         // first tip-face corner met along the slit
    int slit_vertex_count = 0;  // slit corners come first in `vertices`

    double diameter() const;
    bool is_simple() const; // exhaustive pairwise segment intersection test
    double signed_area() const;
    // Interior angle fractions alpha_i = angle_i / pi at each vertex.
    std::vector<double> interior_angle_fractions() const;
};

// Append one segment of length d at kink angle theta (measured from the
// current tip heading). d = 0 returns the path unchanged. Throws
// geometry_error when the extension leaves the analytical domain.
CrackPath extend_crack(const CrackPath& path, double theta, double d,
                       const AnalyticalDomain* domain = nullptr);

// Replace the crack polyline by a closed notch of half-width w with a blunt
// two-corner tip, merged with the outer boundary into one simple polygon.
SlitPolygon widen_slit(const AnalyticalDomain& domain);

// Segment intersection helper (shared with tests' brute-force oracle).
bool segments_intersect(cplx a0, cplx a1, cplx b0, cplx b1);

bool point_in_polygon(const std::vector<cplx>& poly, cplx p);

} // namespace fracmap::geo

#endif
