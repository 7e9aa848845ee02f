#include "fracmap/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <sstream>

namespace fracmap::geo {

namespace {

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

cplx left_normal(cplx dir) { return dir * I; }

// Intersection of lines P + s*u and Q + t*v.
std::optional<cplx> line_intersect(cplx P, cplx u, cplx Q, cplx v)
{
    const double den = cross(u, v);
    if (std::abs(den) < 1e-14 * std::abs(u) * std::abs(v)) return std::nullopt;
    const double s = cross(Q - P, v) / den;
    return P + s * u;
}

void fnv_accumulate(std::uint64_t& h, std::uint64_t word)
{
    for (int i = 0; i < 8; ++i) {
        h ^= (word >> (8 * i)) & 0xffu;
        h *= 1099511628211ull;
    }
}

void fnv_double(std::uint64_t& h, double v)
{
    fnv_accumulate(h, std::bit_cast<std::uint64_t>(v));
}

} // namespace

double CrackPath::length() const
{
    double s = 0.0;
    for (size_t i = 1; i < points.size(); ++i) s += std::abs(points[i] - points[i - 1]);
    return s;
}

cplx CrackPath::tip_direction() const
{
    if (points.size() < 2) throw geometry_error("crack path needs >= 2 points");
    const cplx d = points.back() - points[points.size() - 2];
    const double n = std::abs(d);
    if (n == 0.0) throw geometry_error("degenerate tip segment");
    return d / n;
}

bool CrackPath::is_prefix_of(const CrackPath& other, double tol) const
{
    // extend_crack only appends, so prefixes match vertex by vertex
    if (points.size() > other.points.size()) return false;
    for (size_t i = 0; i < points.size(); ++i)
        if (std::abs(points[i] - other.points[i]) > tol) return false;
    return true;
}

std::uint64_t CrackPath::hash() const
{
    std::uint64_t h = 1469598103934665603ull;
    for (cplx p : points) {
        fnv_double(h, p.real());
        fnv_double(h, p.imag());
    }
    for (const Kink& k : kinks) {
        fnv_double(h, k.theta);
        fnv_double(h, k.d);
    }
    return h;
}

std::vector<cplx> AnalyticalDomain::outer_polygon() const
{
    std::vector<cplx> v;
    if (shape == OuterShape::square) {
        const double h = 0.5 * size;
        v = {center + cplx{-h, -h}, center + cplx{h, -h}, center + cplx{h, h},
             center + cplx{-h, h}};
    } else {
        // Regular polygon approximating the disk; rotated so the crack mouth
        // faces the middle of an edge.
        const int n = disk_vertices;
        double base = 0.0;
        if (crack.points.size() >= 1)
            base = std::arg(crack.mouth() - center);
        for (int j = 0; j < n; ++j)
            v.push_back(center + size * unit(base + (2.0 * j + 1.0) * pi / n));
    }
    return v;
}

double AnalyticalDomain::diameter() const
{
    return (shape == OuterShape::square) ? size * std::sqrt(2.0) : 2.0 * size;
}

double AnalyticalDomain::boundary_clearance(cplx p) const
{
    const auto poly = outer_polygon();
    double cl = std::numeric_limits<double>::max();
    const size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
        const cplx a = poly[i], b = poly[(i + 1) % n];
        const cplx d = b - a;
        cl = std::min(cl, cross(d, p - a) / std::abs(d));
    }
    return cl;
}

void AnalyticalDomain::validate() const
{
    if (!(slit_half_width > 0.0)) throw geometry_error("slit half-width must be > 0");
    if (!(size > 0.0)) throw geometry_error("outer boundary size must be > 0");
    if (crack.points.size() < 2) throw geometry_error("crack needs >= 2 points");
    for (size_t i = 1; i < crack.points.size(); ++i)
        if (std::abs(crack.points[i] - crack.points[i - 1]) <= 0.0)
            throw geometry_error("crack segment has zero length");
    for (const Kink& k : crack.kinks)
        if (k.theta < -0.5 * pi - 1e-12 || k.theta > 0.5 * pi + 1e-12)
            throw geometry_error("kink angle outside [-pi/2, pi/2]");
    // turning angle of the recorded polyline
    for (size_t i = 2; i < crack.points.size(); ++i) {
        const cplx u = crack.points[i - 1] - crack.points[i - 2];
        const cplx v = crack.points[i] - crack.points[i - 1];
        const double turn = std::arg(v / u);
        if (std::abs(turn) > 0.5 * pi + 1e-9)
            throw geometry_error("crack polyline turns by more than pi/2");
    }
    const double mouth_cl = std::abs(boundary_clearance(crack.mouth()));
    if (mouth_cl > 0.02 * size)
        throw geometry_error("crack mouth is not on the outer boundary");
    for (size_t i = 1; i < crack.points.size(); ++i) {
        if (boundary_clearance(crack.points[i]) < 2.0 * slit_half_width) {
            std::ostringstream os;
            os << "crack point " << i << " closer than 2w to the outer boundary";
            throw geometry_error(os.str());
        }
    }
    // simplicity of the open polyline
    const auto& p = crack.points;
    for (size_t i = 0; i + 1 < p.size(); ++i)
        for (size_t j = i + 2; j + 1 < p.size(); ++j)
            if (segments_intersect(p[i], p[i + 1], p[j], p[j + 1]))
                throw geometry_error("crack path self-intersects");
}

double SlitPolygon::diameter() const
{
    double d = 0.0;
    for (size_t i = 0; i < vertices.size(); ++i)
        for (size_t j = i + 1; j < vertices.size(); ++j)
            d = std::max(d, std::abs(vertices[i] - vertices[j]));
    return d;
}

double SlitPolygon::signed_area() const
{
    double a = 0.0;
    const size_t n = vertices.size();
    for (size_t i = 0; i < n; ++i)
        a += cross(vertices[i], vertices[(i + 1) % n]);
    return 0.5 * a;
}

bool SlitPolygon::is_simple() const
{
    const size_t n = vertices.size();
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            if (segments_intersect(vertices[i], vertices[(i + 1) % n],
                                   vertices[j], vertices[(j + 1) % n]))
                return false;
        }
    }
    return true;
}

std::vector<double> SlitPolygon::interior_angle_fractions() const
{
    const size_t n = vertices.size();
    std::vector<double> alpha(n);
    for (size_t i = 0; i < n; ++i) {
        const cplx prev = vertices[(i + n - 1) % n];
        const cplx next = vertices[(i + 1) % n];
        const cplx din = vertices[i] - prev;
        const cplx dout = next - vertices[i];
        const double turn = std::arg(dout / din); // CCW positive
        alpha[i] = 1.0 - turn / pi;
    }
    return alpha;
}

bool segments_intersect(cplx a0, cplx a1, cplx b0, cplx b1)
{
    const double scale = std::max({std::abs(a1 - a0), std::abs(b1 - b0), 1e-300});
    const double eps = 1e-13 * scale * scale;
    const double d1 = cross(a1 - a0, b0 - a0);
    const double d2 = cross(a1 - a0, b1 - a0);
    const double d3 = cross(b1 - b0, a0 - b0);
    const double d4 = cross(b1 - b0, a1 - b0);
    if (((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps)) &&
        ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps)))
        return true;
    auto on_segment = [&](cplx p, cplx q, cplx r) {
        return std::abs(cross(q - p, r - p)) <= eps &&
               std::min(p.real(), q.real()) - 1e-13 * scale <= r.real() &&
               r.real() <= std::max(p.real(), q.real()) + 1e-13 * scale &&
               std::min(p.imag(), q.imag()) - 1e-13 * scale <= r.imag() &&
               r.imag() <= std::max(p.imag(), q.imag()) + 1e-13 * scale;
    };
    if (std::abs(d1) <= eps && on_segment(a0, a1, b0)) return true;
    if (std::abs(d2) <= eps && on_segment(a0, a1, b1)) return true;
    if (std::abs(d3) <= eps && on_segment(b0, b1, a0)) return true;
    if (std::abs(d4) <= eps && on_segment(b0, b1, a1)) return true;
    return false;
}

bool point_in_polygon(const std::vector<cplx>& poly, cplx p)
{
    bool inside = false;
    const size_t n = poly.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const cplx a = poly[i], b = poly[j];
        if ((a.imag() > p.imag()) != (b.imag() > p.imag())) {
            const double x = a.real() + (p.imag() - a.imag()) *
                                            (b.real() - a.real()) /
                                            (b.imag() - a.imag());
            if (p.real() < x) inside = !inside;
        }
    }
    return inside;
}

CrackPath extend_crack(const CrackPath& path, double theta, double d,
                       const AnalyticalDomain* domain)
{
    if (theta < -0.5 * pi || theta > 0.5 * pi)
        throw geometry_error("kink angle outside [-pi/2, pi/2]");
    if (d < 0.0) throw geometry_error("extension length must be >= 0");
    if (d == 0.0) return path;

    CrackPath out = path;
    const cplx dir = path.tip_direction() * unit(theta);
    const cplx new_tip = path.tip() + d * dir;
    out.points.push_back(new_tip);
    out.kinks.push_back({theta, d});

    if (domain) {
        const double w = domain->slit_half_width;
        for (double s : {0.25, 0.5, 0.75, 1.0}) {
            const cplx q = path.tip() + s * d * dir;
            if (domain->boundary_clearance(q) < 2.0 * w) {
                std::ostringstream os;
                os << "crack extension (theta=" << theta << ", d=" << d
                   << ") exits the analytical domain at segment "
                   << out.points.size() - 2;
                throw geometry_error(os.str());
            }
        }
    }
    // the new segment must not cut back into the existing path
    const auto& p = out.points;
    const size_t m = p.size();
    for (size_t i = 0; i + 3 < m; ++i)
        if (segments_intersect(p[i], p[i + 1], p[m - 2], p[m - 1]))
            throw geometry_error("crack extension intersects the existing path");
    return out;
}

SlitPolygon widen_slit(const AnalyticalDomain& domain)
{
    domain.validate();
    const double w = domain.slit_half_width;
    const auto& p = domain.crack.points;
    const size_t m = p.size() - 1; // segment count

    std::vector<cplx> u(m), nl(m);
    for (size_t i = 0; i < m; ++i) {
        u[i] = (p[i + 1] - p[i]) / std::abs(p[i + 1] - p[i]);
        nl[i] = left_normal(u[i]);
    }

    // offset joints at interior crack points (miter join)
    std::vector<cplx> left(m + 1), right(m + 1);
    for (size_t i = 1; i < m; ++i) {
        auto li = line_intersect(p[i - 1] + w * nl[i - 1], u[i - 1],
                                 p[i] + w * nl[i], u[i]);
        auto ri = line_intersect(p[i - 1] - w * nl[i - 1], u[i - 1],
                                 p[i] - w * nl[i], u[i]);
        left[i] = li ? *li : p[i] + w * nl[i];
        right[i] = ri ? *ri : p[i] - w * nl[i];
    }
    // blunt tip face of width 2w through the tip point
    left[m] = p[m] + w * nl[m - 1];
    right[m] = p[m] - w * nl[m - 1];

    // mouth corners: offset lines of segment 0 meet the outer edge line
    const auto outer = domain.outer_polygon();
    const size_t no = outer.size();
    size_t edge = no;
    double best = std::numeric_limits<double>::max();
    for (size_t i = 0; i < no; ++i) {
        const cplx a = outer[i], b = outer[(i + 1) % no];
        const cplx d = b - a;
        const double t =
            std::clamp((((p[0] - a) / d)).real(), 0.0, 1.0);
        const double dist = std::abs(p[0] - (a + t * d));
        if (dist < best) {
            best = dist;
            edge = i;
        }
    }
    const cplx ea = outer[edge], eb = outer[(edge + 1) % no];
    auto ml = line_intersect(p[0] + w * nl[0], u[0], ea, eb - ea);
    auto mr = line_intersect(p[0] - w * nl[0], u[0], ea, eb - ea);
    if (!ml || !mr)
        throw geometry_error("crack enters parallel to the outer edge");
    left[0] = *ml;
    right[0] = *mr;

    SlitPolygon poly;
    for (size_t i = 0; i <= m; ++i) poly.vertices.push_back(left[i]);
    for (size_t i = m + 1; i-- > 0;) poly.vertices.push_back(right[i]);
    poly.tip_index = static_cast<int>(m);
    poly.slit_vertex_count = static_cast<int>(2 * (m + 1));
    for (size_t i = 1; i <= no; ++i)
        poly.vertices.push_back(outer[(edge + i) % no]);

    const double diam = poly.diameter();
    for (size_t i = 0; i < poly.vertices.size(); ++i) {
        const cplx a = poly.vertices[i];
        const cplx b = poly.vertices[(i + 1) % poly.vertices.size()];
        if (std::abs(b - a) < 1e-9 * diam)
            throw geometry_error(
                "widened slit has coincident corners; use a smaller w");
    }
    if (!poly.is_simple())
        throw geometry_error("widened slit self-intersects; use a smaller w");
    if (poly.signed_area() <= 0.0)
        throw geometry_error("widened slit polygon is not counter-clockwise");
    return poly;
}

} // namespace fracmap::geo
