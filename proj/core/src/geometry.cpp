#include "stokesrbf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace stokesrbf {

namespace {

constexpr double kGoldenAngle = 2.399963229728653;  // pi (3 - sqrt 5)

double seed_rotation(unsigned seed) {
    // splitmix-style scramble onto [0, 2pi)
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z ^= z >> 31;
    return 2.0 * M_PI * (static_cast<double>(z >> 11) / 9007199254740992.0);
}

}  // namespace

NodeSet generate_disk_nodes(int target_count, unsigned seed) {
    if (target_count < 12) throw BadGeometry("disk node target must be at least 12");
    const double h = std::sqrt(M_PI / target_count);
    int n_b = static_cast<int>(std::lround(2.0 * std::sqrt(M_PI * target_count)));
    n_b = std::clamp(n_b, 8, target_count - 1);
    const int n_in = target_count - n_b;

    NodeSet set;
    const double rot = seed_rotation(seed);
    const double r_max = 1.0 - 0.6 * h;
    set.interior.reserve(n_in);
    for (int k = 1; k <= n_in; ++k) {
        const double r = r_max * std::sqrt((k - 0.5) / n_in);
        const double th = k * kGoldenAngle + rot;
        set.interior.push_back({r * std::cos(th), r * std::sin(th)});
    }
    set.boundary.reserve(n_b);
    for (int k = 0; k < n_b; ++k) {
        const double th = 2.0 * M_PI * k / n_b + rot;
        const double cx = std::cos(th), sy = std::sin(th);
        set.boundary.push_back({cx, sy});
        set.normals.push_back({cx, sy});
        set.tangents.push_back({-sy, cx});
    }
    return set;
}

NodeSet generate_square_nodes(int n_per_side) {
    if (n_per_side < 3) throw BadGeometry("square grid needs at least 3 nodes per side");
    const int n = n_per_side;
    const double step = 1.0 / (n - 1);
    NodeSet set;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const Point2 p{i * step, j * step};
            const bool bottom = j == 0, top = j == n - 1, left = i == 0, right = i == n - 1;
            if (!(bottom || top || left || right)) {
                set.interior.push_back(p);
                continue;
            }
            Vec2 nu;
            if (bottom) nu = {0.0, -1.0};
            else if (right) nu = {1.0, 0.0};
            else if (top) nu = {0.0, 1.0};
            else nu = {-1.0, 0.0};
            set.boundary.push_back(p);
            set.normals.push_back(nu);
            set.tangents.push_back({-nu.y, nu.x});
        }
    return set;
}

void save_nodes(const NodeSet& set, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ParseError("cannot open '" + path + "' for writing");
    os << set.n_interior() << ' ' << set.n_boundary() << '\n';
    char buf[96];
    for (const Point2& p : set.interior) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g", p.x, p.y);
        os << buf << '\n';
    }
    for (std::size_t k = 0; k < set.n_boundary(); ++k) {
        const Point2& p = set.boundary[k];
        const Vec2& nu = set.normals[k];
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g", p.x, p.y, nu.x, nu.y);
        os << buf << '\n';
    }
}

NodeSet load_nodes(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ParseError("cannot open '" + path + "'");
    std::string line;
    long line_no = 0;
    auto next_line = [&]() -> std::istringstream {
        while (std::getline(is, line)) {
            ++line_no;
            if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos)
                return std::istringstream(line);
        }
        throw ParseError("unexpected end of node file", line_no + 1);
    };

    std::size_t n_in = 0, n_b = 0;
    {
        auto hs = next_line();
        if (!(hs >> n_in >> n_b)) throw ParseError("expected 'n_in n_b' header", line_no);
    }
    NodeSet set;
    set.interior.reserve(n_in);
    for (std::size_t i = 0; i < n_in; ++i) {
        auto ls = next_line();
        Point2 p;
        if (!(ls >> p.x >> p.y)) throw ParseError("expected 'x y'", line_no);
        set.interior.push_back(p);
    }
    for (std::size_t i = 0; i < n_b; ++i) {
        auto ls = next_line();
        Point2 p;
        Vec2 nu;
        if (!(ls >> p.x >> p.y >> nu.x >> nu.y))
            throw ParseError("expected 'x y nx ny'", line_no);
        if (std::abs(nu.norm() - 1.0) > 1e-12)
            throw ParseError("boundary normal is not unit length", line_no);
        set.boundary.push_back(p);
        set.normals.push_back(nu);
        set.tangents.push_back({-nu.y, nu.x});
    }
    return set;
}

std::vector<Stencil> build_stencils(const NodeSet& set, int local_size) {
    const std::size_t n_total = set.total();
    if (local_size < 3 || static_cast<std::size_t>(local_size) > n_total)
        throw StencilTooSmall("local size must be in [3, total nodes]");

    std::vector<Stencil> out;
    out.reserve(set.n_interior());
    std::vector<std::size_t> order(n_total);
    for (std::size_t c = 0; c < set.n_interior(); ++c) {
        const Point2 pc = set.interior[c];
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double da = dist2(set.node(a), pc), db = dist2(set.node(b), pc);
            if (da != db) return da < db;
            return a < b;
        });
        Stencil st;
        st.center = c;
        st.nodes.assign(order.begin(), order.begin() + local_size);

        // Boundary nodes collocate the boundary operator; interior nodes split
        // between solution centers and PDE centers: the nearer half (center
        // first) are solution centers, the farther half PDE centers. The
        // center never lands in its own pdec set, and the outward PDE ring
        // keeps the stencil's amplification spectrum inside the BDF region
        // where interleaved splits do not.
        std::vector<std::size_t> inter;
        for (std::size_t g : st.nodes) {
            if (set.is_boundary(g))
                st.fc.push_back(g);
            else
                inter.push_back(g);  // distance-sorted, center first
        }
        const std::size_t n_sc = (inter.size() + 1) / 2;
        st.sc.assign(inter.begin(), inter.begin() + std::min(n_sc, inter.size()));
        st.pdec.assign(inter.begin() + std::min(n_sc, inter.size()), inter.end());
        if (st.pdec.empty())
            throw StencilTooSmall("stencil " + std::to_string(c) + " has no PDE nodes");

        double acc = 0.0;
        for (std::size_t a : st.nodes) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t b : st.nodes)
                if (a != b) best = std::min(best, dist2(set.node(a), set.node(b)));
            acc += std::sqrt(best);
        }
        st.local_h = acc / st.nodes.size();
        out.push_back(std::move(st));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Bowyer-Watson Delaunay triangulation
// ---------------------------------------------------------------------------

namespace {

struct BwTriangle {
    std::size_t v[3];
    bool alive = true;
};

double orient2d(const Point2& a, const Point2& b, const Point2& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

// > 0 when p lies strictly inside the circumcircle of CCW triangle (a,b,c).
double incircle(const Point2& a, const Point2& b, const Point2& c, const Point2& p) {
    const double ax = a.x - p.x, ay = a.y - p.y;
    const double bx = b.x - p.x, by = b.y - p.y;
    const double cx = c.x - p.x, cy = c.y - p.y;
    const double a2 = ax * ax + ay * ay, b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
    const double det = ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx);
    const double scale = (a2 + b2 + c2) * (std::abs(ax * by) + std::abs(bx * cy) + std::abs(cx * ay) + 1e-300);
    if (std::abs(det) > 1e-12 * scale) return det;
    // near-degenerate: recompute in extended precision; exact zeros count as outside
    const long double axl = a.x - (long double)p.x, ayl = a.y - (long double)p.y;
    const long double bxl = b.x - (long double)p.x, byl = b.y - (long double)p.y;
    const long double cxl = c.x - (long double)p.x, cyl = c.y - (long double)p.y;
    const long double a2l = axl * axl + ayl * ayl, b2l = bxl * bxl + byl * byl,
                      c2l = cxl * cxl + cyl * cyl;
    const long double detl =
        axl * (byl * c2l - b2l * cyl) - ayl * (bxl * c2l - b2l * cxl) + a2l * (bxl * cyl - byl * cxl);
    return static_cast<double>(detl);
}

}  // namespace

Triangulation triangulate(const NodeSet& set) {
    const std::size_t n = set.total();
    if (n < 3) throw DegenerateGeometry("triangulation needs at least 3 nodes");

    std::vector<Point2> pts(n + 3);
    for (std::size_t i = 0; i < n; ++i) pts[i] = set.node(i);

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (std::size_t i = 0; i < n; ++i) {
        xmin = std::min(xmin, pts[i].x); xmax = std::max(xmax, pts[i].x);
        ymin = std::min(ymin, pts[i].y); ymax = std::max(ymax, pts[i].y);
    }
    const double span = std::max({xmax - xmin, ymax - ymin, 1e-12});
    const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
    pts[n] = {cx - 40.0 * span, cy - 20.0 * span};
    pts[n + 1] = {cx + 40.0 * span, cy - 20.0 * span};
    pts[n + 2] = {cx, cy + 40.0 * span};

    std::vector<BwTriangle> tris;
    tris.push_back({{n, n + 1, n + 2}, true});

    std::vector<std::size_t> cavity;
    std::map<std::pair<std::size_t, std::size_t>, int> edge_count;
    for (std::size_t ip = 0; ip < n; ++ip) {
        const Point2& p = pts[ip];
        cavity.clear();
        for (std::size_t t = 0; t < tris.size(); ++t) {
            if (!tris[t].alive) continue;
            const auto& v = tris[t].v;
            if (incircle(pts[v[0]], pts[v[1]], pts[v[2]], p) > 0.0) cavity.push_back(t);
        }
        if (cavity.empty()) throw DegenerateGeometry("point outside triangulated region (duplicate node?)");
        edge_count.clear();
        for (std::size_t t : cavity) {
            tris[t].alive = false;
            const auto& v = tris[t].v;
            for (int e = 0; e < 3; ++e) {
                std::size_t u1 = v[e], u2 = v[(e + 1) % 3];
                if (u1 > u2) std::swap(u1, u2);
                ++edge_count[{u1, u2}];
            }
        }
        for (const auto& [edge, count] : edge_count) {
            if (count != 1) continue;  // interior cavity edge
            std::size_t u1 = edge.first, u2 = edge.second;
            if (orient2d(pts[u1], pts[u2], p) < 0.0) std::swap(u1, u2);
            tris.push_back({{u1, u2, ip}, true});
        }
    }

    Triangulation out;
    for (const BwTriangle& t : tris) {
        if (!t.alive) continue;
        if (t.v[0] >= n || t.v[1] >= n || t.v[2] >= n) continue;
        const double a2 = orient2d(pts[t.v[0]], pts[t.v[1]], pts[t.v[2]]);
        if (a2 <= 0.0) continue;  // degenerate sliver
        out.triangles.push_back({t.v[0], t.v[1], t.v[2]});
        out.areas.push_back(0.5 * a2);
    }
    if (out.triangles.empty()) throw DegenerateGeometry("all nodes collinear");
    return out;
}

double l2_norm(const std::vector<double>& nodal, const Triangulation& tri) {
    double s = 0.0;
    for (std::size_t t = 0; t < tri.triangles.size(); ++t) {
        const auto& v = tri.triangles[t];
        double m = 0.0;
        for (int e = 0; e < 3; ++e) {
            const double u = nodal.at(v[e]);
            m += u * u;
        }
        s += tri.areas[t] * m / 3.0;
    }
    return std::sqrt(s);
}

std::vector<double> lumped_masses(const NodeSet& set, const Triangulation& tri) {
    std::vector<double> m(set.total(), 0.0);
    for (std::size_t t = 0; t < tri.triangles.size(); ++t)
        for (int e = 0; e < 3; ++e) m.at(tri.triangles[t][e]) += tri.areas[t] / 3.0;
    return m;
}

}  // namespace stokesrbf
