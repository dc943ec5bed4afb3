#pragma once

// Triangle meshes of the immersed surfaces.  The domain is sampled on a
// regular grid, X = Re int omega is accumulated along a spanning tree of the
// grid edges from a single base vertex, and every non-tree edge is integrated
// once more as a closure check.  Nothing is averaged: the tree defines the
// vertex positions, the closure defects are reported, and a defect above
// tolerance means the data (not the mesh) is wrong.
//
// Sphere domains are sampled on a square window [-L, L]^2 of the z chart and
// clipped, not compactified.  Torus domains use a cell-centered grid on the
// fundamental parallelogram with wrap-around edges, so the closure checks
// include the two period cycles.  A nonorientable torus (Klein bottle data)
// is meshed on the quotient: a half strip in the imaginary direction, with
// the two seam rows glued to themselves through the glide u -> conj(u) + w1.
// Vertices closer to an end than the cutoff are dropped, faces are kept only
// when all three corners survive.

#include <array>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinor/catalog.hpp"
#include "spinor/numeric.hpp"
#include "spinor/spin_core.hpp"

namespace spinor {

struct Mesh {
    std::vector<std::array<double, 3>> vertices;
    std::vector<std::array<int, 3>> faces;
    std::vector<int> boundary_tags;  // 1 when the vertex sits within 2x cutoff of an end
    double cutoff = 0.0;             // end exclusion radius actually used
    double closure_residual = 0.0;   // max |X defect| over all non-tree grid edges
};

namespace detail {

struct GridEdge {
    int a = 0, b = 0;  // grid vertex ids
    cplx za, zb;       // plane endpoints of the integration segment (zb unreduced)
};

struct GridQuad {
    std::array<int, 4> v{};  // cyclic corner order
};

struct DomainGrid {
    std::vector<cplx> points;  // representative plane point per grid vertex
    std::vector<GridEdge> edges;
    std::vector<GridQuad> quads;
    double diameter = 0.0;
};

// Distance from z to an end, in the metric the cutoff is measured in.  The
// end at infinity on the sphere is |1/z| away, matching its chart coordinate.
inline double end_distance(const RealizedSurface& rs, cplx z, cplx end) {
    if (rs.ctx) return rs.ctx->distance(z, end);
    if (is_infinity(end)) return 1.0 / std::max(std::abs(z), 1e-300);
    return std::abs(z - end);
}

inline double min_end_distance(const RealizedSurface& rs, const SurfaceSpec& spec,
                               cplx z) {
    double d = 1e300;
    for (cplx e : spec.ends) d = std::min(d, end_distance(rs, z, e));
    return d;
}

inline DomainGrid sphere_grid(const SurfaceSpec& spec, int n) {
    double r = 1.0;
    for (cplx e : spec.ends)
        if (!is_infinity(e)) r = std::max(r, std::abs(e));
    const double half = 2.0 * r;
    DomainGrid g;
    g.diameter = 2.0 * std::sqrt(2.0) * half;
    const int side = n + 1;
    auto id = [side](int i, int j) { return j * side + i; };
    for (int j = 0; j < side; ++j)
        for (int i = 0; i < side; ++i)
            g.points.push_back(cplx(-half + 2.0 * half * i / n,
                                    -half + 2.0 * half * j / n));
    for (int j = 0; j < side; ++j)
        for (int i = 0; i < side; ++i) {
            if (i + 1 < side)
                g.edges.push_back({id(i, j), id(i + 1, j), g.points[id(i, j)],
                                   g.points[id(i + 1, j)]});
            if (j + 1 < side)
                g.edges.push_back({id(i, j), id(i, j + 1), g.points[id(i, j)],
                                   g.points[id(i, j + 1)]});
        }
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            g.quads.push_back({{id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)}});
    return g;
}

inline DomainGrid torus_grid(const SurfaceSpec& spec, int n) {
    const cplx dx = 2.0 * spec.omega1 / double(n);
    const cplx dy = 2.0 * spec.omega3 / double(n);
    DomainGrid g;
    g.diameter = std::max(std::abs(2.0 * spec.omega1 + 2.0 * spec.omega3),
                          std::abs(2.0 * spec.omega1 - 2.0 * spec.omega3));
    auto id = [n](int i, int j) { return j * n + i; };
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            g.points.push_back((i + 0.5) * dx + (j + 0.5) * dy);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const cplx z = g.points[id(i, j)];
            g.edges.push_back({id(i, j), id((i + 1) % n, j), z, z + dx});
            g.edges.push_back({id(i, j), id(i, (j + 1) % n), z, z + dy});
        }
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            g.quads.push_back({{id(i, j), id((i + 1) % n, j),
                                id((i + 1) % n, (j + 1) % n), id(i, (j + 1) % n)}});
    return g;
}

// Quotient grid for Klein bottle data on a rectangular lattice: full period
// in x, half period in y, both seam rows glued to themselves by the glide
// (x, y) -> (x + w1, -y).  Seam cells are emitted for half the i range only,
// since the glide identifies the cell at i with the one at i + n/2.
inline DomainGrid klein_grid(const SurfaceSpec& spec, int n) {
    if (n < 4 || n % 2 != 0)
        throw std::invalid_argument("build_mesh: Klein grids need an even resolution >= 4");
    if (std::abs(spec.omega1.imag()) > 1e-12 * std::abs(spec.omega1) ||
        std::abs(spec.omega3.real()) > 1e-12 * std::abs(spec.omega3))
        throw std::invalid_argument("build_mesh: Klein quotient needs a rectangular lattice");
    const int m = n / 2;
    const cplx dx = 2.0 * spec.omega1 / double(n);
    const cplx dy = 2.0 * spec.omega3 / double(n);
    DomainGrid g;
    g.diameter = std::max(std::abs(2.0 * spec.omega1 + 2.0 * spec.omega3),
                          std::abs(2.0 * spec.omega1 - 2.0 * spec.omega3));
    auto id = [n](int i, int j) { return j * n + i; };
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i)
            g.points.push_back((i + 0.5) * dx + (j + 0.5) * dy);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) {
            const cplx z = g.points[id(i, j)];
            g.edges.push_back({id(i, j), id((i + 1) % n, j), z, z + dx});
            if (j + 1 < m)
                g.edges.push_back({id(i, j), id(i, j + 1), z, z + dy});
        }
    for (int i = 0; i < n / 2; ++i) {
        const cplx zb = g.points[id(i, 0)];
        g.edges.push_back({id(i, 0), id((i + n / 2) % n, 0), zb, zb - dy});
        const cplx zt = g.points[id(i, m - 1)];
        g.edges.push_back({id(i, m - 1), id((i + n / 2) % n, m - 1), zt, zt + dy});
    }
    for (int j = 0; j + 1 < m; ++j)
        for (int i = 0; i < n; ++i)
            g.quads.push_back({{id(i, j), id((i + 1) % n, j),
                                id((i + 1) % n, j + 1), id(i, j + 1)}});
    for (int i = 0; i < n / 2; ++i) {
        g.quads.push_back({{id((i + n / 2) % n, 0), id((i + n / 2 + 1) % n, 0),
                            id((i + 1) % n, 0), id(i, 0)}});
        g.quads.push_back({{id(i, m - 1), id((i + 1) % n, m - 1),
                            id((i + n / 2 + 1) % n, m - 1), id((i + n / 2) % n, m - 1)}});
    }
    return g;
}

}  // namespace detail

// Mesh the surface stored in spec.  resolution is the number of grid cells
// per period (torus) or per window side (sphere); end_cutoff <= 0 selects the
// default of 5% of the domain diameter.  Requires data that actually closes
// up: the returned closure_residual is the measured path-independence defect
// and is the caller's to check.
inline Mesh build_mesh(const SurfaceSpec& spec, int resolution, double end_cutoff = 0.0) {
    if (resolution < 2)
        throw std::invalid_argument("build_mesh: resolution must be at least 2");
    const RealizedSurface rs = realize(spec);

    detail::DomainGrid grid;
    if (spec.domain_kind == Domain::Kind::sphere) {
        grid = detail::sphere_grid(spec, resolution);
    } else if (spec.nonorientable) {
        grid = detail::klein_grid(spec, resolution);
    } else {
        grid = detail::torus_grid(spec, resolution);
    }

    Mesh mesh;
    mesh.cutoff = (end_cutoff > 0.0) ? end_cutoff : 0.05 * grid.diameter;

    const int nv = static_cast<int>(grid.points.size());
    std::vector<double> clearance(nv);
    std::vector<char> kept(nv);
    for (int v = 0; v < nv; ++v) {
        clearance[v] = detail::min_end_distance(rs, spec, grid.points[v]);
        kept[v] = clearance[v] >= mesh.cutoff ? 1 : 0;
    }

    // Usable edges: both endpoints kept and the midpoint not much closer to
    // an end than the vertices are allowed to be.
    std::vector<int> usable;
    for (int e = 0; e < static_cast<int>(grid.edges.size()); ++e) {
        const auto& ed = grid.edges[e];
        if (!kept[ed.a] || !kept[ed.b]) continue;
        const cplx mid = 0.5 * (ed.za + ed.zb);
        if (detail::min_end_distance(rs, spec, mid) < 0.6 * mesh.cutoff) continue;
        usable.push_back(e);
    }
    std::vector<std::vector<int>> adj(nv);
    for (int e : usable) {
        adj[grid.edges[e].a].push_back(e);
        adj[grid.edges[e].b].push_back(e);
    }

    int root = -1;
    for (int v = 0; v < nv; ++v)
        if (kept[v] && (root < 0 || clearance[v] > clearance[root])) root = v;
    if (root < 0) {
        // Every vertex is inside some exclusion disk; an empty mesh is valid.
        return mesh;
    }

    // Breadth-first spanning tree from the root; X accumulates along tree
    // edges only, so every vertex has one canonical value.
    std::vector<char> reached(nv, 0);
    std::vector<char> edge_in_tree(grid.edges.size(), 0);
    std::vector<std::array<double, 3>> X(nv, {0.0, 0.0, 0.0});
    std::deque<int> queue;
    reached[root] = 1;
    queue.push_back(root);
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (int e : adj[v]) {
            const auto& ed = grid.edges[e];
            const int w = (ed.a == v) ? ed.b : ed.a;
            if (reached[w]) continue;
            const auto step = integrate_X(rs.pair, ed.za, ed.zb);
            for (int k = 0; k < 3; ++k)
                X[w][k] = (ed.a == v) ? X[v][k] + step[k] : X[v][k] - step[k];
            edge_in_tree[e] = 1;
            reached[w] = 1;
            queue.push_back(w);
        }
    }

    // Closure: every usable non-tree edge is integrated once and compared
    // against the tree values at its endpoints.
    double worst = 0.0;
    for (int e : usable) {
        if (edge_in_tree[e]) continue;
        const auto& ed = grid.edges[e];
        if (!reached[ed.a] || !reached[ed.b]) continue;
        const auto step = integrate_X(rs.pair, ed.za, ed.zb);
        for (int k = 0; k < 3; ++k)
            worst = std::max(worst, std::abs(X[ed.a][k] + step[k] - X[ed.b][k]));
    }
    mesh.closure_residual = worst;

    std::vector<int> final_id(nv, -1);
    for (int v = 0; v < nv; ++v) {
        if (!kept[v] || !reached[v]) continue;
        for (double c : X[v])
            if (!std::isfinite(c))
                throw ConvergenceError("build_mesh: non-finite vertex coordinate");
        final_id[v] = static_cast<int>(mesh.vertices.size());
        mesh.vertices.push_back(X[v]);
        mesh.boundary_tags.push_back(clearance[v] < 2.0 * mesh.cutoff ? 1 : 0);
    }
    for (const auto& q : grid.quads) {
        bool ok = true;
        for (int c : q.v) ok = ok && final_id[c] >= 0;
        if (!ok) continue;
        mesh.faces.push_back({final_id[q.v[0]], final_id[q.v[1]], final_id[q.v[2]]});
        mesh.faces.push_back({final_id[q.v[0]], final_id[q.v[2]], final_id[q.v[3]]});
    }
    return mesh;
}

// Wavefront OBJ text: a single header comment, then vertices, then 1-based
// faces.  Numbers are printed with enough digits to round-trip exactly, so
// re-exporting an imported mesh reproduces the bytes.
inline std::string obj_to_string(const Mesh& mesh) {
    std::string out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "# surface mesh: %zu vertices, %zu faces\n",
                  mesh.vertices.size(), mesh.faces.size());
    out += buf;
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", v[0], v[1], v[2]);
        out += buf;
    }
    for (const auto& f : mesh.faces) {
        std::snprintf(buf, sizeof buf, "f %d %d %d\n", f[0] + 1, f[1] + 1, f[2] + 1);
        out += buf;
    }
    return out;
}

inline void export_obj(const Mesh& mesh, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("export_obj: cannot open " + path);
    f << obj_to_string(mesh);
    if (!f) throw std::runtime_error("export_obj: write failed for " + path);
}

// Parses the vertex and face statements of an OBJ stream.  Only the subset
// emitted by obj_to_string is understood; anything else is an error.
inline Mesh obj_from_string(const std::string& text) {
    Mesh mesh;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v") {
            std::array<double, 3> v{};
            ls >> v[0] >> v[1] >> v[2];
            if (!ls) throw std::invalid_argument("obj: bad vertex line: " + line);
            mesh.vertices.push_back(v);
        } else if (tag == "f") {
            std::array<int, 3> f{};
            ls >> f[0] >> f[1] >> f[2];
            if (!ls) throw std::invalid_argument("obj: bad face line: " + line);
            for (int& k : f) {
                if (k < 1 || k > static_cast<int>(mesh.vertices.size()))
                    throw std::invalid_argument("obj: face index out of range: " + line);
                --k;
            }
            mesh.faces.push_back(f);
        } else {
            throw std::invalid_argument("obj: unsupported statement: " + line);
        }
    }
    mesh.boundary_tags.assign(mesh.vertices.size(), 0);
    return mesh;
}

inline Mesh import_obj(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("import_obj: cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return obj_from_string(ss.str());
}

}  // namespace spinor
