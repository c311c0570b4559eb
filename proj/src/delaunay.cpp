#include "vamorph/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numeric>
#include <optional>
#include <unordered_map>

#include "vamorph/errors.hpp"

namespace vamorph {

namespace {

// Relative tolerance below which an in-circle determinant counts as a
// cocircular tie.
constexpr double kCocircularEps = 1e-12;

// +1: d strictly inside the circumcircle of CCW triangle (a,b,c);
// -1: strictly outside; 0: cocircular within tolerance.
int in_circle(Point2 a, Point2 b, Point2 c, Point2 d) {
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;
    const double ad2 = adx * adx + ady * ady;
    const double bd2 = bdx * bdx + bdy * bdy;
    const double cd2 = cdx * cdx + cdy * cdy;

    const double t1 = adx * (bdy * cd2 - cdy * bd2);
    const double t2 = ady * (bdx * cd2 - cdx * bd2);
    const double t3 = ad2 * (bdx * cdy - cdx * bdy);
    const double det = t1 - t2 + t3;
    const double mag = std::abs(adx) * (std::abs(bdy) * cd2 + std::abs(cdy) * bd2) +
                       std::abs(ady) * (std::abs(bdx) * cd2 + std::abs(cdx) * bd2) +
                       ad2 * (std::abs(bdx) * std::abs(cdy) +
                              std::abs(cdx) * std::abs(bdy));
    if (std::abs(det) <= kCocircularEps * mag) return 0;
    return det > 0.0 ? 1 : -1;
}

std::int64_t edge_key(int u, int v) {
    if (u > v) std::swap(u, v);
    return (static_cast<std::int64_t>(u) << 32) | static_cast<std::uint32_t>(v);
}

struct Tri {
    std::array<int, 3> v;
    bool alive = true;
};

struct MeshBuilder {
    std::span<const Point2> pts;
    std::vector<Tri> tris;
    // Undirected edge -> incident triangle ids (-1 = empty slot).
    std::unordered_map<std::int64_t, std::array<int, 2>> edges;

    explicit MeshBuilder(std::span<const Point2> p) : pts(p) {}

    void link(int u, int v, int tri) {
        auto [it, inserted] =
            edges.try_emplace(edge_key(u, v), std::array<int, 2>{-1, -1});
        auto& slot = it->second;
        if (slot[0] == tri || slot[1] == tri) return;
        if (slot[0] < 0)
            slot[0] = tri;
        else if (slot[1] < 0)
            slot[1] = tri;
        else
            throw ComputeError("triangulation edge acquired a third triangle");
    }

    void unlink(int u, int v, int tri) {
        auto it = edges.find(edge_key(u, v));
        if (it == edges.end()) return;
        auto& slot = it->second;
        if (slot[0] == tri) slot[0] = -1;
        if (slot[1] == tri) slot[1] = -1;
        if (slot[0] < 0 && slot[1] < 0) edges.erase(it);
    }

    int add_tri(int a, int b, int c) {
        const int id = static_cast<int>(tris.size());
        tris.push_back({{a, b, c}, true});
        link(a, b, id);
        link(b, c, id);
        link(c, a, id);
        return id;
    }

    void remove_tri(int id) {
        Tri& t = tris[id];
        t.alive = false;
        unlink(t.v[0], t.v[1], id);
        unlink(t.v[1], t.v[2], id);
        unlink(t.v[2], t.v[0], id);
    }

    int third_vertex(int id, int u, int v) const {
        for (int x : tris[id].v)
            if (x != u && x != v) return x;
        throw ComputeError("degenerate triangle in adjacency walk");
    }

    // Both incident triangles of an interior edge, or nullopt for hull edges.
    std::optional<std::pair<int, int>> interior(int u, int v) const {
        auto it = edges.find(edge_key(u, v));
        if (it == edges.end()) return std::nullopt;
        if (it->second[0] < 0 || it->second[1] < 0) return std::nullopt;
        return std::make_pair(it->second[0], it->second[1]);
    }

    // Replaces diagonal (u,v) with (a,b) in the two incident triangles.
    // Returns the new diagonal endpoints, or nullopt if the flip would create
    // an inverted triangle.
    std::optional<std::array<int, 4>> flip(int u, int v) {
        const auto pair = interior(u, v);
        if (!pair) return std::nullopt;
        int t1 = pair->first;
        int t2 = pair->second;
        // Orient so t1 holds the directed edge u->v.
        const auto has_directed = [&](int id, int s, int e) {
            const auto& w = tris[id].v;
            return (w[0] == s && w[1] == e) || (w[1] == s && w[2] == e) ||
                   (w[2] == s && w[0] == e);
        };
        if (!has_directed(t1, u, v)) {
            std::swap(t1, t2);
            if (!has_directed(t1, u, v))
                throw ComputeError("inconsistent triangle orientation");
        }
        const int a = third_vertex(t1, u, v);
        const int b = third_vertex(t2, u, v);
        if (orient2d(pts[a], pts[u], pts[b]) <= 0.0) return std::nullopt;
        if (orient2d(pts[b], pts[v], pts[a]) <= 0.0) return std::nullopt;
        remove_tri(t1);
        remove_tri(t2);
        add_tri(a, u, b);
        add_tri(b, v, a);
        return std::array<int, 4>{u, a, v, b};
    }
};

}  // namespace

TriangleMesh delaunay(std::span<const Point2> points) {
    const int n = static_cast<int>(points.size());
    if (n < 3)
        throw ValidationError("triangulation needs at least 3 points, got " +
                              std::to_string(n));
    for (int i = 0; i < n; ++i)
        if (!std::isfinite(points[i].x) || !std::isfinite(points[i].y))
            throw ValidationError("point " + std::to_string(i) +
                                  " has a non-finite coordinate");

    std::vector<int> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        if (points[i].x != points[j].x) return points[i].x < points[j].x;
        if (points[i].y != points[j].y) return points[i].y < points[j].y;
        return i < j;
    });
    for (int i = 0; i + 1 < n; ++i) {
        if (points[order[i]] == points[order[i + 1]]) {
            const int lo = std::min(order[i], order[i + 1]);
            const int hi = std::max(order[i], order[i + 1]);
            throw ValidationError("points " + std::to_string(lo) + " and " +
                                  std::to_string(hi) + " are duplicates");
        }
    }

    // First point (in sweep order) that leaves the line through the leading
    // collinear run.
    int apex = -1;
    for (int i = 2; i < n; ++i) {
        if (orient2d(points[order[0]], points[order[1]], points[order[i]]) !=
            0.0) {
            apex = i;
            break;
        }
    }
    if (apex < 0)
        throw ValidationError("all " + std::to_string(n) +
                              " points are collinear");

    MeshBuilder mesh(points);

    // Seed: fan the off-line point against the collinear run, which the sweep
    // order has already sorted along its line.
    std::vector<int> hull;
    {
        const int pk = order[apex];
        const double side =
            orient2d(points[order[0]], points[order[1]], points[pk]);
        for (int i = 0; i + 1 < apex; ++i) {
            const int qa = order[i];
            const int qb = order[i + 1];
            if (side > 0.0)
                mesh.add_tri(qa, qb, pk);
            else
                mesh.add_tri(qb, qa, pk);
        }
        if (side > 0.0) {
            for (int i = 0; i < apex; ++i) hull.push_back(order[i]);
        } else {
            for (int i = apex - 1; i >= 0; --i) hull.push_back(order[i]);
        }
        hull.push_back(pk);
    }

    std::deque<std::pair<int, int>> pending;
    const auto enqueue = [&](int u, int v) { pending.emplace_back(u, v); };

    const auto legalize = [&]() {
        std::size_t guard = 0;
        const std::size_t limit =
            64 + 16 * static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
        while (!pending.empty()) {
            if (++guard > limit)
                throw ComputeError("triangulation flip sequence did not settle");
            const auto [u, v] = pending.front();
            pending.pop_front();
            const auto pair = mesh.interior(u, v);
            if (!pair) continue;
            const int b = mesh.third_vertex(pair->second, u, v);
            const Tri& t1 = mesh.tris[pair->first];
            const int inside = in_circle(points[t1.v[0]], points[t1.v[1]],
                                         points[t1.v[2]], points[b]);
            if (inside > 0) {
                const auto quad = mesh.flip(u, v);
                if (quad) {
                    enqueue((*quad)[0], (*quad)[1]);
                    enqueue((*quad)[1], (*quad)[2]);
                    enqueue((*quad)[2], (*quad)[3]);
                    enqueue((*quad)[3], (*quad)[0]);
                }
            }
        }
    };

    // Sweep the remaining points; each is outside the current hull, so it
    // fans against the strictly visible hull chain.
    for (int next = apex + 1; next < n; ++next) {
        const int p = order[next];
        const int m = static_cast<int>(hull.size());
        std::vector<bool> visible(m);
        for (int i = 0; i < m; ++i) {
            visible[i] = orient2d(points[hull[i]], points[hull[(i + 1) % m]],
                                  points[p]) < 0.0;
        }
        int start = -1;
        for (int i = 0; i < m; ++i) {
            if (visible[i] && !visible[(i + m - 1) % m]) {
                start = i;
                break;
            }
        }
        if (start < 0)
            throw ComputeError("sweep point sees no hull edge");
        int run = 0;
        while (run < m && visible[(start + run) % m]) ++run;

        for (int i = 0; i < run; ++i) {
            const int u = hull[(start + i) % m];
            const int v = hull[(start + i + 1) % m];
            mesh.add_tri(u, p, v);
            enqueue(u, v);
        }
        legalize();

        std::vector<int> next_hull;
        next_hull.reserve(m - run + 2);
        for (int i = 0; i <= m - run; ++i)
            next_hull.push_back(hull[(start + run + i) % m]);
        next_hull.push_back(p);
        hull = std::move(next_hull);
    }

    // Normalize cocircular ties: prefer the lexicographically smallest
    // (min,max) diagonal. Each flip replaces a diagonal with a strictly
    // smaller one, so the pass terminates.
    bool changed = true;
    std::size_t guard = 0;
    const std::size_t limit =
        64 + 16 * static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    while (changed) {
        changed = false;
        std::vector<std::pair<int, int>> interior_edges;
        for (const auto& [key, slot] : mesh.edges) {
            if (slot[0] < 0 || slot[1] < 0) continue;
            interior_edges.emplace_back(static_cast<int>(key >> 32),
                                        static_cast<int>(key & 0xffffffff));
        }
        std::sort(interior_edges.begin(), interior_edges.end());
        for (const auto& [u, v] : interior_edges) {
            const auto pair = mesh.interior(u, v);
            if (!pair) continue;
            const int a = mesh.third_vertex(pair->first, u, v);
            const int b = mesh.third_vertex(pair->second, u, v);
            const Tri& t1 = mesh.tris[pair->first];
            if (in_circle(points[t1.v[0]], points[t1.v[1]], points[t1.v[2]],
                          points[b]) != 0)
                continue;
            const auto alt = std::minmax(a, b);
            if (std::make_pair(alt.first, alt.second) >= std::make_pair(u, v))
                continue;
            if (mesh.flip(u, v)) {
                changed = true;
                if (++guard > limit)
                    throw ComputeError(
                        "cocircular tie normalization did not settle");
            }
        }
    }

    TriangleMesh out;
    out.vertices.assign(points.begin(), points.end());
    for (const Tri& t : mesh.tris) {
        if (!t.alive) continue;
        std::array<int, 3> v = t.v;
        // Smallest index first, keeping positive orientation.
        while (v[0] != std::min({v[0], v[1], v[2]}))
            v = {v[1], v[2], v[0]};
        if (orient2d(points[v[0]], points[v[1]], points[v[2]]) < 0.0)
            std::swap(v[1], v[2]);
        out.triangles.push_back(v);
    }
    std::sort(out.triangles.begin(), out.triangles.end());
    return out;
}

}  // namespace vamorph
