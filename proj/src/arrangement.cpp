#include "arrangement.hpp"

#include "circnet/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace circnet::detail {

double circle_angle(double s, double count, std::size_t jitter_key)
{
    // Deterministic pseudo-random offset in (-0.12, 0.12) of a slot.
    const double j = 0.12 * std::sin(12.9898 * static_cast<double>(jitter_key) + 78.233);
    return std::numbers::pi / 2 - 2 * std::numbers::pi * (s + j) / count;
}

namespace {

bool strictly_between(std::size_t a, std::size_t b, std::size_t x)
{
    if (a > b) std::swap(a, b);
    return a < x && x < b;
}

} // namespace

Arrangement build_arrangement(const std::vector<double>& angles,
                              const std::vector<std::pair<std::size_t, std::size_t>>& chords)
{
    Arrangement ar;
    const std::size_t N = angles.size();
    if (N < 2) throw Error("arrangement needs at least two boundary points");
    ar.boundary_points = N;
    for (double a : angles) {
        ar.x.push_back(std::cos(a));
        ar.y.push_back(std::sin(a));
    }
    // Midpoint of each boundary arc, so that a chord between neighbouring
    // points never duplicates the arc.
    for (std::size_t k = 0; k < N; ++k) {
        double a0 = angles[k], a1 = angles[(k + 1) % N];
        while (a1 > a0) a1 -= 2 * std::numbers::pi; // clockwise means decreasing angle
        const double m = (a0 + a1) / 2;
        ar.x.push_back(std::cos(m));
        ar.y.push_back(std::sin(m));
    }

    std::vector<std::vector<std::pair<double, std::size_t>>> on_chord(chords.size());
    for (std::size_t c1 = 0; c1 < chords.size(); ++c1)
        for (std::size_t c2 = c1 + 1; c2 < chords.size(); ++c2) {
            auto [a, b] = chords[c1];
            auto [c, d] = chords[c2];
            if (a == c || a == d || b == c || b == d) continue;
            if (strictly_between(a, b, c) == strictly_between(a, b, d)) continue;
            const double x1 = ar.x[a], y1 = ar.y[a], x2 = ar.x[b], y2 = ar.y[b];
            const double x3 = ar.x[c], y3 = ar.y[c], x4 = ar.x[d], y4 = ar.y[d];
            const double den = (x1 - x2) * (y3 - y4) - (y1 - y2) * (x3 - x4);
            const double t = ((x1 - x3) * (y3 - y4) - (y1 - y3) * (x3 - x4)) / den;
            const double u = ((x1 - x3) * (y1 - y2) - (y1 - y3) * (x1 - x2)) / den;
            const std::size_t v = ar.x.size();
            ar.x.push_back(x1 + t * (x2 - x1));
            ar.y.push_back(y1 + t * (y2 - y1));
            ar.crossings.push_back({c1, c2, v});
            on_chord[c1].emplace_back(t, v);
            on_chord[c2].emplace_back(u, v);
        }

    const std::size_t V = ar.x.size();
    ar.nbrs.assign(V, {});
    auto link = [&](std::size_t u, std::size_t v) {
        ar.nbrs[u].push_back(v);
        ar.nbrs[v].push_back(u);
    };
    for (std::size_t k = 0; k < N; ++k) {
        link(k, N + k);
        link(N + k, (k + 1) % N);
    }
    for (std::size_t c = 0; c < chords.size(); ++c) {
        auto& pts = on_chord[c];
        std::sort(pts.begin(), pts.end());
        std::vector<std::size_t> path{chords[c].first};
        for (auto& [t, v] : pts) path.push_back(v);
        path.push_back(chords[c].second);
        for (std::size_t i = 0; i + 1 < path.size(); ++i) link(path[i], path[i + 1]);
        ar.chord_path.push_back(std::move(path));
    }
    for (std::size_t v = 0; v < V; ++v) {
        auto& nb = ar.nbrs[v];
        std::sort(nb.begin(), nb.end(), [&](std::size_t a, std::size_t b) {
            return std::atan2(ar.y[a] - ar.y[v], ar.x[a] - ar.x[v]) < std::atan2(ar.y[b] - ar.y[v], ar.x[b] - ar.x[v]);
        });
    }

    for (std::size_t v = 0; v < V; ++v)
        for (std::size_t w : ar.nbrs[v]) {
            if (ar.dart_face.count({v, w})) continue;
            const std::size_t f = ar.face_cycle.size();
            ar.face_cycle.emplace_back();
            std::size_t a = v, b = w;
            double area = 0;
            while (!ar.dart_face.count({a, b})) {
                ar.dart_face[{a, b}] = f;
                ar.face_cycle[f].push_back(a);
                area += ar.x[a] * ar.y[b] - ar.x[b] * ar.y[a];
                const auto& nb = ar.nbrs[b];
                const auto pos = static_cast<std::size_t>(std::find(nb.begin(), nb.end(), a) - nb.begin());
                const std::size_t c = nb[(pos + nb.size() - 1) % nb.size()];
                a = b;
                b = c;
            }
            ar.face_area.push_back(area / 2);
        }
    ar.outer_face = static_cast<std::size_t>(std::min_element(ar.face_area.begin(), ar.face_area.end()) -
                                             ar.face_area.begin());
    return ar;
}

} // namespace circnet::detail
