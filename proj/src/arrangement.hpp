#ifndef CIRCNET_ARRANGEMENT_HPP
#define CIRCNET_ARRANGEMENT_HPP

// Straight chords between points on the unit circle, cut into a planar
// straight-line graph. Internal to the library.

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

namespace circnet::detail {

struct Arrangement {
    struct Crossing {
        std::size_t chord_a, chord_b;
        std::size_t vertex;
    };

    std::size_t boundary_points = 0; // vertices 0..boundary_points-1, clockwise
    std::vector<double> x, y;
    std::vector<std::vector<std::size_t>> nbrs; // counterclockwise by angle
    std::vector<Crossing> crossings;
    std::vector<std::vector<std::size_t>> chord_path; // vertices along each chord

    // Faces are traced with the face on the left of each dart, so bounded
    // faces run counterclockwise.
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> dart_face;
    std::vector<std::vector<std::size_t>> face_cycle; // vertex sequence per face
    std::vector<double> face_area;
    std::size_t outer_face = 0;

    std::size_t face_of(std::size_t from, std::size_t to) const { return dart_face.at({from, to}); }
    // Bounded face next to the boundary arc from point k to point k+1 (clockwise).
    std::size_t arc_face(std::size_t k) const { return face_of(boundary_points + k, k); }
    bool is_crossing(std::size_t v) const { return v >= 2 * boundary_points; }
};

// `angles` are the positions of the boundary points (clockwise order, radians).
// Chords join boundary points by index.
Arrangement build_arrangement(const std::vector<double>& angles,
                              const std::vector<std::pair<std::size_t, std::size_t>>& chords);

// Angle for clockwise position s out of `count` equally spaced slots, starting at
// the top of the circle, nudged by a small deterministic offset for slot `jitter_key`
// so that no three chords meet in a point.
double circle_angle(double s, double count, std::size_t jitter_key);

} // namespace circnet::detail

#endif
