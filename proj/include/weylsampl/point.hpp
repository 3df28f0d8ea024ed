// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>

namespace weylsampl {

/// A point on a manifold model. Coordinates by kind:
///   Circle    c[0] = arclength in [0, L)
///   FlatTorus c[0..d-1], each in [0, L_i)
///   Sphere2   c = unit 3-vector
///   Mesh      vertex index (coordinates unused)
struct Point {
    std::array<double, 3> c{0.0, 0.0, 0.0};
    std::int32_t vertex = -1;

    static Point circle(double s) { return Point{{s, 0.0, 0.0}, -1}; }
    static Point torus1(double x) { return Point{{x, 0.0, 0.0}, -1}; }
    static Point torus2(double x, double y) { return Point{{x, y, 0.0}, -1}; }
    static Point torus3(double x, double y, double z) { return Point{{x, y, z}, -1}; }
    static Point sphere(double x, double y, double z) { return Point{{x, y, z}, -1}; }
    static Point mesh_vertex(std::int32_t v) { return Point{{0.0, 0.0, 0.0}, v}; }
};

} // namespace weylsampl
