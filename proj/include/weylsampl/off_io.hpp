// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace weylsampl {

struct OffMesh {
    std::vector<Eigen::Vector3d> vertices;
    std::vector<std::array<std::int32_t, 3>> triangles;
};

/// Parses an ASCII OFF file ("OFF" header, counts line, vertex lines, face
/// lines "3 i j k"). Throws ParseError with the offending line number.
OffMesh read_off(std::istream& in);
OffMesh read_off_file(const std::string& path);

void write_off(std::ostream& out, const OffMesh& mesh);
void write_off_file(const std::string& path, const OffMesh& mesh);

} // namespace weylsampl
