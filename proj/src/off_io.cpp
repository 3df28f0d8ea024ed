// SPDX-License-Identifier: Apache-2.0
#include "weylsampl/off_io.hpp"

#include <fstream>
#include <sstream>

#include "weylsampl/errors.hpp"

namespace weylsampl {

namespace {

// Reads the next content line, skipping blanks and '#' comments.
bool next_line(std::istream& in, std::string& line, int& lineno) {
    while (std::getline(in, line)) {
        ++lineno;
        auto pos = line.find('#');
        if (pos != std::string::npos) line.erase(pos);
        bool blank = true;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) {
                blank = false;
                break;
            }
        if (!blank) return true;
    }
    return false;
}

} // namespace

OffMesh read_off(std::istream& in) {
    int lineno = 0;
    std::string line;
    if (!next_line(in, line, lineno)) throw ParseError("OFF: empty file", lineno);
    {
        std::istringstream ls(line);
        std::string magic;
        ls >> magic;
        if (magic != "OFF") throw ParseError("OFF: missing 'OFF' header", lineno);
    }
    if (!next_line(in, line, lineno)) throw ParseError("OFF: missing counts line", lineno);
    long nv = -1, nf = -1, ne = 0;
    {
        std::istringstream ls(line);
        if (!(ls >> nv >> nf >> ne) || nv < 0 || nf < 0)
            throw ParseError("OFF: bad counts line", lineno);
    }
    OffMesh mesh;
    mesh.vertices.reserve(static_cast<std::size_t>(nv));
    for (long i = 0; i < nv; ++i) {
        if (!next_line(in, line, lineno))
            throw ParseError("OFF: unexpected end of file in vertex list", lineno);
        std::istringstream ls(line);
        double x, y, z;
        if (!(ls >> x >> y >> z)) throw ParseError("OFF: bad vertex line", lineno);
        mesh.vertices.emplace_back(x, y, z);
    }
    mesh.triangles.reserve(static_cast<std::size_t>(nf));
    for (long i = 0; i < nf; ++i) {
        if (!next_line(in, line, lineno))
            throw ParseError("OFF: unexpected end of file in face list", lineno);
        std::istringstream ls(line);
        long k, a, b, c;
        if (!(ls >> k >> a >> b >> c) || k != 3)
            throw ParseError("OFF: expected triangle face '3 i j k'", lineno);
        if (a < 0 || b < 0 || c < 0 || a >= nv || b >= nv || c >= nv)
            throw ParseError("OFF: face references invalid vertex", lineno);
        mesh.triangles.push_back({static_cast<std::int32_t>(a), static_cast<std::int32_t>(b),
                                  static_cast<std::int32_t>(c)});
    }
    return mesh;
}

OffMesh read_off_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open mesh file: " + path);
    return read_off(in);
}

void write_off(std::ostream& out, const OffMesh& mesh) {
    out << "OFF\n" << mesh.vertices.size() << " " << mesh.triangles.size() << " 0\n";
    out.precision(17);
    for (const auto& v : mesh.vertices) out << v[0] << " " << v[1] << " " << v[2] << "\n";
    for (const auto& t : mesh.triangles) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
}

void write_off_file(const std::string& path, const OffMesh& mesh) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot open output file: " + path);
    write_off(out, mesh);
}

} // namespace weylsampl
