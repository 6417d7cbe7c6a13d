#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ppm/errors.hpp"
#include "ppm/mesh.hpp"

namespace ppm {

namespace {

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

// Returns the next line that carries tokens, with comments stripped.
bool next_data_line(std::istream& in, std::string& line, char comment_char) {
    while (std::getline(in, line)) {
        const auto cpos = line.find(comment_char);
        if (cpos != std::string::npos) line.erase(cpos);
        if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
    }
    return false;
}

TriangleMesh load_off(std::istream& in, const std::string& path) {
    std::string line;
    if (!next_data_line(in, line, '#')) throw ParseError(path + ": empty OFF file");
    std::istringstream header(line);
    std::string magic;
    header >> magic;
    long nv = -1, nf = -1, ne = 0;
    if (lowercase(magic) == "off") {
        // Counts may share the header line or follow on the next one.
        if (!(header >> nv >> nf >> ne)) {
            if (!next_data_line(in, line, '#')) throw ParseError(path + ": missing OFF counts");
            std::istringstream counts(line);
            if (!(counts >> nv >> nf >> ne)) throw ParseError(path + ": bad OFF counts");
        }
    } else {
        std::istringstream counts(line);
        if (!(counts >> nv >> nf >> ne)) throw ParseError(path + ": bad OFF counts");
    }
    if (nv < 0 || nf < 0) throw ParseError(path + ": negative OFF counts");

    std::vector<Eigen::Vector3d> positions(nv);
    for (long i = 0; i < nv; ++i) {
        if (!next_data_line(in, line, '#')) throw ParseError(path + ": truncated vertex list");
        std::istringstream vs(line);
        if (!(vs >> positions[i][0] >> positions[i][1] >> positions[i][2]))
            throw ParseError(path + ": bad vertex line");
    }
    std::vector<std::array<int, 3>> triangles(nf);
    for (long i = 0; i < nf; ++i) {
        if (!next_data_line(in, line, '#')) throw ParseError(path + ": truncated face list");
        std::istringstream fs(line);
        int cnt;
        if (!(fs >> cnt)) throw ParseError(path + ": bad face line");
        if (cnt != 3) throw ParseError(path + ": only triangle faces are supported");
        if (!(fs >> triangles[i][0] >> triangles[i][1] >> triangles[i][2]))
            throw ParseError(path + ": bad face indices");
    }
    return TriangleMesh::build(std::move(positions), std::move(triangles));
}

TriangleMesh load_ply(std::istream& in, const std::string& path) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("ply", 0) != 0)
        throw ParseError(path + ": missing ply magic");

    struct Element {
        std::string name;
        long count = 0;
        std::vector<std::string> properties;  // scalar property names, "" for lists
    };
    std::vector<Element> elements;
    bool ascii = false;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "format") {
            std::string fmt;
            ls >> fmt;
            ascii = (fmt == "ascii");
        } else if (tok == "element") {
            Element e;
            ls >> e.name >> e.count;
            elements.push_back(e);
        } else if (tok == "property") {
            if (elements.empty()) throw ParseError(path + ": property before element");
            std::string type;
            ls >> type;
            if (type == "list") {
                elements.back().properties.push_back("");
            } else {
                std::string name;
                ls >> name;
                elements.back().properties.push_back(name);
            }
        } else if (tok == "end_header") {
            break;
        } else if (tok == "comment" || tok == "obj_info" || tok.empty()) {
            continue;
        }
    }
    if (!ascii) throw ParseError(path + ": only ascii PLY is supported");

    std::vector<Eigen::Vector3d> positions;
    std::vector<std::array<int, 3>> triangles;
    for (const auto& elem : elements) {
        if (elem.name == "vertex") {
            int ix = -1, iy = -1, iz = -1;
            for (std::size_t p = 0; p < elem.properties.size(); ++p) {
                if (elem.properties[p] == "x") ix = static_cast<int>(p);
                if (elem.properties[p] == "y") iy = static_cast<int>(p);
                if (elem.properties[p] == "z") iz = static_cast<int>(p);
            }
            if (ix < 0 || iy < 0 || iz < 0) throw ParseError(path + ": vertex element lacks x/y/z");
            positions.resize(elem.count);
            for (long i = 0; i < elem.count; ++i) {
                if (!next_data_line(in, line, '\0')) throw ParseError(path + ": truncated vertices");
                std::istringstream vs(line);
                std::vector<double> vals(elem.properties.size());
                for (auto& v : vals)
                    if (!(vs >> v)) throw ParseError(path + ": bad vertex line");
                positions[i] = {vals[ix], vals[iy], vals[iz]};
            }
        } else if (elem.name == "face") {
            triangles.resize(elem.count);
            for (long i = 0; i < elem.count; ++i) {
                if (!next_data_line(in, line, '\0')) throw ParseError(path + ": truncated faces");
                std::istringstream fs(line);
                int cnt;
                if (!(fs >> cnt)) throw ParseError(path + ": bad face line");
                if (cnt != 3) throw ParseError(path + ": only triangle faces are supported");
                if (!(fs >> triangles[i][0] >> triangles[i][1] >> triangles[i][2]))
                    throw ParseError(path + ": bad face indices");
            }
        } else {
            // Skip unknown elements line by line.
            for (long i = 0; i < elem.count; ++i) {
                if (!next_data_line(in, line, '\0'))
                    throw ParseError(path + ": truncated element " + elem.name);
            }
        }
    }
    return TriangleMesh::build(std::move(positions), std::move(triangles));
}

}  // namespace

TriangleMesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open mesh file " + path);
    const auto dot = path.rfind('.');
    const std::string ext = dot == std::string::npos ? "" : lowercase(path.substr(dot + 1));
    if (ext == "off") return load_off(in, path);
    if (ext == "ply") return load_ply(in, path);
    throw ParseError(path + ": unsupported mesh format (need .off or .ply)");
}

void save_mesh_off(const TriangleMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "OFF\n" << mesh.num_vertices() << " " << mesh.num_faces() << " 0\n";
    char buf[128];
    for (const auto& p : mesh.positions) {
        std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g\n", p[0], p[1], p[2]);
        out << buf;
    }
    for (const auto& t : mesh.triangles) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
    if (!out) throw IoError("write failed for " + path);
}

void save_mesh_ply(const TriangleMesh& mesh, const std::string& path,
                   const std::vector<std::array<unsigned char, 3>>* colors) {
    if (colors && static_cast<int>(colors->size()) != mesh.num_vertices())
        throw LengthMismatch("colour array does not match vertex count");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "ply\nformat ascii 1.0\n";
    out << "element vertex " << mesh.num_vertices() << "\n";
    out << "property float x\nproperty float y\nproperty float z\n";
    if (colors) out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    out << "element face " << mesh.num_faces() << "\n";
    out << "property list uchar int vertex_indices\nend_header\n";
    char buf[160];
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const auto& p = mesh.positions[v];
        if (colors) {
            const auto& c = (*colors)[v];
            std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g %d %d %d\n", p[0], p[1], p[2],
                          static_cast<int>(c[0]), static_cast<int>(c[1]), static_cast<int>(c[2]));
        } else {
            std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g\n", p[0], p[1], p[2]);
        }
        out << buf;
    }
    for (const auto& t : mesh.triangles) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace ppm
