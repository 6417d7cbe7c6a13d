#include "ppm/io.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ppm/errors.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace ppm {

namespace {

bool has_extension(const std::string& path, const char* ext) {
    const auto dot = path.rfind('.');
    if (dot == std::string::npos) return false;
    std::string e = path.substr(dot + 1);
    std::transform(e.begin(), e.end(), e.begin(), ::tolower);
    return e == ext;
}

Eigen::MatrixXd load_features_txt(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open feature file " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::vector<double> row;
        double v;
        while (ls >> v) row.push_back(v);
        if (row.empty()) continue;
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError(path + ": ragged feature rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(path + ": empty feature file");
    Eigen::MatrixXd m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
    return m;
}

Eigen::MatrixXd load_features_bin(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open feature file " + path);
    std::int32_t rows = 0, cols = 0;
    in.read(reinterpret_cast<char*>(&rows), 4);
    in.read(reinterpret_cast<char*>(&cols), 4);
    if (!in || rows <= 0 || cols <= 0) throw ParseError(path + ": bad binary feature header");
    std::vector<float> data(static_cast<std::size_t>(rows) * cols);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * 4));
    if (!in) throw ParseError(path + ": truncated binary feature file");
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = data[static_cast<std::size_t>(r) * cols + c];
    return m;
}

}  // namespace

Eigen::MatrixXd load_features(const std::string& path) {
    if (has_extension(path, "bin")) return load_features_bin(path);
    if (has_extension(path, "txt")) return load_features_txt(path);
    throw ParseError(path + ": unsupported feature format (need .txt or .bin)");
}

void save_features(const Eigen::MatrixXd& features, const std::string& path) {
    if (has_extension(path, "bin")) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write " + path);
        const std::int32_t rows = static_cast<std::int32_t>(features.rows());
        const std::int32_t cols = static_cast<std::int32_t>(features.cols());
        out.write(reinterpret_cast<const char*>(&rows), 4);
        out.write(reinterpret_cast<const char*>(&cols), 4);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) {
                const float v = static_cast<float>(features(r, c));
                out.write(reinterpret_cast<const char*>(&v), 4);
            }
        if (!out) throw IoError("write failed for " + path);
        return;
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    char buf[48];
    for (Eigen::Index r = 0; r < features.rows(); ++r) {
        for (Eigen::Index c = 0; c < features.cols(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.9g", features(r, c));
            out << (c ? " " : "") << buf;
        }
        out << "\n";
    }
    if (!out) throw IoError("write failed for " + path);
}

std::vector<double> load_prob_column(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open prior file " + path);
    std::vector<double> values;
    double v;
    while (in >> v) {
        if (!(v >= 0.0 && v <= 1.0)) {
            std::ostringstream os;
            os << path << ": probability " << v << " outside [0,1]";
            throw RangeError(os.str());
        }
        values.push_back(v);
    }
    return values;
}

void save_prob_column(const std::vector<double>& values, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    char buf[48];
    for (double v : values) {
        std::snprintf(buf, sizeof(buf), "%.9g\n", v);
        out << buf;
    }
    if (!out) throw IoError("write failed for " + path);
}

OverlapPrior load_prior(const std::string& path_x, const std::string& path_y) {
    return {load_prob_column(path_x), load_prob_column(path_y)};
}

std::vector<int> load_gt_map(const std::string& path, int num_x, int num_y) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open ground-truth file " + path);
    std::vector<int> map;
    int v;
    while (in >> v) {
        if (v < -1 || v >= num_y) {
            std::ostringstream os;
            os << path << ": target index " << v << " outside [-1, " << num_y << ")";
            throw IndexOutOfRange(os.str());
        }
        map.push_back(v);
    }
    if (static_cast<int>(map.size()) != num_x)
        throw LengthMismatch(path + ": ground-truth line count");
    return map;
}

void save_gt_map(const std::vector<int>& gt_map, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    for (int v : gt_map) out << v << "\n";
    if (!out) throw IoError("write failed for " + path);
}

std::vector<int> compose_gt_via_template(const std::vector<int>& x_to_full,
                                         const std::vector<int>& y_to_full, int num_y) {
    if (static_cast<int>(y_to_full.size()) != num_y)
        throw LengthMismatch("template map length != target vertex count");
    std::size_t full_size = 0;
    for (int f : x_to_full) full_size = std::max(full_size, static_cast<std::size_t>(f + 1));
    for (int f : y_to_full) full_size = std::max(full_size, static_cast<std::size_t>(f + 1));
    std::vector<int> full_to_y(full_size, -1);
    for (int y = num_y - 1; y >= 0; --y)
        if (y_to_full[y] >= 0) full_to_y[y_to_full[y]] = y;
    std::vector<int> gt(x_to_full.size(), -1);
    for (std::size_t x = 0; x < x_to_full.size(); ++x)
        if (x_to_full[x] >= 0) gt[x] = full_to_y[x_to_full[x]];
    return gt;
}

void save_pair_case(const PairCase& pc, const std::string& dir) {
    fs::create_directories(dir);
    const fs::path base(dir);
    save_mesh_off(pc.mesh_x, (base / "mesh_x.off").string());
    save_mesh_off(pc.mesh_y, (base / "mesh_y.off").string());
    save_features(pc.features_x, (base / "features_x.txt").string());
    save_features(pc.features_y, (base / "features_y.txt").string());
    save_prob_column(pc.prior.vertex_probs_x, (base / "prior_x.txt").string());
    save_prob_column(pc.prior.vertex_probs_y, (base / "prior_y.txt").string());
    save_gt_map(pc.gt.gt_map, (base / "gt.txt").string());

    json meta;
    meta["name"] = pc.name;
    meta["seed"] = pc.seed;
    meta["full_diameter"] = pc.gt.full_diameter;
    meta["plane_x"] = {pc.plane_x.point[0],  pc.plane_x.point[1],  pc.plane_x.point[2],
                       pc.plane_x.normal[0], pc.plane_x.normal[1], pc.plane_x.normal[2]};
    meta["plane_y"] = {pc.plane_y.point[0],  pc.plane_y.point[1],  pc.plane_y.point[2],
                       pc.plane_y.normal[0], pc.plane_y.normal[1], pc.plane_y.normal[2]};
    json rot = json::array();
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) rot.push_back(pc.motion.rotation(r, c));
    meta["rotation"] = rot;
    meta["translation"] = {pc.motion.translation[0], pc.motion.translation[1],
                           pc.motion.translation[2]};
    meta["feature_noise"] = pc.options.feature_noise;
    meta["prior_noise"] = pc.options.prior_noise;
    meta["vertices_x"] = pc.mesh_x.num_vertices();
    meta["vertices_y"] = pc.mesh_y.num_vertices();
    meta["faces_x"] = pc.mesh_x.num_faces();
    meta["faces_y"] = pc.mesh_y.num_faces();
    std::ofstream out(base / "meta.json");
    if (!out) throw IoError("cannot write meta.json in " + dir);
    out << meta.dump(2) << "\n";
}

PairCase load_pair_case(const std::string& dir) {
    const fs::path base(dir);
    PairCase pc;
    pc.mesh_x = load_mesh((base / "mesh_x.off").string());
    pc.mesh_y = load_mesh((base / "mesh_y.off").string());
    pc.features_x = load_features((base / "features_x.txt").string());
    pc.features_y = load_features((base / "features_y.txt").string());
    pc.prior = load_prior((base / "prior_x.txt").string(), (base / "prior_y.txt").string());
    if (static_cast<int>(pc.prior.vertex_probs_x.size()) != pc.mesh_x.num_vertices() ||
        static_cast<int>(pc.prior.vertex_probs_y.size()) != pc.mesh_y.num_vertices())
        throw LengthMismatch(dir + ": prior sizes do not match the meshes");

    std::ifstream meta_in(base / "meta.json");
    if (!meta_in) throw IoError("cannot open meta.json in " + dir);
    json meta = json::parse(meta_in);
    pc.name = meta.value("name", std::string("pair"));
    pc.seed = meta.value("seed", 0ULL);
    const double full_diameter = meta.at("full_diameter").get<double>();
    pc.options.feature_noise = meta.value("feature_noise", 0.0);
    pc.options.prior_noise = meta.value("prior_noise", 0.0);

    const auto gt_map = load_gt_map((base / "gt.txt").string(), pc.mesh_x.num_vertices(),
                                    pc.mesh_y.num_vertices());
    pc.gt = GroundTruth::from_map(gt_map, pc.mesh_y.num_vertices(), full_diameter);
    return pc;
}

void write_manifest(const std::vector<std::string>& case_dirs, const std::string& path) {
    json doc;
    doc["cases"] = json::array();
    for (const auto& dir : case_dirs) {
        json entry;
        entry["path"] = dir;
        doc["cases"].push_back(entry);
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot write manifest " + path);
    out << doc.dump(2) << "\n";
}

std::vector<std::string> read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path);
    json doc = json::parse(in);
    std::vector<std::string> dirs;
    for (const auto& entry : doc.at("cases")) dirs.push_back(entry.at("path").get<std::string>());
    return dirs;
}

}  // namespace ppm
