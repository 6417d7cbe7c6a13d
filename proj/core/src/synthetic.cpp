#include "ppm/synthetic.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <sstream>

#include "ppm/errors.hpp"
#include "ppm/rng.hpp"

namespace ppm {

RigidMotion RigidMotion::axis_angle(const Eigen::Vector3d& axis, double angle,
                                    const Eigen::Vector3d& translation) {
    RigidMotion m;
    m.rotation = Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
    m.translation = translation;
    return m;
}

namespace {

struct CutResult {
    TriangleMesh mesh;
    std::vector<int> vertex_origin;             // submesh vertex -> base vertex
    std::vector<int> base_to_sub;               // base vertex -> submesh vertex or -1
};

CutResult cut_mesh(const TriangleMesh& base, const Plane& plane, const SyntheticOptions& opts,
                   const char* which) {
    std::vector<int> kept_faces;
    for (int f = 0; f < base.num_faces(); ++f) {
        const auto& t = base.triangles[f];
        const Eigen::Vector3d centroid =
            (base.positions[t[0]] + base.positions[t[1]] + base.positions[t[2]]) / 3.0;
        if (plane.signed_distance(centroid) > 0.0) kept_faces.push_back(f);
    }
    const double fraction = static_cast<double>(kept_faces.size()) / base.num_faces();
    if (fraction < opts.min_keep || fraction > opts.max_keep) {
        std::ostringstream os;
        os << which << " cut keeps " << fraction * 100.0 << "% of faces (admissible "
           << opts.min_keep * 100.0 << "-" << opts.max_keep * 100.0 << "%)";
        throw DegenerateCut(os.str());
    }

    CutResult out;
    out.base_to_sub.assign(base.num_vertices(), -1);
    std::vector<std::array<int, 3>> triangles;
    std::vector<Eigen::Vector3d> positions;
    for (int f : kept_faces) {
        std::array<int, 3> tri;
        for (int c = 0; c < 3; ++c) {
            const int v = base.triangles[f][c];
            if (out.base_to_sub[v] < 0) {
                out.base_to_sub[v] = static_cast<int>(out.vertex_origin.size());
                out.vertex_origin.push_back(v);
                positions.push_back(base.positions[v]);
            }
            tri[c] = out.base_to_sub[v];
        }
        triangles.push_back(tri);
    }
    out.mesh = TriangleMesh::build(std::move(positions), std::move(triangles));
    return out;
}

}  // namespace

PairCase generate_synthetic_pair(const TriangleMesh& base, const Plane& cut_x, const Plane& cut_y,
                                 const RigidMotion& motion, std::uint64_t seed,
                                 const SyntheticOptions& options) {
    CutResult part_x = cut_mesh(base, cut_x, options, "source");
    CutResult part_y = cut_mesh(base, cut_y, options, "target");

    std::vector<int> gt_map(part_x.mesh.num_vertices(), -1);
    int shared = 0;
    for (int x = 0; x < part_x.mesh.num_vertices(); ++x) {
        const int y = part_y.base_to_sub[part_x.vertex_origin[x]];
        if (y >= 0) {
            gt_map[x] = y;
            ++shared;
        }
    }
    if (shared == 0) throw EmptyOverlap("cut regions share no vertices");

    PairCase pc;
    pc.seed = seed;
    pc.plane_x = cut_x;
    pc.plane_y = cut_y;
    pc.motion = motion;
    pc.options = options;
    pc.mesh_x = std::move(part_x.mesh);
    pc.mesh_y = std::move(part_y.mesh);
    for (auto& p : pc.mesh_y.positions) p = motion.apply(p);

    // Features come from the undeformed base positions, shifted so every
    // row is strictly positive (cosine distances need non-zero rows).
    Eigen::Vector3d lo = base.positions[0], hi = base.positions[0];
    for (const auto& p : base.positions) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const double diag = (hi - lo).norm();
    const Eigen::Vector3d shift = -lo + Eigen::Vector3d::Constant(0.1 * diag + 1e-9);

    Rng rng(seed);
    auto make_features = [&](const std::vector<int>& origin) {
        Eigen::MatrixXd feat(static_cast<Eigen::Index>(origin.size()), 3);
        for (std::size_t i = 0; i < origin.size(); ++i) {
            Eigen::Vector3d f = base.positions[origin[i]] + shift;
            for (int d = 0; d < 3; ++d)
                f[d] += options.feature_noise * diag * rng.normal();
            feat.row(static_cast<Eigen::Index>(i)) = f;
        }
        return feat;
    };
    pc.features_x = make_features(part_x.vertex_origin);
    pc.features_y = make_features(part_y.vertex_origin);

    pc.gt = GroundTruth::from_map(std::move(gt_map), pc.mesh_y.num_vertices(), diameter(base));

    auto make_prior = [&](const std::vector<std::uint8_t>& exact) {
        std::vector<double> p(exact.size());
        for (std::size_t i = 0; i < exact.size(); ++i) {
            const double u = rng.uniform();
            p[i] = (1.0 - options.prior_noise) * (exact[i] ? 1.0 : 0.0) +
                   options.prior_noise * u;
        }
        return p;
    };
    pc.prior.vertex_probs_x = make_prior(pc.gt.gt_overlap_x);
    pc.prior.vertex_probs_y = make_prior(pc.gt.gt_overlap_y);
    return pc;
}

}  // namespace ppm
