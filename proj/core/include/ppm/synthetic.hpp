#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>

#include "ppm/ilp.hpp"
#include "ppm/mesh.hpp"
#include "ppm/metrics.hpp"

namespace ppm {

struct Plane {
    Eigen::Vector3d point = Eigen::Vector3d::Zero();
    Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();

    double signed_distance(const Eigen::Vector3d& p) const { return normal.dot(p - point); }
};

struct RigidMotion {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation * p + translation; }
    static RigidMotion identity() { return {}; }
    static RigidMotion axis_angle(const Eigen::Vector3d& axis, double angle,
                                  const Eigen::Vector3d& translation);
};

struct SyntheticOptions {
    double feature_noise = 0.0;  // gaussian feature perturbation, fraction of bbox diagonal
    double prior_noise = 0.0;    // blend towards uniform priors, 0 = exact, 1 = uniform
    double min_keep = 0.10;      // admissible kept-face fraction per cut
    double max_keep = 0.90;
};

/// One synthetic benchmark pair with exact ground truth.
struct PairCase {
    std::string name = "pair";
    TriangleMesh mesh_x, mesh_y;
    Eigen::MatrixXd features_x, features_y;
    OverlapPrior prior;
    GroundTruth gt;
    std::uint64_t seed = 0;
    Plane plane_x, plane_y;
    RigidMotion motion;
    SyntheticOptions options;
};

/// Cuts the base mesh with two planes (faces kept on the positive side,
/// selected by centroid), rigidly moves the second part, and derives exact
/// ground truth from the shared kept vertices. Default features are the
/// base-mesh positions shifted to be strictly positive, so an identity
/// match has zero cost; priors default to the exact overlap indicators.
PairCase generate_synthetic_pair(const TriangleMesh& base, const Plane& cut_x,
                                 const Plane& cut_y, const RigidMotion& motion,
                                 std::uint64_t seed, const SyntheticOptions& options = {});

}  // namespace ppm
