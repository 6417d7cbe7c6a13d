#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "ppm/ilp.hpp"
#include "ppm/metrics.hpp"
#include "ppm/synthetic.hpp"

namespace ppm {

/// Feature matrices: whitespace-separated text (one row per vertex) or raw
/// little-endian float32 with a two-int32 header (rows, cols). Picked by
/// extension: .txt / .bin.
Eigen::MatrixXd load_features(const std::string& path);
void save_features(const Eigen::MatrixXd& features, const std::string& path);

/// One probability per line, validated to [0, 1].
std::vector<double> load_prob_column(const std::string& path);
void save_prob_column(const std::vector<double>& values, const std::string& path);
OverlapPrior load_prior(const std::string& path_x, const std::string& path_y);

/// Ground truth: one line per source vertex, target index or -1.
std::vector<int> load_gt_map(const std::string& path, int num_x, int num_y);
void save_gt_map(const std::vector<int>& gt_map, const std::string& path);

/// CP2P-style indirection: both partial shapes map into a shared full
/// template; the composed source-to-target map takes, per source vertex,
/// the smallest target vertex with the same template image.
std::vector<int> compose_gt_via_template(const std::vector<int>& x_to_full,
                                         const std::vector<int>& y_to_full, int num_y);

// --- case directories ---------------------------------------------------

/// On-disk layout of one pair case (all paths relative to the directory):
/// mesh_x.off, mesh_y.off, features_x.txt, features_y.txt, prior_x.txt,
/// prior_y.txt, gt.txt, meta.json.
void save_pair_case(const PairCase& pc, const std::string& dir);
PairCase load_pair_case(const std::string& dir);

/// Manifest: JSON document listing case names and their directories
/// relative to the manifest location.
void write_manifest(const std::vector<std::string>& case_dirs, const std::string& path);
std::vector<std::string> read_manifest(const std::string& path);

}  // namespace ppm
