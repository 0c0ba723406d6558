#pragma once

#include <filesystem>

#include <Eigen/Dense>

namespace lbkan {

// Flat weight vectors on disk. Files ending in ".bin" hold an unsigned 64-bit
// little-endian count followed by that many little-endian IEEE doubles; any
// other extension is a single-column CSV (one value per line, 17 significant
// digits, no header). Errors throw IoError.
void save_params(const std::filesystem::path& path, const Eigen::VectorXd& theta);
Eigen::VectorXd load_params(const std::filesystem::path& path);

void save_params_csv(const std::filesystem::path& path, const Eigen::VectorXd& theta);
Eigen::VectorXd load_params_csv(const std::filesystem::path& path);
void save_params_bin(const std::filesystem::path& path, const Eigen::VectorXd& theta);
Eigen::VectorXd load_params_bin(const std::filesystem::path& path);

}  // namespace lbkan
