#include "lbkan/param_io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "lbkan/errors.hpp"

namespace lbkan {

namespace {

bool is_binary(const std::filesystem::path& path) { return path.extension() == ".bin"; }

void put_u64_le(std::ostream& os, std::uint64_t v) {
  std::array<char, 8> bytes;
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(bytes.data(), bytes.size());
}

bool get_u64_le(std::istream& is, std::uint64_t& v) {
  std::array<unsigned char, 8> bytes;
  if (!is.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) return false;
  v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return true;
}

}  // namespace

void save_params_csv(const std::filesystem::path& path, const Eigen::VectorXd& theta) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  char buf[64];
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g\n", theta[i]);
    os << buf;
  }
  if (!os) throw IoError("failed writing " + path.string());
}

Eigen::VectorXd load_params_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    char* end = nullptr;
    const double v = std::strtod(line.c_str(), &end);
    if (end == line.c_str() || *end != '\0' || !std::isfinite(v)) {
      throw IoError(path.string() + ":" + std::to_string(line_no) +
                    ": not a number: '" + line + "'");
    }
    values.push_back(v);
  }
  if (values.empty()) throw IoError(path.string() + ": no values");
  return Eigen::Map<Eigen::VectorXd>(values.data(),
                                     static_cast<Eigen::Index>(values.size()));
}

void save_params_bin(const std::filesystem::path& path, const Eigen::VectorXd& theta) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  put_u64_le(os, static_cast<std::uint64_t>(theta.size()));
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    put_u64_le(os, std::bit_cast<std::uint64_t>(theta[i]));
  }
  if (!os) throw IoError("failed writing " + path.string());
}

Eigen::VectorXd load_params_bin(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  std::uint64_t count = 0;
  if (!get_u64_le(is, count)) throw IoError(path.string() + ": missing length header");
  const auto file_size = std::filesystem::file_size(path);
  if ((file_size - 8) % 8 != 0 || (file_size - 8) / 8 != count) {
    throw IoError(path.string() + ": header says " + std::to_string(count) +
                  " values but file holds " + std::to_string(file_size) + " bytes");
  }
  Eigen::VectorXd theta(static_cast<Eigen::Index>(count));
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    std::uint64_t bits = 0;
    if (!get_u64_le(is, bits)) throw IoError(path.string() + ": truncated");
    theta[i] = std::bit_cast<double>(bits);
  }
  return theta;
}

void save_params(const std::filesystem::path& path, const Eigen::VectorXd& theta) {
  if (is_binary(path)) {
    save_params_bin(path, theta);
  } else {
    save_params_csv(path, theta);
  }
}

Eigen::VectorXd load_params(const std::filesystem::path& path) {
  return is_binary(path) ? load_params_bin(path) : load_params_csv(path);
}

}  // namespace lbkan
