#pragma once

// Helpers shared across the unit-test binaries.

#include <filesystem>
#include <string>

#include "multiop/numerics.hpp"
#include "multiop/rng.hpp"

namespace multiop::test {

inline Matrix random_matrix(int rows, int cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.normal();
  return m;
}

inline Vector random_vector(int size, Rng& rng) {
  Vector v(size);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
  return v;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

/// Frobenius distance between the orthogonal projectors of two subspaces;
/// zero iff the bases span the same space.
inline double projector_distance(const Matrix& u, const Matrix& v) {
  return (u * u.transpose() - v * v.transpose()).norm();
}

inline double nuclear_norm(const Matrix& m) { return svd(m).singular_values.sum(); }

/// Fresh directory under the system temp root; removed on destruction.
class TempDir {
public:
  TempDir() {
    auto base = std::filesystem::temp_directory_path();
    for (int i = 0;; ++i) {
      auto candidate = base / ("multiop-test-" + std::to_string(::getpid()) + "-" +
                               std::to_string(counter_++) + "-" + std::to_string(i));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path_ = candidate;
        break;
      }
    }
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
  static inline int counter_ = 0;
  std::filesystem::path path_;
};

} // namespace multiop::test
