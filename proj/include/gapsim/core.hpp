#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace gapsim {

using cxd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

/// Raised on malformed inputs (bad dimensions, broken invariants, parse errors).
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a configured resource cap (dense dimension, enumeration size,
/// interaction-strength search) would be exceeded.
struct CapExceeded : std::runtime_error {
  explicit CapExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// Global numeric knobs. All tolerances that appear in contracts live here.
struct Tolerances {
  static constexpr double hermiticity = 1e-12;
  static constexpr double isometry = 1e-10;
  static constexpr double unitarity = 1e-10;
  static constexpr double degeneracy_rel = 1e-8;   // times max(1, |H|)
  static constexpr double opnorm_power_iter = 1e-10;
};

/// Default resource caps. dense_dim bounds the matrix dimension such that the
/// dense array stays within 2^24 entries. enumeration bounds diagonal scans.
struct Caps {
  std::size_t dense_dim = 4096;
  std::uint64_t enumeration = (1ull << 24);
  int delta_doublings = 40;
};

inline Mat dagger(const Mat& m) { return m.adjoint(); }

inline double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

inline bool is_hermitian(const Mat& m, double tol = Tolerances::hermiticity) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m - m.adjoint()) <= tol;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Spectral norm. Exact SVD/eigendecomposition below dimension 2048,
/// power iteration above (tol 1e-10, 10*dim iteration cap).
inline double opnorm(const Mat& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  const Eigen::Index dim = std::max(m.rows(), m.cols());
  if (dim <= 2048) {
    if (m.rows() == m.cols() && is_hermitian(m, 1e-10 * std::max(1.0, max_abs(m)))) {
      Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
      return es.eigenvalues().cwiseAbs().maxCoeff();
    }
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues()(0);
  }
  // power iteration on m^dag m with a fixed deterministic start
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> nd;
  Vec v(m.cols());
  for (Eigen::Index i = 0; i < m.cols(); ++i) v(i) = cxd(nd(rng), nd(rng));
  v.normalize();
  double s2 = 0.0;
  for (Eigen::Index it = 0; it < 10 * dim; ++it) {
    Vec w = m.adjoint() * (m * v);
    const double s2_new = w.norm();
    if (s2_new == 0.0) return 0.0;
    v = w / s2_new;
    if (std::abs(s2_new - s2) <= Tolerances::opnorm_power_iter * std::max(1.0, s2_new)) {
      s2 = s2_new;
      break;
    }
    s2 = s2_new;
  }
  return std::sqrt(s2);
}

/// Thin-matrix largest singular value (columns typically a projector basis).
inline double opnorm_thin(const Mat& m) {
  if (m.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

/// Random Hermitian matrix with entries of unit scale, then rescaled to unit
/// spectral norm. Used by property suites and perturbation experiments.
inline Mat random_hermitian(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Mat a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = cxd(nd(rng), nd(rng));
  Mat h = (a + a.adjoint()) / 2.0;
  const double nrm = opnorm(h);
  if (nrm > 0) h /= nrm;
  return h;
}

/// FNV-1a over a byte string; stable provenance hashing for reports.
inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Format a double with 12 significant digits (report/golden-file contract).
inline std::string fmt12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return std::string(buf);
}

}  // namespace gapsim
