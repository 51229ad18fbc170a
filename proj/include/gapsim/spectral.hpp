#pragma once

#include "gapsim/hamiltonian.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <variant>

namespace gapsim {

/// Full Hermitian eigendecomposition, eigenvalues ascending, eigenvector
/// phases fixed so the largest-magnitude entry is real positive.
struct Spectrum {
  RVec eigenvalues;
  Mat eigenvectors;
};

namespace detail {

inline void fix_phases(Mat& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      const double a = std::abs(vectors(i, j));
      if (a > best + 1e-12) {
        best = a;
        imax = i;
      }
    }
    const cxd v = vectors(imax, j);
    if (std::abs(v) > 0) vectors.col(j) *= std::conj(v) / std::abs(v);
  }
}

// Above this entry scale, double-precision tridiagonalization noise
// (~eps * |H|) starts to matter against O(1) gap tolerances, so the solve is
// done in 80-bit extended precision and cast back.
constexpr double kLongDoubleThreshold = 1e8;

inline Spectrum eig_hermitian(const Mat& m) {
  Spectrum s;
  if (max_abs(m) > kLongDoubleThreshold) {
    using MatL = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;
    Eigen::SelfAdjointEigenSolver<MatL> es(m.cast<std::complex<long double>>());
    if (es.info() != Eigen::Success) throw std::runtime_error("eig: solver failed");
    s.eigenvalues = es.eigenvalues().cast<double>();
    s.eigenvectors = es.eigenvectors().cast<cxd>();
  } else {
    Eigen::SelfAdjointEigenSolver<Mat> es(m);
    if (es.info() != Eigen::Success) throw std::runtime_error("eig: solver failed");
    s.eigenvalues = es.eigenvalues();
    s.eigenvectors = es.eigenvectors();
  }
  fix_phases(s.eigenvectors);
  return s;
}

}  // namespace detail

inline Spectrum eig_dense(const Mat& m) {
  const double scale = std::max(1.0, max_abs(m));
  if (!is_hermitian(m, 1e-9 * scale)) throw ValidationError("eig_dense: matrix not Hermitian");
  return detail::eig_hermitian((m + m.adjoint()) / 2.0);
}

inline Spectrum eig_dense(const Hamiltonian& h, const Caps& caps = {}) {
  return eig_dense(assemble_dense(h, caps));
}

/// Low-energy eigenspace data: orthonormal basis, ground energy, quasi-spectral
/// gap gamma and energy spread w with all member eigenvalues in
/// [E_g, E_g + w*gamma] and every non-member eigenvalue >= E_g + gamma.
struct QuasiGroundspace {
  Mat basis;
  double E_g = 0.0;
  double gamma = 0.0;
  double w = 0.0;
  std::size_t rank_q = 0;
};

/// Cut selector: either an explicit rank q, or a spread threshold w_max.
struct RankCut {
  std::size_t q;
};
struct SpreadCut {
  double w_max;
};
using GroundCut = std::variant<RankCut, SpreadCut>;

inline QuasiGroundspace ground_data(const Spectrum& s, const GroundCut& cut) {
  const Eigen::Index dim = s.eigenvalues.size();
  if (dim < 2) throw ValidationError("ground_data: need dimension >= 2");
  const double e0 = s.eigenvalues(0);
  const double scale = std::max({1.0, std::abs(e0), std::abs(s.eigenvalues(dim - 1))});
  const double tau_deg = Tolerances::degeneracy_rel * scale;

  auto make = [&](std::size_t q) {
    QuasiGroundspace g;
    g.rank_q = q;
    g.E_g = e0;
    g.gamma = s.eigenvalues(static_cast<Eigen::Index>(q)) - e0;
    const double band = s.eigenvalues(static_cast<Eigen::Index>(q - 1)) - e0;
    g.w = (q == 1 || band <= 0) ? 0.0 : band / g.gamma;
    g.basis = s.eigenvectors.leftCols(static_cast<Eigen::Index>(q));
    return g;
  };

  if (std::holds_alternative<RankCut>(cut)) {
    const std::size_t q = std::get<RankCut>(cut).q;
    if (q == 0 || q >= static_cast<std::size_t>(dim))
      throw ValidationError("ground_data: rank cut out of range");
    QuasiGroundspace g = make(q);
    if (g.gamma <= 0 || g.w >= 1.0)
      throw ValidationError("ground_data: no valid quasi-groundspace at requested rank (w >= 1)");
    return g;
  }

  const double w_max = std::get<SpreadCut>(cut).w_max;
  if (w_max < 0 || w_max >= 1) throw ValidationError("ground_data: w_max must lie in [0,1)");
  if (w_max == 0.0) {
    // exact degenerate groundspace under the degeneracy tolerance
    std::size_t q = 1;
    while (q < static_cast<std::size_t>(dim) && s.eigenvalues(static_cast<Eigen::Index>(q)) - e0 <= tau_deg) ++q;
    if (q == static_cast<std::size_t>(dim))
      throw ValidationError("ground_data: spectrum fully degenerate, no gap");
    QuasiGroundspace g = make(q);
    g.w = 0.0;
    return g;
  }
  // among valid cuts pick the one maximizing gamma*(1-w), i.e. the largest
  // spectral gap at the cut; ties resolved toward the smallest rank
  std::optional<std::size_t> best;
  double best_score = -1.0;
  for (std::size_t q = 1; q < static_cast<std::size_t>(dim); ++q) {
    const double gamma = s.eigenvalues(static_cast<Eigen::Index>(q)) - e0;
    if (gamma <= tau_deg) continue;
    const double w = (s.eigenvalues(static_cast<Eigen::Index>(q - 1)) - e0) / gamma;
    if (w > w_max) continue;
    const double score = gamma * (1.0 - w);
    if (score > best_score + 1e-15 * std::max(1.0, best_score)) {
      best_score = score;
      best = q;
    }
  }
  if (!best) throw ValidationError("ground_data: no cut satisfies the spread threshold");
  return make(*best);
}

inline QuasiGroundspace ground_data(const Hamiltonian& h, const GroundCut& cut, const Caps& caps = {}) {
  return ground_data(eig_dense(h, caps), cut);
}

// --- Projector utilities ---------------------------------------------------

inline void check_orthonormal(const Mat& basis, double tol = Tolerances::isometry) {
  const Mat gram = basis.adjoint() * basis;
  if (max_abs(gram - Mat::Identity(basis.cols(), basis.cols())) > tol)
    throw ValidationError("projector basis is not orthonormal");
}

inline Mat projector_from_basis(const Mat& basis) {
  check_orthonormal(basis);
  return basis * basis.adjoint();
}

/// Spectral norm of the difference of two orthogonal projectors given as
/// orthonormal bases on the same ambient space.
inline double projector_distance(const Mat& basis1, const Mat& basis2) {
  if (basis1.rows() != basis2.rows()) throw ValidationError("projector_distance: ambient dimension mismatch");
  return opnorm(projector_from_basis(basis1) - projector_from_basis(basis2));
}

/// sqrt(2) d / sqrt(1 - d^2): norm bound on a projector difference given the
/// worst per-vector deviation d measured inside the larger projector.
inline double projector_difference_bound(double d) {
  if (d >= 1.0) throw ValidationError("projector_difference_bound: deviation must be < 1");
  return std::sqrt(2.0) * d / std::sqrt(1.0 - d * d);
}

struct ProjectorDifferenceReport {
  double max_per_vector_dev = 0.0;
  double norm = 0.0;
  double bound = 0.0;
  bool norm_bound_ok = false;
};

/// Measures d = max_{phi in B} |(B-A) phi| and verifies |B-A| <= bound(d).
/// Requires rank(A) <= rank(B).
inline ProjectorDifferenceReport projector_difference_check(const Mat& basis_a, const Mat& basis_b) {
  if (basis_a.cols() > basis_b.cols())
    throw ValidationError("projector_difference_check: rank(A) must be <= rank(B)");
  ProjectorDifferenceReport rep;
  const Mat pa = projector_from_basis(basis_a);
  const Mat pb = projector_from_basis(basis_b);
  rep.max_per_vector_dev = opnorm_thin((pb - pa) * basis_b);
  rep.norm = opnorm(pb - pa);
  if (rep.max_per_vector_dev < 1.0) {
    rep.bound = projector_difference_bound(rep.max_per_vector_dev);
    rep.norm_bound_ok = rep.norm <= rep.bound + 1e-9;
  } else {
    rep.bound = std::numeric_limits<double>::infinity();
    rep.norm_bound_ok = true;
  }
  return rep;
}

// --- Perturbed groundspace -------------------------------------------------

struct PerturbationReport {
  double gamma_new = 0.0;
  double spread_new = 0.0;       // w' * gamma'
  double proj_err = 0.0;         // |P' - P|
  double kappa = 0.0;
  bool certified = false;        // preconditions w <= 1/2, kappa <= (1-w)gamma/8 held
  bool gamma_ok = false;         // gamma' >= gamma - 2 kappa
  bool spread_ok = false;        // w' gamma' <= w gamma + 2 kappa
  bool proj_ok = false;          // |P' - P| < 32 kappa / gamma
  bool bound_ok = false;
};

/// Compares the same-rank quasi-groundspace of a perturbed Hamiltonian against
/// the unperturbed one and checks the 32 kappa / gamma projector bound.
inline PerturbationReport perturbation_check(const Mat& h, const Mat& h_perturbed,
                                             const QuasiGroundspace& quasi, double kappa) {
  if (h.rows() != h_perturbed.rows()) throw ValidationError("perturbation_check: dimension mismatch");
  PerturbationReport rep;
  rep.kappa = kappa;
  rep.certified = quasi.w <= 0.5 && kappa <= (1.0 - quasi.w) * quasi.gamma / 8.0 + 1e-15;

  const Spectrum sp = eig_dense(h_perturbed);
  const Eigen::Index q = static_cast<Eigen::Index>(quasi.rank_q);
  const double e0 = sp.eigenvalues(0);
  rep.gamma_new = sp.eigenvalues(q) - e0;
  rep.spread_new = sp.eigenvalues(q - 1) - e0;
  rep.proj_err = projector_distance(sp.eigenvectors.leftCols(q), quasi.basis);

  rep.gamma_ok = rep.gamma_new >= quasi.gamma - 2.0 * kappa - 1e-10;
  rep.spread_ok = rep.spread_new <= quasi.w * quasi.gamma + 2.0 * kappa + 1e-10;
  rep.proj_ok = rep.proj_err < 32.0 * kappa / quasi.gamma;
  rep.bound_ok = rep.certified && rep.gamma_ok && rep.spread_ok && rep.proj_ok;
  return rep;
}

// --- Diagonal spectra -------------------------------------------------------

/// Eigenvalues of a diagonal Hamiltonian with computational basis labels,
/// ascending by energy (ties by label). Enumerates all basis states.
struct DiagSpectrum {
  std::vector<double> eigenvalues;
  std::vector<std::uint64_t> labels;
};

inline DiagSpectrum diag_spectrum(const Hamiltonian& h, const Caps& caps = {}) {
  if (!is_diagonal(h)) throw ValidationError("diag_spectrum: Hamiltonian is not diagonal");
  const std::uint64_t dim = h.space.total_dim();
  if (dim > caps.enumeration)
    throw CapExceeded("diag_spectrum: enumeration of " + std::to_string(dim) + " states exceeds cap");
  std::vector<std::pair<double, std::uint64_t>> ev(dim);
  std::vector<int> digits(h.space.n_sites(), 0);
  for (std::uint64_t idx = 0; idx < dim; ++idx) {
    ev[idx] = {diagonal_energy(h, digits), idx};
    // odometer increment, least significant site last
    for (std::size_t i = h.space.n_sites(); i-- > 0;) {
      if (++digits[i] < h.space.dims[i]) break;
      digits[i] = 0;
    }
  }
  std::sort(ev.begin(), ev.end());
  DiagSpectrum out;
  out.eigenvalues.reserve(dim);
  out.labels.reserve(dim);
  for (const auto& [e, l] : ev) {
    out.eigenvalues.push_back(e);
    out.labels.push_back(l);
  }
  return out;
}

/// Lowest q+1 (energy, label) pairs of a diagonal Hamiltonian via a streaming
/// selection, avoiding the full sort for large registers.
inline std::vector<std::pair<double, std::uint64_t>> diag_lowest(const Hamiltonian& h, std::size_t count,
                                                                 const Caps& caps = {}) {
  if (!is_diagonal(h)) throw ValidationError("diag_lowest: Hamiltonian is not diagonal");
  const std::uint64_t dim = h.space.total_dim();
  if (dim > caps.enumeration) throw CapExceeded("diag_lowest: enumeration exceeds cap");
  if (count > dim) count = dim;
  std::vector<std::pair<double, std::uint64_t>> heap;  // max-heap of the current lowest
  heap.reserve(count + 1);
  std::vector<int> digits(h.space.n_sites(), 0);
  for (std::uint64_t idx = 0; idx < dim; ++idx) {
    const double e = diagonal_energy(h, digits);
    if (heap.size() < count) {
      heap.emplace_back(e, idx);
      std::push_heap(heap.begin(), heap.end());
    } else if (std::make_pair(e, idx) < heap.front()) {
      std::pop_heap(heap.begin(), heap.end());
      heap.back() = {e, idx};
      std::push_heap(heap.begin(), heap.end());
    }
    for (std::size_t i = h.space.n_sites(); i-- > 0;) {
      if (++digits[i] < h.space.dims[i]) break;
      digits[i] = 0;
    }
  }
  std::sort(heap.begin(), heap.end());
  return heap;
}

// --- Projection lemma instance check ----------------------------------------

struct ProjectionLemmaReport {
  double lambda1_sum = 0.0;       // lambda_1(H0 + H1)
  double lambda1_restricted = 0.0;  // lambda_1(H1 restricted to null(H0))
  double slack = 0.0;             // implied 1/K from the measured gap of H0
  bool ok = false;
};

/// Checks lambda_1(H1|_S) - 1/K <= lambda_1(H0+H1) <= lambda_1(H1|_S) with S
/// the given null-space basis of H0 and K implied by the measured gap of H0
/// on the orthocomplement.
inline ProjectionLemmaReport projection_lemma_check(const Mat& h0, const Mat& h1, const Mat& null_basis) {
  ProjectionLemmaReport rep;
  Spectrum total = eig_dense(h0 + h1);
  rep.lambda1_sum = total.eigenvalues(0);
  const Mat h1_restricted = null_basis.adjoint() * h1 * null_basis;
  rep.lambda1_restricted = eig_dense(h1_restricted).eigenvalues(0);
  // measured spectral gap of H0 away from S
  const Mat p = projector_from_basis(null_basis);
  const Mat q = Mat::Identity(p.rows(), p.cols()) - p;
  const Mat h0_perp = q * h0 * q + opnorm(h0) * p;  // lift S out of the way
  const double j = eig_dense(h0_perp).eigenvalues(0);
  const double h1n = opnorm(h1);
  if (j > 2.0 * h1n) {
    rep.slack = h1n * h1n / (j - 2.0 * h1n);
    rep.ok = rep.lambda1_sum <= rep.lambda1_restricted + 1e-9 &&
             rep.lambda1_sum >= rep.lambda1_restricted - rep.slack - 1e-9;
  }
  return rep;
}

}  // namespace gapsim
