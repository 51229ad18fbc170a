#pragma once

#include "gapsim/verify.hpp"

#include <cmath>
#include <map>

namespace gapsim {

/// A built simulator Hamiltonian together with its encoding, an optional
/// known ancilla projector, and prediction notes for the sidecar output.
struct ConstructionOutput {
  Hamiltonian hamiltonian;
  Encoding encoding;
  std::optional<Mat> known_p_anc;
  std::map<std::string, double> predictions;
  std::string summary;
};

// --- Example Hamiltonians -----------------------------------------------------

/// Pairwise excitation penalty: one |11><11| projector per qubit pair.
/// Groundspace: the n+1 states with at most one excitation; gap 1, spread 0.
inline Hamiltonian build_ha(std::size_t n) {
  if (n < 2) throw ValidationError("build_ha: need n >= 2");
  Hamiltonian h{SiteSpace::qubits(n), {}};
  Mat p11 = Mat::Zero(4, 4);
  p11(3, 3) = 1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) h.add_term(LocalTerm({i, j}, p11));
  return h;
}

inline std::vector<std::uint64_t> ha_ground_labels(std::size_t n) {
  std::vector<std::uint64_t> labels{0};
  for (std::size_t i = 0; i < n; ++i) labels.push_back(1ull << (n - 1 - i));  // site i excited
  return labels;
}

inline Mat ha_ground_basis(std::size_t n) {
  const std::uint64_t dim = 1ull << n;
  const auto labels = ha_ground_labels(n);
  Mat basis = Mat::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(labels.size()));
  for (std::size_t k = 0; k < labels.size(); ++k)
    basis(static_cast<Eigen::Index>(labels[k]), static_cast<Eigen::Index>(k)) = 1.0;
  return basis;
}

/// Collective-spin Hamiltonian with the Dicke state as unique ground state:
/// sum over pairs of (ZZ - XX - YY)/4 plus the constant n(n+2)/8 - n/8.
inline Hamiltonian build_hb(std::size_t n) {
  if (n < 2 || n % 2 != 0) throw ValidationError("build_hb: need even n >= 2");
  Hamiltonian h{SiteSpace::qubits(n), {}};
  const Mat zz = kron(pauli_matrix('Z'), pauli_matrix('Z'));
  const Mat xx = kron(pauli_matrix('X'), pauli_matrix('X'));
  const Mat yy = kron(pauli_matrix('Y'), pauli_matrix('Y'));
  const Mat pair = 0.25 * (zz - xx - yy);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) h.add_term(LocalTerm({i, j}, pair));
  const double b_n = static_cast<double>(n) * (static_cast<double>(n) + 2.0) / 8.0;
  h.add_scalar(b_n - static_cast<double>(n) / 8.0);
  return h;
}

/// Symmetric equal superposition of all weight-n/2 strings.
inline Vec dicke_state(std::size_t n) {
  if (n < 2 || n % 2 != 0) throw ValidationError("dicke_state: need even n >= 2");
  const std::uint64_t dim = 1ull << n;
  Vec psi = Vec::Zero(static_cast<Eigen::Index>(dim));
  std::size_t count = 0;
  for (std::uint64_t x = 0; x < dim; ++x)
    if (static_cast<std::size_t>(__builtin_popcountll(x)) == n / 2) {
      psi(static_cast<Eigen::Index>(x)) = 1.0;
      ++count;
    }
  psi /= std::sqrt(static_cast<double>(count));
  return psi;
}

// --- Classical degree-reduction -----------------------------------------------

/// Degree-reduces a diagonal Hamiltonian with term costs in [0,1]: each site
/// becomes a cluster of one copy per incident term, copies tied by an equality
/// chain, constraints re-targeted to distinct copies. Trivial encoding with the
/// first copy of each cluster as the system site. Mismatch penalty gamma per
/// broken link, so everything outside the lifted spectrum sits at or above
/// gamma and the low spectrum reproduces the input exactly.
inline ConstructionOutput classical_degree_reduction(const Hamiltonian& h, double gamma) {
  if (!is_diagonal(h)) throw ValidationError("classical_degree_reduction: input must be diagonal");
  if (gamma <= 0) throw ValidationError("classical_degree_reduction: gamma must be positive");
  for (const auto& t : h.terms)
    for (Eigen::Index i = 0; i < t.matrix.rows(); ++i) {
      const double c = t.matrix(i, i).real();
      if (c < -1e-12 || c > 1.0 + 1e-12)
        throw ValidationError("classical_degree_reduction: term costs must lie in [0,1]");
    }

  const std::size_t n = h.space.n_sites();
  std::vector<std::size_t> incident(n, 0);
  for (const auto& t : h.terms)
    for (std::size_t s : t.support) ++incident[s];

  std::vector<std::size_t> cluster_size(n), offset(n);
  std::vector<int> sim_dims;
  for (std::size_t i = 0; i < n; ++i) {
    cluster_size[i] = std::max<std::size_t>(incident[i], 1);
    offset[i] = sim_dims.size();
    for (std::size_t c = 0; c < cluster_size[i]; ++c) sim_dims.push_back(h.space.dims[i]);
  }

  Hamiltonian out{SiteSpace(sim_dims), {}};
  std::vector<std::size_t> used(n, 0);  // next copy per site, in term order
  for (const auto& t : h.terms) {
    std::vector<std::size_t> sup;
    for (std::size_t s : t.support) sup.push_back(offset[s] + used[s]++);
    out.add_term(LocalTerm(sup, t.matrix));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const int d = h.space.dims[i];
    for (std::size_t c = 0; c + 1 < cluster_size[i]; ++c) {
      Mat eq = Mat::Zero(d * d, d * d);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
          const double diff = static_cast<double>(a - b);
          eq(a * d + b, a * d + b) = gamma * diff * diff;
        }
      out.add_term(LocalTerm({offset[i] + c, offset[i] + c + 1}, eq));
    }
  }

  ConstructionOutput result{std::move(out), Encoding::identity(SiteSpace(sim_dims)), std::nullopt, {}, {}};
  std::vector<std::size_t> sys_positions(n);
  for (std::size_t i = 0; i < n; ++i) sys_positions[i] = offset[i];
  result.encoding = Encoding::trivial(result.hamiltonian.space, sys_positions);
  result.predictions = {{"delta", 0.0}, {"w_tilde", 0.0}, {"gamma_tilde", gamma}, {"max_degree", 3.0}};
  result.summary = "classical degree-reduction by copy clusters and equality chains";
  return result;
}

/// Lifts a computational basis state of the input to the copy-cluster register
/// (all copies of a site take its digit).
inline std::uint64_t classical_dr_lift_label(const Hamiltonian& input, const ConstructionOutput& dr,
                                             std::uint64_t label) {
  const auto digits = input.space.digits_of(label);
  const auto& pos = dr.encoding.system_positions();  // offset of the first copy per site
  const std::size_t total = dr.hamiltonian.space.n_sites();
  std::vector<int> lifted(total, 0);
  for (std::size_t i = 0; i < digits.size(); ++i) {
    const std::size_t begin = pos[i];
    const std::size_t end = (i + 1 < digits.size()) ? pos[i + 1] : total;
    for (std::size_t c = begin; c < end; ++c) lifted[c] = digits[i];
  }
  return dr.hamiltonian.space.index_of(lifted);
}

// --- Tree diluter ---------------------------------------------------------------

struct TreeLayout {
  // internal node i has children child[i] = (left, right); ids < n are leaves,
  // ids >= n are ancilla sites n + internal index; root is the last internal node
  std::size_t n = 0;
  std::vector<std::pair<std::size_t, std::size_t>> children;
  std::size_t root() const { return n + children.size() - 1; }
};

namespace detail {

inline std::size_t tree_build(std::vector<std::size_t> leaves, TreeLayout& layout) {
  if (leaves.size() == 1) return leaves[0];
  std::size_t split = 1;
  while (split * 2 < leaves.size()) split *= 2;
  std::vector<std::size_t> left(leaves.begin(), leaves.begin() + static_cast<std::ptrdiff_t>(split));
  std::vector<std::size_t> right(leaves.begin() + static_cast<std::ptrdiff_t>(split), leaves.end());
  const std::size_t l = tree_build(std::move(left), layout);
  const std::size_t r = tree_build(std::move(right), layout);
  layout.children.emplace_back(l, r);
  return layout.n + layout.children.size() - 1;
}

}  // namespace detail

/// Left-heavy binary tree over n leaves: the left subtree takes the largest
/// power of two below n. Internal nodes are numbered children-first.
inline TreeLayout tree_layout(std::size_t n) {
  if (n < 2) throw ValidationError("tree_layout: need n >= 2");
  TreeLayout layout;
  layout.n = n;
  std::vector<std::size_t> leaves(n);
  std::iota(leaves.begin(), leaves.end(), 0);
  detail::tree_build(std::move(leaves), layout);
  return layout;
}

/// Excitation-counting diluter on a binary tree: one 3-local diagonal term per
/// internal node, zero cost exactly on (l,r,b) in {(0,0,0),(0,1,1),(1,0,1)}.
/// Groundspace: the n+1 configurations with at most one leaf excitation and
/// consistent internal labels. Metrics [2, n-1, 1], gap 1, spread 0.
inline ConstructionOutput tree_diluter(std::size_t n) {
  const TreeLayout layout = tree_layout(n);
  Hamiltonian h{SiteSpace::qubits(2 * n - 1), {}};
  Mat cost = Mat::Identity(8, 8);  // diagonal over (l, r, b)
  cost(0, 0) = 0.0;  // 0,0 -> 0
  cost(3, 3) = 0.0;  // 0,1 -> 1
  cost(5, 5) = 0.0;  // 1,0 -> 1
  for (std::size_t i = 0; i < layout.children.size(); ++i) {
    const auto [l, r] = layout.children[i];
    h.add_term(LocalTerm({l, r, layout.n + i}, cost));
  }
  std::vector<std::size_t> sys_positions(n);
  std::iota(sys_positions.begin(), sys_positions.end(), 0);
  ConstructionOutput out{std::move(h), Encoding::trivial(SiteSpace::qubits(2 * n - 1), sys_positions),
                         std::nullopt, {}, {}};
  const double blocks = 1.0 + std::ceil(static_cast<double>(n) / 2.0);
  out.predictions = {{"delta", 0.0},
                     {"gamma_tilde", 1.0},
                     {"w_tilde", 0.0},
                     {"degree_r", 2.0},
                     {"incoherence_lb", std::sqrt(1.0 - 1.0 / blocks)}};
  out.summary = "tree-graph excitation counter";
  return out;
}

/// The n+1 zero-energy basis labels of the tree diluter: all zeros, and for
/// each leaf the configuration with that leaf and its root path excited.
inline std::vector<std::uint64_t> tree_ground_labels(std::size_t n) {
  const TreeLayout layout = tree_layout(n);
  const SiteSpace space = SiteSpace::qubits(2 * n - 1);
  std::vector<std::size_t> parent(2 * n - 1, static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < layout.children.size(); ++i) {
    parent[layout.children[i].first] = layout.n + i;
    parent[layout.children[i].second] = layout.n + i;
  }
  std::vector<std::uint64_t> labels;
  labels.push_back(0);
  for (std::size_t leaf = 0; leaf < n; ++leaf) {
    std::vector<int> digits(2 * n - 1, 0);
    std::size_t v = leaf;
    while (v != static_cast<std::size_t>(-1)) {
      digits[v] = 1;
      v = parent[v];
    }
    labels.push_back(space.index_of(digits));
  }
  return labels;
}

// --- Star weak diluter -----------------------------------------------------------

struct StarLevel {
  std::size_t m = 0;            // excitation number
  std::uint64_t multiplicity = 0;
  double e_plus = 0.0;
  double e_minus = 0.0;
  double theta = 0.0;
};

/// Closed-form spectrum of the star construction: for each excitation number m,
/// E_m^+- = -Delta/2 - m +- sqrt(m^2 Delta + Delta^2/4), ancilla angle
/// tan(theta_m) = 2m/sqrt(Delta).
inline std::vector<StarLevel> star_spectrum(std::size_t n, double delta) {
  std::vector<StarLevel> table;
  for (std::size_t m = 0; m <= n; ++m) {
    StarLevel lvl;
    lvl.m = m;
    lvl.multiplicity = 1;
    for (std::size_t k = 0; k < m; ++k)
      lvl.multiplicity = lvl.multiplicity * (n - k) / (k + 1);
    const double md = static_cast<double>(m);
    const double root = std::sqrt(md * md * delta + delta * delta / 4.0);
    lvl.e_plus = -delta / 2.0 - md + root;
    lvl.e_minus = -delta / 2.0 - md - root;
    lvl.theta = std::atan2(2.0 * md, std::sqrt(delta));
    table.push_back(lvl);
  }
  return table;
}

/// Single-ancilla star coupling: -Delta |0><0|_anc - N_e + sqrt(Delta) N_e X_anc,
/// written as 2-local terms. The {E_0^+, E_1^+} band weakly simulates the
/// at-most-one-excitation groundspace with incoherence about sqrt(2/Delta).
inline ConstructionOutput star_weak_diluter(std::size_t n, double delta) {
  if (n < 2) throw ValidationError("star_weak_diluter: need n >= 2");
  const auto table = star_spectrum(n, delta);
  // band checks: {E_0^+, E_1^+} must be isolated by 1 above and below and
  // quasi-degenerate within 1
  const double band_min = std::min(table[0].e_plus, table[1].e_plus);
  const double band_max = std::max(table[0].e_plus, table[1].e_plus);
  double below = -std::numeric_limits<double>::infinity();
  for (const auto& lvl : table) below = std::max(below, lvl.e_minus);
  const bool isolated =
      table[2].e_plus - band_min >= 1.0 && band_min - below >= 1.0 && band_max - band_min < 1.0;
  if (!isolated) throw ValidationError("star_weak_diluter: delta too small for band isolation");

  Hamiltonian h{SiteSpace::qubits(n + 1), {}};
  Mat p0 = Mat::Zero(2, 2);
  p0(0, 0) = 1.0;
  Mat p1 = Mat::Zero(2, 2);
  p1(1, 1) = 1.0;
  h.add_term(LocalTerm({n}, -delta * p0));
  for (std::size_t i = 0; i < n; ++i) {
    h.add_term(LocalTerm({i}, -p1));
    h.add_term(LocalTerm({i, n}, std::sqrt(delta) * kron(p1, pauli_matrix('X'))));
  }
  std::vector<std::size_t> sys_positions(n);
  std::iota(sys_positions.begin(), sys_positions.end(), 0);
  ConstructionOutput out{std::move(h), Encoding::trivial(SiteSpace::qubits(n + 1), sys_positions),
                         std::nullopt, {}, {}};
  Mat anc = Mat::Zero(2, 1);
  anc(1, 0) = 1.0;  // |1> on the ancilla
  out.known_p_anc = anc;
  out.predictions = {{"eps_bound", std::sqrt(2.0 / delta)},
                     {"w_tilde", band_max - band_min},
                     {"gamma_tilde", std::min(table[2].e_plus - band_min, band_min - below)}};
  out.summary = "star-coupled weak diluter";
  return out;
}

// --- Vertex-cover corpus generator ------------------------------------------------

/// Diagonal Hamiltonian whose ground states are the indicator strings of
/// minimum vertex covers: 2 * (all-zero penalty per hyperedge) + excitation count.
inline Hamiltonian vertex_cover_hamiltonian(std::size_t n_vertices,
                                            const std::vector<std::vector<std::size_t>>& edges) {
  if (n_vertices == 0 || n_vertices > 20)
    throw ValidationError("vertex_cover_hamiltonian: vertex count out of range (1..20)");
  Hamiltonian h{SiteSpace::qubits(n_vertices), {}};
  Mat p1 = Mat::Zero(2, 2);
  p1(1, 1) = 1.0;
  for (std::size_t i = 0; i < n_vertices; ++i) h.add_term(LocalTerm({i}, p1));
  for (const auto& e : edges) {
    if (e.empty()) throw ValidationError("vertex_cover_hamiltonian: empty hyperedge");
    const std::uint64_t d = 1ull << e.size();
    Mat all_zero = Mat::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    all_zero(0, 0) = 2.0;
    h.add_term(LocalTerm(e, all_zero));
  }
  return h;
}

}  // namespace gapsim
