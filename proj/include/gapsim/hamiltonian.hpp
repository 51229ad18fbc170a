#pragma once

#include "gapsim/core.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <string>

namespace gapsim {

/// Register of qudit sites with per-site dimensions (2 = qubit, 3 = qutrit).
/// Site 0 is the most significant digit of a basis index.
struct SiteSpace {
  std::vector<int> dims;

  SiteSpace() = default;
  explicit SiteSpace(std::vector<int> d) : dims(std::move(d)) {
    for (int x : dims)
      if (x < 2) throw ValidationError("SiteSpace: every site dimension must be >= 2");
  }
  static SiteSpace qubits(std::size_t n) { return SiteSpace(std::vector<int>(n, 2)); }

  std::size_t n_sites() const { return dims.size(); }

  std::uint64_t total_dim() const {
    std::uint64_t t = 1;
    for (int d : dims) {
      if (t > (1ull << 62) / static_cast<std::uint64_t>(d))
        throw CapExceeded("SiteSpace: total dimension overflows");
      t *= static_cast<std::uint64_t>(d);
    }
    return t;
  }

  /// Stride of each site in the flattened index (site 0 most significant).
  std::vector<std::uint64_t> strides() const {
    std::vector<std::uint64_t> s(dims.size(), 1);
    for (std::size_t i = dims.size(); i-- > 1;)
      s[i - 1] = s[i] * static_cast<std::uint64_t>(dims[i]);
    return s;
  }

  std::vector<int> digits_of(std::uint64_t index) const {
    std::vector<int> out(dims.size());
    for (std::size_t i = dims.size(); i-- > 0;) {
      out[i] = static_cast<int>(index % static_cast<std::uint64_t>(dims[i]));
      index /= static_cast<std::uint64_t>(dims[i]);
    }
    return out;
  }

  std::uint64_t index_of(const std::vector<int>& digits) const {
    if (digits.size() != dims.size()) throw ValidationError("index_of: digit count mismatch");
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      if (digits[i] < 0 || digits[i] >= dims[i]) throw ValidationError("index_of: digit out of range");
      idx = idx * static_cast<std::uint64_t>(dims[i]) + static_cast<std::uint64_t>(digits[i]);
    }
    return idx;
  }

  bool operator==(const SiteSpace& o) const { return dims == o.dims; }
};

/// One Hermitian term acting on an ordered list of distinct sites. The matrix
/// is row-major in the tensor order of the support list; empty support means
/// a scalar (identity-supported) term with a 1x1 matrix.
struct LocalTerm {
  std::vector<std::size_t> support;
  Mat matrix;

  LocalTerm() = default;
  LocalTerm(std::vector<std::size_t> sup, Mat m) : support(std::move(sup)), matrix(std::move(m)) {}
};

inline std::uint64_t term_dim(const SiteSpace& space, const LocalTerm& t) {
  std::uint64_t d = 1;
  for (std::size_t s : t.support) {
    if (s >= space.n_sites()) throw ValidationError("LocalTerm: support site out of range");
    d *= static_cast<std::uint64_t>(space.dims[s]);
  }
  return d;
}

inline void check_term(const SiteSpace& space, const LocalTerm& t) {
  std::set<std::size_t> uniq(t.support.begin(), t.support.end());
  if (uniq.size() != t.support.size()) throw ValidationError("LocalTerm: repeated site in support");
  const std::uint64_t d = term_dim(space, t);
  if (static_cast<std::uint64_t>(t.matrix.rows()) != d || static_cast<std::uint64_t>(t.matrix.cols()) != d)
    throw ValidationError("LocalTerm: matrix dimension does not match support");
  const double scale = std::max(1.0, max_abs(t.matrix));
  if (max_abs(t.matrix - t.matrix.adjoint()) > Tolerances::hermiticity * scale)
    throw ValidationError("LocalTerm: matrix not Hermitian within tolerance");
}

/// Sum of Hermitian local terms on a qudit register.
struct Hamiltonian {
  SiteSpace space;
  std::vector<LocalTerm> terms;

  Hamiltonian() = default;
  Hamiltonian(SiteSpace s, std::vector<LocalTerm> t) : space(std::move(s)), terms(std::move(t)) {
    for (const auto& term : terms) check_term(space, term);
  }

  void add_term(LocalTerm t) {
    check_term(space, t);
    terms.push_back(std::move(t));
  }

  void add_scalar(double c) { add_term(LocalTerm({}, Mat::Constant(1, 1, cxd(c, 0)))); }
};

/// Resource metrics tracked per Hamiltonian: locality k, degree r
/// (terms per site), term count M, and max term spectral norm J.
struct HamMetrics {
  std::size_t locality_k = 0;
  std::size_t degree_r = 0;
  std::size_t term_count_M = 0;
  double strength_J = 0.0;
};

inline HamMetrics metrics(const Hamiltonian& h) {
  HamMetrics m;
  m.term_count_M = h.terms.size();
  std::vector<std::size_t> per_site(h.space.n_sites(), 0);
  for (const auto& t : h.terms) {
    m.locality_k = std::max(m.locality_k, t.support.size());
    for (std::size_t s : t.support) ++per_site[s];
    m.strength_J = std::max(m.strength_J, opnorm(t.matrix));
  }
  for (std::size_t c : per_site) m.degree_r = std::max(m.degree_r, c);
  return m;
}

// --- Pauli sugar (qubit registers only) ---------------------------------

inline Mat pauli_matrix(char p) {
  Mat m(2, 2);
  switch (p) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cxd(0, -1), cxd(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw ValidationError(std::string("unknown Pauli letter '") + p + "'");
  }
  return m;
}

struct PauliTerm {
  double coeff = 0.0;
  std::string word;
};

/// Builds a qubit Hamiltonian from weighted Pauli strings. Only the
/// non-identity factors of each string enter the term's support; an
/// all-identity string becomes a scalar term.
inline Hamiltonian from_pauli_terms(std::size_t n, const std::vector<PauliTerm>& pauli_terms) {
  if (n < 1) throw ValidationError("from_pauli_terms: need at least one site");
  Hamiltonian h{SiteSpace::qubits(n), {}};
  for (const auto& pt : pauli_terms) {
    if (pt.word.empty() || pt.word.size() != n)
      throw ValidationError("from_pauli_terms: Pauli string length must equal site count");
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < n; ++i)
      if (pt.word[i] != 'I') support.push_back(i);
    if (support.empty()) {
      h.add_scalar(pt.coeff);
      continue;
    }
    Mat m = Mat::Identity(1, 1);
    for (std::size_t s : support) m = kron(m, pauli_matrix(pt.word[s]));
    h.add_term(LocalTerm(support, pt.coeff * m));
  }
  return h;
}

// --- Dense assembly -------------------------------------------------------

/// Embeds a local term into the full register and accumulates it into `into`.
inline void accumulate_term(const SiteSpace& space, const LocalTerm& t, Mat& into) {
  const std::uint64_t dim = space.total_dim();
  if (t.support.empty()) {
    into += t.matrix(0, 0) * Mat::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    return;
  }
  const auto strides = space.strides();
  const std::uint64_t local_dim = term_dim(space, t);
  // enumerate the complement of the support once
  std::vector<std::size_t> rest;
  for (std::size_t s = 0; s < space.n_sites(); ++s)
    if (std::find(t.support.begin(), t.support.end(), s) == t.support.end()) rest.push_back(s);
  std::uint64_t rest_dim = 1;
  for (std::size_t s : rest) rest_dim *= static_cast<std::uint64_t>(space.dims[s]);

  auto compose = [&](std::uint64_t rest_idx, std::uint64_t local_idx) {
    std::uint64_t idx = 0;
    for (std::size_t k = rest.size(); k-- > 0;) {
      const std::size_t s = rest[k];
      idx += (rest_idx % static_cast<std::uint64_t>(space.dims[s])) * strides[s];
      rest_idx /= static_cast<std::uint64_t>(space.dims[s]);
    }
    for (std::size_t k = t.support.size(); k-- > 0;) {
      const std::size_t s = t.support[k];
      idx += (local_idx % static_cast<std::uint64_t>(space.dims[s])) * strides[s];
      local_idx /= static_cast<std::uint64_t>(space.dims[s]);
    }
    return idx;
  };

  for (std::uint64_t r = 0; r < rest_dim; ++r) {
    for (std::uint64_t a = 0; a < local_dim; ++a) {
      const std::uint64_t row = compose(r, a);
      for (std::uint64_t b = 0; b < local_dim; ++b) {
        const cxd v = t.matrix(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        if (v != cxd(0, 0)) into(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(compose(r, b))) += v;
      }
    }
  }
}

inline Mat assemble_dense(const Hamiltonian& h, const Caps& caps = {}) {
  const std::uint64_t dim = h.space.total_dim();
  if (dim > caps.dense_dim)
    throw CapExceeded("assemble_dense: dimension " + std::to_string(dim) + " exceeds cap " +
                      std::to_string(caps.dense_dim));
  Mat out = Mat::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const auto& t : h.terms) accumulate_term(h.space, t, out);
  return out;
}

// --- Diagonal fast path ---------------------------------------------------

inline bool term_is_diagonal(const LocalTerm& t) {
  for (Eigen::Index i = 0; i < t.matrix.rows(); ++i)
    for (Eigen::Index j = 0; j < t.matrix.cols(); ++j)
      if (i != j && std::abs(t.matrix(i, j)) > Tolerances::hermiticity) return false;
  return true;
}

inline bool is_diagonal(const Hamiltonian& h) {
  return std::all_of(h.terms.begin(), h.terms.end(), term_is_diagonal);
}

/// Energy of a computational basis state of a diagonal Hamiltonian, evaluated
/// term by term on the restricted digits.
inline double diagonal_energy(const Hamiltonian& h, const std::vector<int>& digits) {
  if (digits.size() != h.space.n_sites()) throw ValidationError("diagonal_energy: digit count mismatch");
  double e = 0.0;
  for (const auto& t : h.terms) {
    if (!term_is_diagonal(t)) throw ValidationError("diagonal_energy: Hamiltonian is not diagonal");
    std::uint64_t local = 0;
    for (std::size_t s : t.support)
      local = local * static_cast<std::uint64_t>(h.space.dims[s]) + static_cast<std::uint64_t>(digits[s]);
    e += t.matrix(static_cast<Eigen::Index>(local), static_cast<Eigen::Index>(local)).real();
  }
  return e;
}

inline double diagonal_energy(const Hamiltonian& h, std::uint64_t basis_index) {
  return diagonal_energy(h, h.space.digits_of(basis_index));
}

// --- Interaction graph ----------------------------------------------------

/// Simple graph over sites where each term support induces a clique.
struct InteractionGraph {
  std::size_t n = 0;
  std::vector<std::vector<std::size_t>> hyperedges;
  std::vector<std::vector<std::size_t>> adjacency;
};

inline InteractionGraph interaction_graph(const Hamiltonian& h) {
  InteractionGraph g;
  g.n = h.space.n_sites();
  g.adjacency.resize(g.n);
  std::vector<std::set<std::size_t>> adj(g.n);
  for (const auto& t : h.terms) {
    if (t.support.empty()) continue;
    g.hyperedges.push_back(t.support);
    for (std::size_t a : t.support)
      for (std::size_t b : t.support)
        if (a != b) adj[a].insert(b);
  }
  for (std::size_t v = 0; v < g.n; ++v) g.adjacency[v].assign(adj[v].begin(), adj[v].end());
  return g;
}

/// BFS distance on the clique-expanded graph; nullopt across components.
inline std::optional<std::size_t> graph_distance(const InteractionGraph& g, std::size_t x, std::size_t y) {
  if (x >= g.n || y >= g.n) throw ValidationError("graph_distance: site out of range");
  if (x == y) return 0;
  std::vector<std::size_t> dist(g.n, static_cast<std::size_t>(-1));
  std::queue<std::size_t> q;
  dist[x] = 0;
  q.push(x);
  while (!q.empty()) {
    const std::size_t v = q.front();
    q.pop();
    for (std::size_t w : g.adjacency[v]) {
      if (dist[w] != static_cast<std::size_t>(-1)) continue;
      dist[w] = dist[v] + 1;
      if (w == y) return dist[w];
      q.push(w);
    }
  }
  return std::nullopt;
}

}  // namespace gapsim
