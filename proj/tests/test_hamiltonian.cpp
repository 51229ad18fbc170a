#include "gapsim/hamiltonian.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace gapsim;

namespace {

Hamiltonian random_hamiltonian(std::size_t n, std::size_t n_terms, std::mt19937_64& rng) {
  Hamiltonian h{SiteSpace::qubits(n), {}};
  std::uniform_int_distribution<std::size_t> site(0, n - 1);
  std::uniform_int_distribution<int> loc(1, 2);
  for (std::size_t t = 0; t < n_terms; ++t) {
    std::set<std::size_t> sup;
    const int k = loc(rng);
    while (sup.size() < static_cast<std::size_t>(k)) sup.insert(site(rng));
    std::vector<std::size_t> support(sup.begin(), sup.end());
    const Eigen::Index d = static_cast<Eigen::Index>(1) << support.size();
    h.add_term(LocalTerm(support, random_hermitian(d, rng)));
  }
  return h;
}

}  // namespace

TEST_CASE("pauli builder produces the expected dense operators") {
  SECTION("single ZZ term") {
    const Hamiltonian h = from_pauli_terms(2, {{1.0, "ZZ"}});
    REQUIRE(h.terms.size() == 1);
    REQUIRE(h.terms[0].support == std::vector<std::size_t>{0, 1});
    const Mat m = assemble_dense(h);
    Mat expected = Mat::Zero(4, 4);
    expected.diagonal() << 1, -1, -1, 1;
    REQUIRE(max_abs(m - expected) < 1e-12);
  }
  SECTION("projector identity from four Pauli words") {
    const Hamiltonian h =
        from_pauli_terms(2, {{0.25, "ZZ"}, {-0.25, "ZI"}, {-0.25, "IZ"}, {0.25, "II"}});
    const Mat m = assemble_dense(h);
    Mat expected = Mat::Zero(4, 4);
    expected(3, 3) = 1.0;  // |11><11|
    REQUIRE(max_abs(m - expected) < 1e-12);
  }
  SECTION("rejects bad strings") {
    REQUIRE_THROWS_AS(from_pauli_terms(2, {{1.0, ""}}), ValidationError);
    REQUIRE_THROWS_AS(from_pauli_terms(2, {{1.0, "Z"}}), ValidationError);
    REQUIRE_THROWS_AS(from_pauli_terms(2, {{1.0, "ZQ"}}), ValidationError);
  }
}

TEST_CASE("dense assembly") {
  SECTION("empty term list gives the zero operator") {
    const Hamiltonian h{SiteSpace::qubits(2), {}};
    REQUIRE(max_abs(assemble_dense(h)) == 0.0);
  }
  SECTION("dimension cap is enforced") {
    Caps caps;
    caps.dense_dim = 8;
    const Hamiltonian h{SiteSpace::qubits(4), {}};
    REQUIRE_THROWS_AS(assemble_dense(h, caps), CapExceeded);
  }
  SECTION("random term lists assemble to Hermitian operators") {
    std::mt19937_64 rng(42);
    for (int rep = 0; rep < 25; ++rep) {
      std::uniform_int_distribution<std::size_t> nd(2, 6);
      const auto h = random_hamiltonian(nd(rng), 4, rng);
      const Mat m = assemble_dense(h);
      REQUIRE(max_abs(m - m.adjoint()) <= 1e-12 * std::max(1.0, max_abs(m)));
    }
  }
  SECTION("non-Hermitian term is rejected") {
    Hamiltonian h{SiteSpace::qubits(1), {}};
    Mat bad(2, 2);
    bad << 0, 1, 0, 0;
    REQUIRE_THROWS_AS(h.add_term(LocalTerm({0}, bad)), ValidationError);
  }
}

TEST_CASE("metrics") {
  SECTION("single-term Hamiltonian") {
    Hamiltonian h{SiteSpace::qubits(3), {}};
    REQUIRE_THROWS_AS(h.add_term(LocalTerm({0, 2}, pauli_matrix('Z'))), ValidationError);
    h.add_term(LocalTerm({0, 2}, kron(pauli_matrix('Z'), pauli_matrix('Z'))));
    const auto m = metrics(h);
    REQUIRE(m.locality_k == 2);
    REQUIRE(m.degree_r == 1);
    REQUIRE(m.term_count_M == 1);
    REQUIRE(m.strength_J == Catch::Approx(1.0));
  }
  SECTION("metrics are invariant under site relabeling") {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 10; ++rep) {
      const std::size_t n = 5;
      auto h = random_hamiltonian(n, 6, rng);
      std::vector<std::size_t> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      Hamiltonian relabeled{h.space, {}};
      for (const auto& t : h.terms) {
        std::vector<std::size_t> sup;
        for (std::size_t s : t.support) sup.push_back(perm[s]);
        relabeled.add_term(LocalTerm(sup, t.matrix));
      }
      const auto a = metrics(h);
      const auto b = metrics(relabeled);
      REQUIRE(a.locality_k == b.locality_k);
      REQUIRE(a.degree_r == b.degree_r);
      REQUIRE(a.term_count_M == b.term_count_M);
      REQUIRE(a.strength_J == Catch::Approx(b.strength_J));
    }
  }
  SECTION("duplicate supports count as separate terms") {
    Hamiltonian h{SiteSpace::qubits(2), {}};
    h.add_term(LocalTerm({0, 1}, kron(pauli_matrix('Z'), pauli_matrix('Z'))));
    h.add_term(LocalTerm({0, 1}, kron(pauli_matrix('X'), pauli_matrix('X'))));
    REQUIRE(metrics(h).term_count_M == 2);
    REQUIRE(metrics(h).degree_r == 2);
  }
}

TEST_CASE("interaction graph distances") {
  SECTION("chain of 2-local terms") {
    Hamiltonian h{SiteSpace::qubits(4), {}};
    const Mat zz = kron(pauli_matrix('Z'), pauli_matrix('Z'));
    h.add_term(LocalTerm({0, 1}, zz));
    h.add_term(LocalTerm({1, 2}, zz));
    h.add_term(LocalTerm({2, 3}, zz));
    const auto g = interaction_graph(h);
    REQUIRE(graph_distance(g, 0, 3) == 3);
    REQUIRE(graph_distance(g, 0, 0) == 0);
    REQUIRE(graph_distance(g, 1, 3) == 2);
  }
  SECTION("disconnected components have infinite distance") {
    Hamiltonian h{SiteSpace::qubits(4), {}};
    const Mat zz = kron(pauli_matrix('Z'), pauli_matrix('Z'));
    h.add_term(LocalTerm({0, 1}, zz));
    h.add_term(LocalTerm({2, 3}, zz));
    const auto g = interaction_graph(h);
    REQUIRE_FALSE(graph_distance(g, 0, 3).has_value());
    REQUIRE(graph_distance(g, 2, 3) == 1);
  }
}

TEST_CASE("diagonal fast path") {
  SECTION("diagonal detection") {
    Hamiltonian h{SiteSpace::qubits(2), {}};
    h.add_term(LocalTerm({0, 1}, kron(pauli_matrix('Z'), pauli_matrix('Z'))));
    REQUIRE(is_diagonal(h));
    h.add_term(LocalTerm({0}, pauli_matrix('X')));
    REQUIRE_FALSE(is_diagonal(h));
    REQUIRE_THROWS_AS(diagonal_energy(h, std::vector<int>{0, 0}), ValidationError);
  }
  SECTION("diagonal energies agree with the dense diagonal") {
    std::mt19937_64 rng(11);
    for (std::size_t n = 2; n <= 10; n += 2) {
      Hamiltonian h{SiteSpace::qubits(n), {}};
      std::uniform_int_distribution<std::size_t> site(0, n - 1);
      std::uniform_real_distribution<double> coeff(-1, 1);
      for (int t = 0; t < 5; ++t) {
        std::set<std::size_t> sup{site(rng), site(rng)};
        std::vector<std::size_t> support(sup.begin(), sup.end());
        const Eigen::Index d = static_cast<Eigen::Index>(1) << support.size();
        Mat m = Mat::Zero(d, d);
        for (Eigen::Index i = 0; i < d; ++i) m(i, i) = coeff(rng);
        h.add_term(LocalTerm(support, m));
      }
      const Mat dense = assemble_dense(h);
      for (std::uint64_t idx = 0; idx < h.space.total_dim(); ++idx) {
        REQUIRE(diagonal_energy(h, idx) ==
                Catch::Approx(dense(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(idx)).real())
                    .margin(1e-12));
      }
    }
  }
}

TEST_CASE("mixed site dimensions") {
  SiteSpace space({2, 3, 2});
  REQUIRE(space.total_dim() == 12);
  REQUIRE(space.digits_of(space.index_of({1, 2, 0})) == std::vector<int>{1, 2, 0});
  Hamiltonian h{space, {}};
  Mat m = Mat::Zero(3, 3);
  m(2, 2) = 1.0;
  h.add_term(LocalTerm({1}, m));
  const Mat dense = assemble_dense(h);
  REQUIRE(dense.rows() == 12);
  REQUIRE(dense.trace().real() == Catch::Approx(4.0));  // |2><2| on the qutrit spans 4 states
}
