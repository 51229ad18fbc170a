#pragma once

#include "gapsim/encoding.hpp"

#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace gapsim {

struct Thresholds {
  double eps_max = 0.1;
  double delta_max = 0.1;
  double w_max = 0.5;
};

/// delta = |Ptilde - V (P (x) 1_anc) V^dag Ptilde|, exact via SVD.
inline double unfaithfulness(const Mat& p_basis, const Mat& ptilde_basis, const Encoding& enc,
                             const Caps& caps = {}) {
  if (static_cast<std::uint64_t>(p_basis.rows()) != enc.system_dim())
    throw ValidationError("unfaithfulness: P lives on the wrong space");
  if (static_cast<std::uint64_t>(ptilde_basis.rows()) != enc.simulator_dim())
    throw ValidationError("unfaithfulness: Ptilde lives on the wrong space");
  check_orthonormal(p_basis);
  check_orthonormal(ptilde_basis);
  const Mat enc_basis = enc.encode_subspace(p_basis, caps);  // orthonormal, q * anc_dim columns
  const Mat residual = ptilde_basis - enc_basis * (enc_basis.adjoint() * ptilde_basis);
  return opnorm_thin(residual);
}

/// epsilon = |Ptilde - V (P (x) P_anc) V^dag|, exact.
inline double incoherence(const Mat& p_basis, const Mat& ptilde_basis, const Encoding& enc,
                          const Mat& p_anc_basis, const Caps& caps = {}) {
  if (static_cast<std::uint64_t>(p_anc_basis.rows()) != enc.ancilla_dim())
    throw ValidationError("incoherence: P_anc lives on the wrong space");
  check_orthonormal(p_anc_basis);
  check_orthonormal(ptilde_basis);
  const Mat enc_basis = enc.encode_subspace_with_ancilla(p_basis, p_anc_basis, caps);
  return opnorm(ptilde_basis * ptilde_basis.adjoint() - enc_basis * enc_basis.adjoint());
}

/// Lemma-style incoherence bound from unfaithfulness for unique-groundstate
/// targets: sqrt(2) delta / sqrt(1 - delta^2). Caller attests rank(P) = 1.
inline double coherence_from_faithfulness(double delta) {
  if (delta >= 1.0) throw ValidationError("coherence_from_faithfulness: delta must be < 1");
  return std::sqrt(2.0) * delta / std::sqrt(1.0 - delta * delta);
}

/// Ancilla witness used by the unique-groundstate equivalence: the span of the
/// g-vectors (<g| (x) 1) V^dag |alpha> over the Ptilde basis.
inline Mat unique_groundstate_witness(const Mat& g_state, const Mat& ptilde_basis, const Encoding& enc,
                                      const Caps& caps = {}) {
  const Mat v = enc.isometry(caps);
  const std::uint64_t anc_dim = enc.ancilla_dim();
  Mat gvecs(static_cast<Eigen::Index>(anc_dim), ptilde_basis.cols());
  for (Eigen::Index k = 0; k < ptilde_basis.cols(); ++k) {
    const Vec unencoded = v.adjoint() * ptilde_basis.col(k);  // on system (x) ancilla
    Vec gv = Vec::Zero(static_cast<Eigen::Index>(anc_dim));
    for (std::uint64_t a = 0; a < anc_dim; ++a) {
      cxd amp = 0;
      for (std::uint64_t s = 0; s < enc.system_dim(); ++s)
        amp += std::conj(g_state(static_cast<Eigen::Index>(s), 0)) *
               unencoded(static_cast<Eigen::Index>(s * anc_dim + a));
      gv(static_cast<Eigen::Index>(a)) = amp;
    }
    gvecs.col(k) = gv;
  }
  // orthonormalize the span
  Eigen::ColPivHouseholderQR<Mat> qr(gvecs);
  const Eigen::Index rank = qr.rank();
  Mat q = qr.householderQ() * Mat::Identity(gvecs.rows(), rank);
  return q;
}

struct IncoherenceInterval {
  double lb = 0.0;
  double ub = 1.0;
  std::optional<Mat> witness;  // ancilla projector basis achieving ub
  std::size_t blocks = 0;      // detected orthogonal-ancilla block count (0 = none)
};

namespace detail {

/// Attempts to expose the structure Ptilde = sum_v P_v (x) |a_v><a_v| with
/// orthogonal ancilla states. On success returns the block count B >= 2, which
/// certifies epsilon >= sqrt(1 - 1/B).
inline std::size_t detect_ancilla_blocks(const Mat& ptilde_basis, const Encoding& enc, std::uint64_t seed,
                                         const Caps& caps) {
  const std::uint64_t sys_dim = enc.system_dim();
  const std::uint64_t anc_dim = enc.ancilla_dim();
  if (anc_dim <= 1) return 0;
  const Mat v = enc.isometry(caps);
  const Mat w = v.adjoint() * (ptilde_basis * ptilde_basis.adjoint()) * v;  // on sys (x) anc
  // Ptilde must live inside range(V) for the block statement to be exact
  if (std::abs(w.trace().real() - static_cast<double>(ptilde_basis.cols())) > 1e-8) return 0;

  auto contract_sys = [&](const Mat& g) {
    Mat m = Mat::Zero(static_cast<Eigen::Index>(anc_dim), static_cast<Eigen::Index>(anc_dim));
    for (std::uint64_t a = 0; a < anc_dim; ++a)
      for (std::uint64_t b = 0; b < anc_dim; ++b) {
        cxd acc = 0;
        for (std::uint64_t s = 0; s < sys_dim; ++s)
          for (std::uint64_t s2 = 0; s2 < sys_dim; ++s2)
            acc += g(static_cast<Eigen::Index>(s2), static_cast<Eigen::Index>(s)) *
                   w(static_cast<Eigen::Index>(s * anc_dim + a), static_cast<Eigen::Index>(s2 * anc_dim + b));
        m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = acc;
      }
    return m;
  };

  const Mat rho_anc = contract_sys(Mat::Identity(static_cast<Eigen::Index>(sys_dim),
                                                 static_cast<Eigen::Index>(sys_dim)));
  Eigen::SelfAdjointEigenSolver<Mat> rho_es(rho_anc);
  std::vector<Eigen::Index> used;
  for (Eigen::Index i = 0; i < rho_es.eigenvalues().size(); ++i)
    if (rho_es.eigenvalues()(i) > 1e-8) used.push_back(i);
  if (used.size() < 2) return 0;
  Mat range(rho_anc.rows(), static_cast<Eigen::Index>(used.size()));
  for (std::size_t i = 0; i < used.size(); ++i) range.col(static_cast<Eigen::Index>(i)) = rho_es.eigenvectors().col(used[i]);

  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 8; ++attempt) {
    const Mat g = random_hermitian(static_cast<Eigen::Index>(sys_dim), rng);
    const Mat m = range.adjoint() * contract_sys(g) * range;
    Eigen::SelfAdjointEigenSolver<Mat> es((m + m.adjoint()) / 2.0);
    const Mat cand = range * es.eigenvectors();  // candidate |a_v> columns
    const std::size_t nb = static_cast<std::size_t>(cand.cols());
    // verify the block decomposition exactly
    std::vector<Mat> diag_blocks;
    bool ok = true;
    double total_rank = 0.0;
    for (std::size_t a = 0; a < nb && ok; ++a) {
      Mat c_aa = Mat::Zero(static_cast<Eigen::Index>(sys_dim), static_cast<Eigen::Index>(sys_dim));
      for (std::uint64_t s = 0; s < sys_dim; ++s)
        for (std::uint64_t s2 = 0; s2 < sys_dim; ++s2) {
          cxd acc = 0;
          for (std::uint64_t x = 0; x < anc_dim; ++x)
            for (std::uint64_t y = 0; y < anc_dim; ++y)
              acc += std::conj(cand(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(a))) *
                     cand(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(a)) *
                     w(static_cast<Eigen::Index>(s * anc_dim + x), static_cast<Eigen::Index>(s2 * anc_dim + y));
          c_aa(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s2)) = acc;
        }
      if (max_abs(c_aa * c_aa - c_aa) > 1e-7) ok = false;  // must be a projector
      total_rank += c_aa.trace().real();
      diag_blocks.push_back(c_aa);
    }
    if (!ok || std::abs(total_rank - static_cast<double>(ptilde_basis.cols())) > 1e-6) continue;
    // cross blocks must vanish and diagonal blocks must be mutually orthogonal
    for (std::size_t a = 0; a < nb && ok; ++a)
      for (std::size_t b = 0; b < nb && ok; ++b) {
        if (a == b) continue;
        if (max_abs(diag_blocks[a] * diag_blocks[b]) > 1e-7) ok = false;
        Mat c_ab = Mat::Zero(static_cast<Eigen::Index>(sys_dim), static_cast<Eigen::Index>(sys_dim));
        for (std::uint64_t s = 0; s < sys_dim; ++s)
          for (std::uint64_t s2 = 0; s2 < sys_dim; ++s2) {
            cxd acc = 0;
            for (std::uint64_t x = 0; x < anc_dim; ++x)
              for (std::uint64_t y = 0; y < anc_dim; ++y)
                acc += std::conj(cand(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(a))) *
                       cand(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(b)) *
                       w(static_cast<Eigen::Index>(s * anc_dim + x), static_cast<Eigen::Index>(s2 * anc_dim + y));
            c_ab(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s2)) = acc;
          }
        if (max_abs(c_ab) > 1e-7) ok = false;
      }
    if (!ok) continue;
    std::size_t nonempty = 0;
    for (const auto& blk : diag_blocks)
      if (blk.trace().real() > 0.5) ++nonempty;
    if (nonempty >= 2) return nonempty;
  }
  return 0;
}

}  // namespace detail

/// Bracket for the incoherence when no ancilla projector is supplied. The
/// lower bound combines delta/2, a rank-mismatch argument, and the
/// orthogonal-ancilla block structure when detected; the upper bound comes
/// from a compression heuristic and carries its witness.
inline IncoherenceInterval incoherence_interval(const Mat& p_basis, const Mat& ptilde_basis, const Encoding& enc,
                                                std::uint64_t seed = 1, const Caps& caps = {}) {
  IncoherenceInterval out;
  const double delta = unfaithfulness(p_basis, ptilde_basis, enc, caps);
  out.lb = delta / 2.0;

  const std::size_t q = static_cast<std::size_t>(p_basis.cols());
  const std::size_t qt = static_cast<std::size_t>(ptilde_basis.cols());
  const bool rank_possible = q > 0 && qt % q == 0 && qt / q >= 1 && qt / q <= enc.ancilla_dim();
  if (!rank_possible) {
    out.lb = std::max(out.lb, 1.0);
    out.ub = 1.0;
    return out;
  }

  out.blocks = detail::detect_ancilla_blocks(ptilde_basis, enc, seed, caps);
  if (out.blocks >= 2)
    out.lb = std::max(out.lb, std::sqrt(1.0 - 1.0 / static_cast<double>(out.blocks)));

  const std::uint64_t anc_dim = enc.ancilla_dim();
  if (anc_dim > caps.dense_dim) {
    out.ub = 1.0;
    return out;  // search cap exceeded, keep the lower bound only
  }
  // compress V^dag Ptilde V against P on the system factor
  const Mat v = enc.isometry(caps);
  const Mat w = v.adjoint() * (ptilde_basis * ptilde_basis.adjoint()) * v;
  Mat compressed = Mat::Zero(static_cast<Eigen::Index>(anc_dim), static_cast<Eigen::Index>(anc_dim));
  for (Eigen::Index k = 0; k < p_basis.cols(); ++k)
    for (std::uint64_t a = 0; a < anc_dim; ++a)
      for (std::uint64_t b = 0; b < anc_dim; ++b) {
        cxd acc = 0;
        for (std::uint64_t s = 0; s < enc.system_dim(); ++s)
          for (std::uint64_t s2 = 0; s2 < enc.system_dim(); ++s2)
            acc += std::conj(p_basis(static_cast<Eigen::Index>(s), k)) *
                   p_basis(static_cast<Eigen::Index>(s2), k) *
                   w(static_cast<Eigen::Index>(s * anc_dim + a), static_cast<Eigen::Index>(s2 * anc_dim + b));
        compressed(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += acc;
      }
  Eigen::SelfAdjointEigenSolver<Mat> es((compressed + compressed.adjoint()) / 2.0);
  double best = 1.0;
  std::optional<Mat> best_witness;
  const std::size_t q_anc_max = std::min<std::size_t>(anc_dim, qt / q);
  for (std::size_t qa = 1; qa <= q_anc_max; ++qa) {
    if (qa * q != qt) continue;  // ranks must match for epsilon < 1
    Mat cand(static_cast<Eigen::Index>(anc_dim), static_cast<Eigen::Index>(qa));
    for (std::size_t j = 0; j < qa; ++j)
      cand.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(es.eigenvectors().cols() - 1 - static_cast<Eigen::Index>(j));
    const double eps = incoherence(p_basis, ptilde_basis, enc, cand, caps);
    if (eps < best) {
      best = eps;
      best_witness = cand;
    }
  }
  out.ub = std::max(best, out.lb - 1e-10);
  out.witness = best_witness;
  return out;
}

// --- Gap-simulation verdicts ------------------------------------------------

struct Classification {
  HamMetrics original;
  HamMetrics simulator;
  bool is_degree_reducer = false;  // degree dropped at this size
  bool is_diluter = false;         // term count dropped at this size
  double term_ratio = 0.0;         // M_simulator / M_original
};

struct GapSimReport {
  // target data
  double gamma = 0.0;
  double w = 0.0;
  std::size_t rank = 0;
  // simulator band
  double E_g_tilde = 0.0;
  double gamma_tilde = 0.0;
  double w_tilde = 0.0;
  bool cond1_ok = false;
  // projector distances
  double delta = 0.0;
  bool epsilon_exact = false;
  double epsilon = 1.0;       // exact value when epsilon_exact
  double epsilon_lb = 0.0;
  double epsilon_ub = 1.0;
  std::size_t blocks = 0;
  // verdict
  bool weak = false;
  bool pass = false;
  std::string failure;
  Thresholds thresholds;
  Classification classification;
  // provenance (filled by the CLI layer)
  std::string target_hash, simulator_hash, version;
  std::uint64_t seed = 0;
  // selected simulator band as eigenvalue indices [band_lo, band_lo + rank)
  std::size_t band_lo = 0;
};

struct VerifyOptions {
  std::optional<Mat> p_anc;                          // known ancilla projector basis
  std::optional<std::pair<std::size_t, std::size_t>> band;  // weak-mode band override [lo, hi]
  std::uint64_t seed = 1;
  Caps caps{};
};

namespace detail {

inline void classify(const Hamiltonian& target, const Hamiltonian& simulator, GapSimReport& rep) {
  rep.classification.original = metrics(target);
  rep.classification.simulator = metrics(simulator);
  rep.classification.is_degree_reducer =
      rep.classification.simulator.degree_r < rep.classification.original.degree_r;
  rep.classification.is_diluter =
      rep.classification.simulator.term_count_M < rep.classification.original.term_count_M;
  rep.classification.term_ratio =
      rep.classification.original.term_count_M == 0
          ? 0.0
          : static_cast<double>(rep.classification.simulator.term_count_M) /
                static_cast<double>(rep.classification.original.term_count_M);
}

inline void apply_thresholds(GapSimReport& rep) {
  rep.pass = rep.cond1_ok;
  if (!rep.cond1_ok && rep.failure.empty()) rep.failure = "condition 1 (band structure) violated";
  if (rep.delta > rep.thresholds.delta_max + 1e-12) {
    rep.pass = false;
    if (rep.failure.empty()) rep.failure = "unfaithfulness above threshold";
  }
  const double eps_for_verdict = rep.epsilon_exact ? rep.epsilon : rep.epsilon_ub;
  if (eps_for_verdict > rep.thresholds.eps_max + 1e-12) {
    rep.pass = false;
    if (rep.failure.empty()) rep.failure = "incoherence above threshold";
  }
  if (rep.w_tilde > rep.thresholds.w_max + 1e-12 || rep.w_tilde >= 1.0) {
    rep.pass = false;
    if (rep.failure.empty()) rep.failure = "energy spread above threshold";
  }
}

/// Contiguous eigenvalue windows of size q isolated by gamma in absolute value
/// on both sides (band minimum as the reference energy). Returns the window
/// with the smallest spread, lowest start on ties.
inline std::optional<std::size_t> find_weak_band(const RVec& evs, std::size_t q, double gamma, double w_max) {
  std::optional<std::size_t> best;
  double best_width = 0.0;
  for (std::size_t lo = 0; lo + q <= static_cast<std::size_t>(evs.size()); ++lo) {
    const double band_min = evs(static_cast<Eigen::Index>(lo));
    const double band_max = evs(static_cast<Eigen::Index>(lo + q - 1));
    const double width = band_max - band_min;
    if (width > w_max * gamma + 1e-12) continue;
    if (lo > 0 && band_min - evs(static_cast<Eigen::Index>(lo - 1)) < gamma - 1e-9) continue;
    if (lo + q < static_cast<std::size_t>(evs.size()) &&
        evs(static_cast<Eigen::Index>(lo + q)) - band_min < gamma - 1e-9)
      continue;
    if (!best || width < best_width - 1e-15) {
      best = lo;
      best_width = width;
    }
  }
  return best;
}

}  // namespace detail

/// Dense strong/weak gap-simulation verdict. The simulator band is the lowest
/// rank(P) eigenstates (weak variant: an isolated interior band, auto-detected
/// or caller-designated). Checks band structure against (gamma, w) of the
/// target cut, then fills delta, epsilon, and the classification.
inline GapSimReport verify_gap_sim_impl(const Hamiltonian& target, const GroundCut& cut,
                                        const Hamiltonian& simulator, const Encoding& enc,
                                        const Thresholds& thresholds, bool weak, const VerifyOptions& opts) {
  GapSimReport rep;
  rep.thresholds = thresholds;
  rep.weak = weak;
  rep.seed = opts.seed;
  detail::classify(target, simulator, rep);

  const QuasiGroundspace g = ground_data(target, cut, opts.caps);
  rep.gamma = g.gamma;
  rep.w = g.w;
  rep.rank = g.rank_q;

  const Spectrum sim = eig_dense(simulator, opts.caps);
  const std::size_t q = g.rank_q;
  const std::size_t dim = static_cast<std::size_t>(sim.eigenvalues.size());
  if (q >= dim) throw ValidationError("verify: simulator space smaller than the target band");

  std::size_t lo = 0;
  if (weak) {
    if (opts.band) {
      lo = opts.band->first;
      if (opts.band->second + 1 - lo != q || opts.band->second >= dim)
        throw ValidationError("verify: designated band does not have rank(P) states");
    } else {
      const auto found = detail::find_weak_band(sim.eigenvalues, q, g.gamma, thresholds.w_max);
      if (!found) {
        rep.cond1_ok = false;
        rep.failure = "no isolated band of the required rank";
        detail::apply_thresholds(rep);
        rep.pass = false;
        return rep;
      }
      lo = *found;
    }
  }
  rep.band_lo = lo;

  const double band_min = sim.eigenvalues(static_cast<Eigen::Index>(lo));
  const double band_max = sim.eigenvalues(static_cast<Eigen::Index>(lo + q - 1));
  rep.E_g_tilde = band_min;
  const double above = (lo + q < dim) ? sim.eigenvalues(static_cast<Eigen::Index>(lo + q)) - band_min
                                      : std::numeric_limits<double>::infinity();
  const double below = (lo > 0) ? band_min - sim.eigenvalues(static_cast<Eigen::Index>(lo - 1))
                                : std::numeric_limits<double>::infinity();
  rep.gamma_tilde = weak ? std::min(above, below) : above;
  rep.w_tilde = rep.gamma > 0 ? (band_max - band_min) / rep.gamma : 0.0;
  rep.cond1_ok = rep.gamma_tilde >= rep.gamma * (1.0 - 1e-9) && rep.w_tilde < 1.0;
  if (!weak && lo != 0) rep.cond1_ok = false;

  Mat ptilde = sim.eigenvectors.middleCols(static_cast<Eigen::Index>(lo), static_cast<Eigen::Index>(q));
  rep.delta = unfaithfulness(g.basis, ptilde, enc, opts.caps);
  if (opts.p_anc) {
    rep.epsilon_exact = true;
    rep.epsilon = incoherence(g.basis, ptilde, enc, *opts.p_anc, opts.caps);
    rep.epsilon_lb = std::max(rep.delta / 2.0 - 1e-10, 0.0);
    rep.epsilon_ub = rep.epsilon;
  } else {
    const IncoherenceInterval iv = incoherence_interval(g.basis, ptilde, enc, opts.seed, opts.caps);
    rep.epsilon_exact = false;
    rep.epsilon_lb = std::max(iv.lb, rep.delta / 2.0 - 1e-10);
    rep.epsilon_ub = iv.ub;
    rep.epsilon = iv.ub;
    rep.blocks = iv.blocks;
  }
  detail::apply_thresholds(rep);
  return rep;
}

inline GapSimReport verify_gap_sim(const Hamiltonian& target, const GroundCut& cut, const Hamiltonian& simulator,
                                   const Encoding& enc, const Thresholds& thresholds = {},
                                   const VerifyOptions& opts = {}) {
  return verify_gap_sim_impl(target, cut, simulator, enc, thresholds, false, opts);
}

inline GapSimReport verify_weak_gap_sim(const Hamiltonian& target, const GroundCut& cut,
                                        const Hamiltonian& simulator, const Encoding& enc,
                                        const Thresholds& thresholds = {}, const VerifyOptions& opts = {}) {
  return verify_gap_sim_impl(target, cut, simulator, enc, thresholds, true, opts);
}

// --- Label-mode verifier (diagonal Hamiltonians, trivial encoding) ----------

/// Strong gap-simulation verdict for diagonal target and simulator under a
/// trivial encoding, by basis-state enumeration. Exact at scales far past the
/// dense cap; delta is 0 or 1 for computational-basis bands, and the
/// incoherence lower bound comes from the ancilla configurations directly.
inline GapSimReport verify_gap_sim_diagonal(const Hamiltonian& target, const GroundCut& cut,
                                            const Hamiltonian& simulator, const Encoding& enc,
                                            const Thresholds& thresholds = {}, const VerifyOptions& opts = {}) {
  if (!is_diagonal(target) || !is_diagonal(simulator))
    throw ValidationError("verify_gap_sim_diagonal: both Hamiltonians must be diagonal");
  if (enc.kind() != Encoding::Kind::Trivial)
    throw ValidationError("verify_gap_sim_diagonal: trivial encoding only");
  GapSimReport rep;
  rep.thresholds = thresholds;
  rep.seed = opts.seed;
  detail::classify(target, simulator, rep);

  // target band
  if (!std::holds_alternative<SpreadCut>(cut) || std::get<SpreadCut>(cut).w_max != 0.0)
    throw ValidationError("verify_gap_sim_diagonal: only the w_max = 0 cut is supported");
  const std::uint64_t tdim = target.space.total_dim();
  const auto tlow = diag_lowest(target, static_cast<std::size_t>(std::min<std::uint64_t>(tdim, 1ull << 22)), opts.caps);
  const double te0 = tlow.front().first;
  std::size_t q = 0;
  while (q < tlow.size() && tlow[q].first - te0 <= Tolerances::degeneracy_rel * std::max(1.0, std::abs(te0))) ++q;
  if (q == tlow.size()) throw ValidationError("verify_gap_sim_diagonal: target has no gap");
  rep.rank = q;
  rep.gamma = tlow[q].first - te0;
  rep.w = 0.0;
  std::unordered_set<std::uint64_t> target_ground;
  for (std::size_t i = 0; i < q; ++i) target_ground.insert(tlow[i].second);

  // simulator band: lowest q + 1 states
  const auto slow = diag_lowest(simulator, q + 1, opts.caps);
  if (slow.size() < q + 1) throw ValidationError("verify_gap_sim_diagonal: simulator too small");
  const double se0 = slow.front().first;
  rep.E_g_tilde = se0;
  rep.gamma_tilde = slow[q].first - se0;
  rep.w_tilde = rep.gamma > 0 ? (slow[q - 1].first - se0) / rep.gamma : 0.0;
  rep.cond1_ok = rep.gamma_tilde >= rep.gamma * (1.0 - 1e-9) && rep.w_tilde < 1.0;

  // delta: every simulator band label must restrict to a target ground label
  bool contained = true;
  std::map<std::uint64_t, std::size_t> anc_blocks;
  for (std::size_t i = 0; i < q; ++i) {
    const auto [sys, anc] = enc.split_label(slow[i].second);
    if (!target_ground.count(sys)) contained = false;
    ++anc_blocks[anc];
  }
  rep.delta = contained ? 0.0 : 1.0;
  rep.blocks = anc_blocks.size();
  rep.epsilon_exact = false;
  rep.epsilon_lb = std::max(rep.delta / 2.0,
                            rep.blocks >= 2 ? std::sqrt(1.0 - 1.0 / static_cast<double>(rep.blocks)) : 0.0);
  if (rep.blocks == 1 && contained && anc_blocks.size() == 1 && q == target_ground.size()) {
    // band is exactly P (x) |a><a|
    rep.epsilon_exact = true;
    rep.epsilon = 0.0;
    rep.epsilon_lb = 0.0;
    rep.epsilon_ub = 0.0;
  } else {
    rep.epsilon_ub = 1.0;
    rep.epsilon = rep.epsilon_ub;
  }
  detail::apply_thresholds(rep);
  return rep;
}

// --- Composition -------------------------------------------------------------

struct ComposedBounds {
  double eps_bound = 0.0;    // eps1 + eps2
  double delta_bound = 0.0;  // 2 delta2 + delta1
  double w_tilde = 0.0;      // spread of the outer stage
};

/// Bounds for a chained pair of verified simulations; caller declares that
/// r1's simulator is r2's target.
inline ComposedBounds compose_bounds(const GapSimReport& r1, const GapSimReport& r2) {
  if (r1.rank != r2.rank)
    throw ValidationError("compose_bounds: chained reports disagree on the band rank");
  ComposedBounds c;
  const double e1 = r1.epsilon_exact ? r1.epsilon : r1.epsilon_ub;
  const double e2 = r2.epsilon_exact ? r2.epsilon : r2.epsilon_ub;
  c.eps_bound = e1 + e2;
  c.delta_bound = 2.0 * r2.delta + r1.delta;
  c.w_tilde = r2.w_tilde;
  return c;
}

}  // namespace gapsim
