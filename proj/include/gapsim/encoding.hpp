#pragma once

#include "gapsim/spectral.hpp"

#include <algorithm>
#include <set>
#include <variant>

namespace gapsim {

/// A local unitary on an ordered list of sites.
struct Gate {
  std::vector<std::size_t> support;
  Mat unitary;
};

inline void check_gate(const SiteSpace& space, const Gate& g) {
  std::uint64_t d = 1;
  std::set<std::size_t> uniq(g.support.begin(), g.support.end());
  if (uniq.size() != g.support.size()) throw ValidationError("Gate: repeated site in support");
  for (std::size_t s : g.support) {
    if (s >= space.n_sites()) throw ValidationError("Gate: support site out of range");
    d *= static_cast<std::uint64_t>(space.dims[s]);
  }
  if (static_cast<std::uint64_t>(g.unitary.rows()) != d || static_cast<std::uint64_t>(g.unitary.cols()) != d)
    throw ValidationError("Gate: matrix dimension does not match support");
  const Mat gram = g.unitary.adjoint() * g.unitary;
  if (max_abs(gram - Mat::Identity(gram.rows(), gram.cols())) > Tolerances::unitarity)
    throw ValidationError("Gate: matrix not unitary within tolerance");
}

/// Isometry V : system (x) ancilla -> simulator.
///
/// Variants:
///  - Trivial: system sites embed identically at declared simulator positions,
///    all remaining simulator sites are ancilla (in ascending site order).
///  - TensorLocal: per-site isometries V_i into disjoint simulator blocks.
///  - LayeredCircuit: simulator = system + ancilla sites; V applies a
///    constant-depth circuit of layers of disjoint local unitaries.
///  - Explicit: a dense isometry matrix.
class Encoding {
 public:
  enum class Kind { Trivial, TensorLocal, LayeredCircuit, Explicit };

  struct SiteIsometry {
    std::vector<int> anc_dims;          // ancilla factor attached to this site
    std::vector<std::size_t> target;    // simulator sites of the block
    Mat v;                              // (block dim) x (site dim * anc dim)
  };

  static Encoding trivial(SiteSpace simulator, std::vector<std::size_t> system_positions) {
    Encoding e;
    e.kind_ = Kind::Trivial;
    e.simulator_ = std::move(simulator);
    e.sys_positions_ = std::move(system_positions);
    std::set<std::size_t> sys_set(e.sys_positions_.begin(), e.sys_positions_.end());
    if (sys_set.size() != e.sys_positions_.size())
      throw ValidationError("Encoding::trivial: repeated system position");
    std::vector<int> sys_dims, anc_dims;
    for (std::size_t p : e.sys_positions_) {
      if (p >= e.simulator_.n_sites()) throw ValidationError("Encoding::trivial: position out of range");
      sys_dims.push_back(e.simulator_.dims[p]);
    }
    for (std::size_t s = 0; s < e.simulator_.n_sites(); ++s)
      if (!sys_set.count(s)) {
        e.anc_positions_.push_back(s);
        anc_dims.push_back(e.simulator_.dims[s]);
      }
    e.system_ = sys_dims.empty() ? SiteSpace() : SiteSpace(sys_dims);
    e.ancilla_ = anc_dims.empty() ? SiteSpace() : SiteSpace(anc_dims);
    return e;
  }

  /// Identity encoding of a space onto itself (no ancilla).
  static Encoding identity(const SiteSpace& space) {
    std::vector<std::size_t> pos(space.n_sites());
    for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = i;
    return trivial(space, pos);
  }

  static Encoding tensor_local(SiteSpace system, SiteSpace simulator, std::vector<SiteIsometry> isos) {
    Encoding e;
    e.kind_ = Kind::TensorLocal;
    e.system_ = std::move(system);
    e.simulator_ = std::move(simulator);
    e.site_isos_ = std::move(isos);
    if (e.site_isos_.size() != e.system_.n_sites())
      throw ValidationError("Encoding::tensor_local: need one isometry per system site");
    std::set<std::size_t> covered;
    std::vector<int> anc_dims;
    for (std::size_t i = 0; i < e.site_isos_.size(); ++i) {
      const auto& si = e.site_isos_[i];
      std::uint64_t block = 1, source = static_cast<std::uint64_t>(e.system_.dims[i]);
      for (std::size_t t : si.target) {
        if (t >= e.simulator_.n_sites() || covered.count(t))
          throw ValidationError("Encoding::tensor_local: target blocks must be disjoint simulator sites");
        covered.insert(t);
        block *= static_cast<std::uint64_t>(e.simulator_.dims[t]);
      }
      for (int d : si.anc_dims) source *= static_cast<std::uint64_t>(d);
      if (static_cast<std::uint64_t>(si.v.rows()) != block || static_cast<std::uint64_t>(si.v.cols()) != source)
        throw ValidationError("Encoding::tensor_local: isometry shape mismatch");
      const Mat gram = si.v.adjoint() * si.v;
      if (max_abs(gram - Mat::Identity(gram.rows(), gram.cols())) > Tolerances::isometry)
        throw ValidationError("Encoding::tensor_local: V_i is not an isometry");
      for (int d : si.anc_dims) anc_dims.push_back(d);
    }
    if (covered.size() != e.simulator_.n_sites())
      throw ValidationError("Encoding::tensor_local: target blocks must cover the simulator");
    e.ancilla_ = anc_dims.empty() ? SiteSpace() : SiteSpace(anc_dims);
    return e;
  }

  /// Simulator sites are the system sites followed by the ancilla sites; the
  /// circuit layers apply in order, gates within a layer on disjoint supports.
  static Encoding layered_circuit(SiteSpace system, SiteSpace ancilla, std::vector<std::vector<Gate>> layers) {
    Encoding e;
    e.kind_ = Kind::LayeredCircuit;
    e.system_ = std::move(system);
    e.ancilla_ = std::move(ancilla);
    std::vector<int> sim_dims = e.system_.dims;
    sim_dims.insert(sim_dims.end(), e.ancilla_.dims.begin(), e.ancilla_.dims.end());
    e.simulator_ = SiteSpace(sim_dims);
    e.layers_ = std::move(layers);
    for (const auto& layer : e.layers_) {
      std::set<std::size_t> used;
      for (const auto& g : layer) {
        check_gate(e.simulator_, g);
        for (std::size_t s : g.support) {
          if (used.count(s)) throw ValidationError("Encoding::layered_circuit: overlapping gates in a layer");
          used.insert(s);
        }
      }
    }
    return e;
  }

  static Encoding explicit_isometry(SiteSpace system, SiteSpace ancilla, SiteSpace simulator, Mat v) {
    Encoding e;
    e.kind_ = Kind::Explicit;
    e.system_ = std::move(system);
    e.ancilla_ = std::move(ancilla);
    e.simulator_ = std::move(simulator);
    e.v_ = std::move(v);
    const std::uint64_t rows = e.simulator_.total_dim();
    const std::uint64_t cols = e.system_dim() * e.ancilla_dim();
    if (static_cast<std::uint64_t>(e.v_.rows()) != rows || static_cast<std::uint64_t>(e.v_.cols()) != cols)
      throw ValidationError("Encoding::explicit_isometry: matrix shape mismatch");
    const Mat gram = e.v_.adjoint() * e.v_;
    if (max_abs(gram - Mat::Identity(gram.rows(), gram.cols())) > Tolerances::isometry)
      throw ValidationError("Encoding::explicit_isometry: V is not an isometry");
    return e;
  }

  Kind kind() const { return kind_; }
  const SiteSpace& system() const { return system_; }
  const SiteSpace& ancilla() const { return ancilla_; }
  const SiteSpace& simulator() const { return simulator_; }
  std::uint64_t system_dim() const { return system_.dims.empty() ? 1 : system_.total_dim(); }
  std::uint64_t ancilla_dim() const { return ancilla_.dims.empty() ? 1 : ancilla_.total_dim(); }
  std::uint64_t simulator_dim() const { return simulator_.total_dim(); }
  bool is_unitary() const { return simulator_dim() == system_dim() * ancilla_dim(); }
  const std::vector<std::size_t>& system_positions() const { return sys_positions_; }
  const std::vector<std::size_t>& ancilla_positions() const { return anc_positions_; }

  /// Trivial-variant label split: simulator basis index -> (system, ancilla).
  std::pair<std::uint64_t, std::uint64_t> split_label(std::uint64_t sim_label) const {
    if (kind_ != Kind::Trivial) throw ValidationError("split_label: trivial encoding only");
    const auto digits = simulator_.digits_of(sim_label);
    std::uint64_t sys = 0, anc = 0;
    for (std::size_t i = 0; i < sys_positions_.size(); ++i)
      sys = sys * static_cast<std::uint64_t>(system_.dims[i]) + static_cast<std::uint64_t>(digits[sys_positions_[i]]);
    for (std::size_t i = 0; i < anc_positions_.size(); ++i)
      anc = anc * static_cast<std::uint64_t>(ancilla_.dims[i]) + static_cast<std::uint64_t>(digits[anc_positions_[i]]);
    return {sys, anc};
  }

  /// Trivial-variant label merge: (system, ancilla) -> simulator basis index.
  std::uint64_t merge_label(std::uint64_t sys_label, std::uint64_t anc_label) const {
    if (kind_ != Kind::Trivial) throw ValidationError("merge_label: trivial encoding only");
    std::vector<int> digits(simulator_.n_sites(), 0);
    const auto sys_digits = system_.dims.empty() ? std::vector<int>{} : system_.digits_of(sys_label);
    const auto anc_digits = ancilla_.dims.empty() ? std::vector<int>{} : ancilla_.digits_of(anc_label);
    for (std::size_t i = 0; i < sys_positions_.size(); ++i) digits[sys_positions_[i]] = sys_digits[i];
    for (std::size_t i = 0; i < anc_positions_.size(); ++i) digits[anc_positions_[i]] = anc_digits[i];
    return simulator_.index_of(digits);
  }

  /// Dense isometry matrix (simulator_dim x system_dim*ancilla_dim).
  Mat isometry(const Caps& caps = {}) const {
    const std::uint64_t rows = simulator_dim();
    const std::uint64_t cols = system_dim() * ancilla_dim();
    if (rows > caps.dense_dim) throw CapExceeded("Encoding::isometry: simulator dimension exceeds dense cap");
    switch (kind_) {
      case Kind::Explicit: return v_;
      case Kind::Trivial: {
        Mat v = Mat::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        const std::uint64_t anc_dim = ancilla_dim();
        for (std::uint64_t s = 0; s < system_dim(); ++s)
          for (std::uint64_t a = 0; a < anc_dim; ++a)
            v(static_cast<Eigen::Index>(merge_label(s, a)), static_cast<Eigen::Index>(s * anc_dim + a)) = 1.0;
        return v;
      }
      case Kind::TensorLocal: {
        // columns ordered as system sites (with their ancilla factors inline),
        // rows reordered from block order to simulator site order
        Mat v_blocks = Mat::Identity(1, 1);
        std::vector<std::size_t> block_order;
        for (const auto& si : site_isos_) {
          v_blocks = kron(v_blocks, si.v);
          block_order.insert(block_order.end(), si.target.begin(), si.target.end());
        }
        // permute rows: index in block order -> index in simulator order
        Mat v = Mat::Zero(static_cast<Eigen::Index>(rows), v_blocks.cols());
        SiteSpace block_space = [&] {
          std::vector<int> d;
          for (std::size_t s : block_order) d.push_back(simulator_.dims[s]);
          return SiteSpace(d);
        }();
        for (std::uint64_t b = 0; b < rows; ++b) {
          const auto bd = block_space.digits_of(b);
          std::vector<int> sim_digits(simulator_.n_sites(), 0);
          for (std::size_t i = 0; i < block_order.size(); ++i) sim_digits[block_order[i]] = bd[i];
          v.row(static_cast<Eigen::Index>(simulator_.index_of(sim_digits))) = v_blocks.row(static_cast<Eigen::Index>(b));
        }
        // reorder columns from (site0, anc0, site1, anc1, ...) to (sys..., anc...)
        return v * column_permutation().adjoint();
      }
      case Kind::LayeredCircuit: {
        Mat v = Mat::Identity(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (const auto& layer : layers_)
          for (const auto& g : layer) {
            Mat u;
            embed_unitary(g, u);
            v = u * v;
          }
        return v;
      }
    }
    throw std::logic_error("unreachable");
  }

  /// Encoded operator V (op (x) 1_anc) V^dag for an operator supported on
  /// system sites, together with its simulator support set.
  LocalTerm encode_term(const LocalTerm& op, const Caps& caps = {}) const {
    for (std::size_t s : op.support)
      if (s >= system_.n_sites()) throw ValidationError("encode_term: support outside the system register");
    switch (kind_) {
      case Kind::Trivial: {
        std::vector<std::size_t> mapped;
        for (std::size_t s : op.support) mapped.push_back(sys_positions_[s]);
        return LocalTerm(mapped, op.matrix);
      }
      case Kind::TensorLocal: {
        if (op.support.empty()) return op;
        // conjugate op (x) 1_anc by the product of touched site isometries;
        // support is the union of their target blocks
        Mat w = Mat::Identity(1, 1);
        std::vector<std::size_t> block;
        std::vector<int> inter_dims;             // (site, its ancilla...) per touched site
        std::vector<std::uint64_t> anc_block_dim;
        for (std::size_t s : op.support) {
          const auto& si = site_isos_[s];
          w = kron(w, si.v);
          block.insert(block.end(), si.target.begin(), si.target.end());
          inter_dims.push_back(system_.dims[s]);
          std::uint64_t anc_d = 1;
          for (int d : si.anc_dims) anc_d *= static_cast<std::uint64_t>(d);
          anc_block_dim.push_back(anc_d);
          for (int d : si.anc_dims) inter_dims.push_back(d);
        }
        const SiteSpace inter(inter_dims);
        const std::uint64_t idim = inter.total_dim();
        auto split = [&](std::uint64_t idx) {
          // interleaved index -> (op-local index, ancilla index)
          std::uint64_t op_idx = 0, anc_idx = 0;
          const auto dg = inter.digits_of(idx);
          std::size_t cursor = 0;
          for (std::size_t k = 0; k < op.support.size(); ++k) {
            op_idx = op_idx * static_cast<std::uint64_t>(system_.dims[op.support[k]]) +
                     static_cast<std::uint64_t>(dg[cursor++]);
            std::uint64_t a = 0;
            for (std::size_t j = 0; j < site_isos_[op.support[k]].anc_dims.size(); ++j)
              a = a * static_cast<std::uint64_t>(site_isos_[op.support[k]].anc_dims[j]) +
                  static_cast<std::uint64_t>(dg[cursor++]);
            anc_idx = anc_idx * anc_block_dim[k] + a;
          }
          return std::make_pair(op_idx, anc_idx);
        };
        Mat op_ext = Mat::Zero(static_cast<Eigen::Index>(idim), static_cast<Eigen::Index>(idim));
        for (std::uint64_t i = 0; i < idim; ++i) {
          const auto [oi, ai] = split(i);
          for (std::uint64_t j = 0; j < idim; ++j) {
            const auto [oj, aj] = split(j);
            if (ai == aj)
              op_ext(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                  op.matrix(static_cast<Eigen::Index>(oi), static_cast<Eigen::Index>(oj));
          }
        }
        return LocalTerm(block, w * op_ext * w.adjoint());
      }
      case Kind::LayeredCircuit: {
        std::vector<std::size_t> sup = op.support;  // system site i is simulator site i
        Mat m = op.matrix;
        for (const auto& layer : layers_) grow_through_layer(layer, sup, m);
        return LocalTerm(sup, m);
      }
      case Kind::Explicit: {
        const Mat v = isometry(caps);
        Mat sys_op = Mat::Zero(static_cast<Eigen::Index>(system_dim()), static_cast<Eigen::Index>(system_dim()));
        accumulate_term(system_, op, sys_op);
        const Mat full = v * kron(sys_op, Mat::Identity(static_cast<Eigen::Index>(ancilla_dim()),
                                                        static_cast<Eigen::Index>(ancilla_dim()))) *
                         v.adjoint();
        std::vector<std::size_t> sup(simulator_.n_sites());
        for (std::size_t i = 0; i < sup.size(); ++i) sup[i] = i;
        return LocalTerm(sup, full);
      }
    }
    throw std::logic_error("unreachable");
  }

  /// Encoded subspace basis V (basis (x) 1_anc); columns stay orthonormal.
  Mat encode_subspace(const Mat& system_basis, const Caps& caps = {}) const {
    const Mat v = isometry(caps);
    const Mat anc_id = Mat::Identity(static_cast<Eigen::Index>(ancilla_dim()), static_cast<Eigen::Index>(ancilla_dim()));
    return v * kron(system_basis, anc_id);
  }

  /// V (basis (x) anc_basis).
  Mat encode_subspace_with_ancilla(const Mat& system_basis, const Mat& anc_basis, const Caps& caps = {}) const {
    const Mat v = isometry(caps);
    return v * kron(system_basis, anc_basis);
  }

 private:
  void embed_unitary(const Gate& g, Mat& into) const {
    // full-space unitary of a gate, identity elsewhere: I + embed(U - I)
    const std::uint64_t dim = simulator_.total_dim();
    into = Mat::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    const Mat delta = g.unitary - Mat::Identity(g.unitary.rows(), g.unitary.cols());
    accumulate_term(simulator_, LocalTerm(g.support, delta), into);
  }

  void grow_through_layer(const std::vector<Gate>& layer, std::vector<std::size_t>& sup, Mat& m) const {
    std::vector<const Gate*> touching;
    std::set<std::size_t> sup_set(sup.begin(), sup.end());
    for (const auto& g : layer)
      for (std::size_t s : g.support)
        if (sup_set.count(s)) {
          touching.push_back(&g);
          break;
        }
    if (touching.empty()) return;
    std::set<std::size_t> grown = sup_set;
    for (const Gate* g : touching) grown.insert(g->support.begin(), g->support.end());
    std::vector<std::size_t> new_sup(grown.begin(), grown.end());
    // embed m on the grown block
    SiteSpace block_space = [&] {
      std::vector<int> d;
      for (std::size_t s : new_sup) d.push_back(simulator_.dims[s]);
      return SiteSpace(d);
    }();
    auto local_index = [&](std::size_t site) {
      return static_cast<std::size_t>(std::lower_bound(new_sup.begin(), new_sup.end(), site) - new_sup.begin());
    };
    Mat grown_m = Mat::Zero(static_cast<Eigen::Index>(block_space.total_dim()),
                            static_cast<Eigen::Index>(block_space.total_dim()));
    {
      std::vector<std::size_t> local_sup;
      for (std::size_t s : sup) local_sup.push_back(local_index(s));
      accumulate_term(block_space, LocalTerm(local_sup, m), grown_m);
    }
    for (const Gate* g : touching) {
      std::vector<std::size_t> local_sup;
      for (std::size_t s : g->support) local_sup.push_back(local_index(s));
      Mat u = Mat::Identity(grown_m.rows(), grown_m.cols());
      Mat delta = g->unitary - Mat::Identity(g->unitary.rows(), g->unitary.cols());
      accumulate_term(block_space, LocalTerm(local_sup, delta), u);
      grown_m = u * grown_m * u.adjoint();
    }
    sup = new_sup;
    m = grown_m;
  }

  Mat column_permutation() const {
    // permutation sending column order (sys..., anc...) to the interleaved
    // (site0, anc0, site1, anc1, ...) order used when building tensor blocks
    std::vector<int> inter_dims;
    std::vector<std::pair<bool, std::size_t>> slots;  // (is_system, index within register)
    std::size_t anc_cursor = 0;
    for (std::size_t i = 0; i < system_.n_sites(); ++i) {
      inter_dims.push_back(system_.dims[i]);
      slots.emplace_back(true, i);
      for (std::size_t k = 0; k < site_isos_[i].anc_dims.size(); ++k) {
        inter_dims.push_back(site_isos_[i].anc_dims[k]);
        slots.emplace_back(false, anc_cursor++);
      }
    }
    SiteSpace inter(inter_dims);
    const std::uint64_t dim = inter.total_dim();
    Mat p = Mat::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::uint64_t col = 0; col < dim; ++col) {
      // col indexes (sys..., anc...) order
      std::uint64_t rest = col;
      const std::uint64_t anc_dim = ancilla_dim();
      const std::uint64_t sys_label = rest / anc_dim;
      const std::uint64_t anc_label = rest % anc_dim;
      const auto sys_digits = system_.dims.empty() ? std::vector<int>{} : system_.digits_of(sys_label);
      const auto anc_digits = ancilla_.dims.empty() ? std::vector<int>{} : ancilla_.digits_of(anc_label);
      std::vector<int> inter_digits(slots.size());
      for (std::size_t k = 0; k < slots.size(); ++k)
        inter_digits[k] = slots[k].first ? sys_digits[slots[k].second] : anc_digits[slots[k].second];
      p(static_cast<Eigen::Index>(inter.index_of(inter_digits)), static_cast<Eigen::Index>(col)) = 1.0;
    }
    return p;
  }

  Kind kind_ = Kind::Trivial;
  SiteSpace system_, ancilla_, simulator_;
  std::vector<std::size_t> sys_positions_, anc_positions_;
  std::vector<SiteIsometry> site_isos_;
  std::vector<std::vector<Gate>> layers_;
  Mat v_;
};

}  // namespace gapsim
