#pragma once

// Fields over the trivial bundle P = M x G: group-valued sections, algebra
// valued forms, connection forms and their duals, together with the
// reduction map s -> ds s^{-1}, curvature, covariant derivatives, the
// constrained variation and reconstruction of a section from a flat form.

#include "covep/lie.hpp"
#include "covep/manifold.hpp"

#include <memory>
#include <vector>

namespace covep {

/// Trivialized principal bundle P = M x G.
class TrivialBundle {
 public:
  TrivialBundle(MetricGrid base, GroupModel group) : base_(std::move(base)), group_(std::move(group)) {}

  const MetricGrid& base() const { return base_; }
  const GroupModel& group() const { return group_; }
  int base_dim() const { return base_.dims(); }
  int algebra_dim() const { return group_.dim(); }
  std::size_t node_count() const { return base_.node_count(); }

 private:
  MetricGrid base_;
  GroupModel group_;
};

using BundlePtr = std::shared_ptr<const TrivialBundle>;

inline BundlePtr make_bundle(MetricGrid base, GroupModel group) {
  return std::make_shared<const TrivialBundle>(std::move(base), std::move(group));
}

/// Throws ContractViolation unless both bundles have the same lattice shape
/// and algebra dimension.
void require_compatible(const TrivialBundle& a, const TrivialBundle& b, const char* what);

/// Section s(x) of P, one group element per node.
class GroupField {
 public:
  explicit GroupField(BundlePtr bundle);
  GroupField(BundlePtr bundle, const GroupElement& fill);

  const BundlePtr& bundle() const { return bundle_; }
  const MetricGrid& grid() const { return bundle_->base(); }
  const GroupModel& group() const { return bundle_->group(); }
  std::size_t node_count() const { return values_.size(); }

  GroupElement& operator[](NodeIndex v) { return values_[v]; }
  const GroupElement& operator[](NodeIndex v) const { return values_[v]; }

 private:
  BundlePtr bundle_;
  std::vector<GroupElement> values_;
};

/// Common storage for per-node coordinate blocks tied to a bundle.
class BundleField {
 public:
  const BundlePtr& bundle() const { return bundle_; }
  const MetricGrid& grid() const { return bundle_->base(); }
  const GroupModel& group() const { return bundle_->group(); }
  std::size_t node_count() const { return values_.nodes(); }
  const NodeField& values() const { return values_; }
  NodeField& values() { return values_; }
  double max_abs() const { return values_.max_abs(); }

 protected:
  BundleField(BundlePtr bundle, int components)
      : bundle_(std::move(bundle)), values_(bundle_->node_count(), components) {}

  BundlePtr bundle_;
  NodeField values_;
};

/// Per-node m x n coordinates p^a_i of an algebra valued 1-form. The tag
/// separates reduced sections sigma from connection forms A.
template <class Tag>
class AlgebraOneFormT : public BundleField {
 public:
  explicit AlgebraOneFormT(BundlePtr bundle) : BundleField(bundle, bundle->algebra_dim() * bundle->base_dim()) {}

  int base_dim() const { return bundle_->base_dim(); }
  int algebra_dim() const { return bundle_->algebra_dim(); }

  double& operator()(NodeIndex v, int alpha, int i) { return values_(v, alpha * base_dim() + i); }
  double operator()(NodeIndex v, int alpha, int i) const { return values_(v, alpha * base_dim() + i); }

  AlgebraVector component(NodeIndex v, int i) const {
    AlgebraVector a(algebra_dim());
    for (int alpha = 0; alpha < algebra_dim(); ++alpha) a[alpha] = (*this)(v, alpha, i);
    return a;
  }
  void set_component(NodeIndex v, int i, const AlgebraVector& a) {
    for (int alpha = 0; alpha < algebra_dim(); ++alpha) (*this)(v, alpha, i) = a[alpha];
  }

  AlgebraOneFormT& operator+=(const AlgebraOneFormT& o) {
    require_compatible(*bundle_, *o.bundle_, "one-form +=");
    values_ += o.values_;
    return *this;
  }
  AlgebraOneFormT& operator-=(const AlgebraOneFormT& o) {
    require_compatible(*bundle_, *o.bundle_, "one-form -=");
    values_ -= o.values_;
    return *this;
  }
  AlgebraOneFormT& operator*=(double s) {
    values_ *= s;
    return *this;
  }
  friend AlgebraOneFormT operator+(AlgebraOneFormT a, const AlgebraOneFormT& b) { return a += b; }
  friend AlgebraOneFormT operator-(AlgebraOneFormT a, const AlgebraOneFormT& b) { return a -= b; }
  friend AlgebraOneFormT operator*(double s, AlgebraOneFormT a) { return a *= s; }
};

struct SectionFormTag;
struct ConnectionFormTag;

/// sigma in the trivial-connection chart (section of T*M (x) adP).
using AlgebraOneForm = AlgebraOneFormT<SectionFormTag>;
/// Local connection 1-form A of a reference connection; all zeros is the
/// trivial connection.
using ConnectionForm = AlgebraOneFormT<ConnectionFormTag>;

/// Per-node m-vector field; the tag separates algebra (eta) from coalgebra
/// (nu, EP residuals) values.
template <class Coord>
class CoordinateFieldT : public BundleField {
 public:
  explicit CoordinateFieldT(BundlePtr bundle) : BundleField(bundle, bundle->algebra_dim()) {}

  int algebra_dim() const { return bundle_->algebra_dim(); }

  Coord at(NodeIndex v) const {
    Coord a(algebra_dim());
    for (int k = 0; k < algebra_dim(); ++k) a[k] = values_(v, k);
    return a;
  }
  void set(NodeIndex v, const Coord& a) {
    for (int k = 0; k < algebra_dim(); ++k) values_(v, k) = a[k];
  }
  double& operator()(NodeIndex v, int k) { return values_(v, k); }
  double operator()(NodeIndex v, int k) const { return values_(v, k); }

  CoordinateFieldT& operator+=(const CoordinateFieldT& o) {
    require_compatible(*bundle_, *o.bundle_, "field +=");
    values_ += o.values_;
    return *this;
  }
  CoordinateFieldT& operator-=(const CoordinateFieldT& o) {
    require_compatible(*bundle_, *o.bundle_, "field -=");
    values_ -= o.values_;
    return *this;
  }
  CoordinateFieldT& operator*=(double s) {
    values_ *= s;
    return *this;
  }
  friend CoordinateFieldT operator+(CoordinateFieldT a, const CoordinateFieldT& b) { return a += b; }
  friend CoordinateFieldT operator-(CoordinateFieldT a, const CoordinateFieldT& b) { return a -= b; }
  friend CoordinateFieldT operator*(double s, CoordinateFieldT a) { return a *= s; }
};

/// xi(x) representing eta in C(adP).
using AlgebraField = CoordinateFieldT<AlgebraVector>;
/// psi(x) representing nu in C((adP)*).
using CoalgebraField = CoordinateFieldT<CoalgebraVector>;

/// Per-node n x m coordinates mu^{i b}. The tag separates sections of
/// TM (x) (adP)* (e.g. dl/dsigma) from covariant derivatives of coalgebra
/// fields, which live in T*M (x) (adP)*.
template <class Tag>
class CoalgebraTensorT : public BundleField {
 public:
  explicit CoalgebraTensorT(BundlePtr bundle) : BundleField(bundle, bundle->algebra_dim() * bundle->base_dim()) {}

  int base_dim() const { return bundle_->base_dim(); }
  int algebra_dim() const { return bundle_->algebra_dim(); }

  double& operator()(NodeIndex v, int i, int beta) { return values_(v, i * algebra_dim() + beta); }
  double operator()(NodeIndex v, int i, int beta) const { return values_(v, i * algebra_dim() + beta); }

  CoalgebraVector component(NodeIndex v, int i) const {
    CoalgebraVector mu(algebra_dim());
    for (int b = 0; b < algebra_dim(); ++b) mu[b] = (*this)(v, i, b);
    return mu;
  }
  void set_component(NodeIndex v, int i, const CoalgebraVector& mu) {
    for (int b = 0; b < algebra_dim(); ++b) (*this)(v, i, b) = mu[b];
  }

  CoalgebraTensorT& operator+=(const CoalgebraTensorT& o) {
    require_compatible(*bundle_, *o.bundle_, "coalgebra tensor +=");
    values_ += o.values_;
    return *this;
  }
  CoalgebraTensorT& operator*=(double s) {
    values_ *= s;
    return *this;
  }
  friend CoalgebraTensorT operator+(CoalgebraTensorT a, const CoalgebraTensorT& b) { return a += b; }
  friend CoalgebraTensorT operator*(double s, CoalgebraTensorT a) { return a *= s; }
};

struct CoalgebraVectorTag;
struct CoalgebraOneFormTag;

using CoalgebraVectorField = CoalgebraTensorT<CoalgebraVectorTag>;
using CoalgebraOneForm = CoalgebraTensorT<CoalgebraOneFormTag>;

/// F^g_{ij}, stored for i < j and expanded antisymmetrically on access.
class CurvatureField : public BundleField {
 public:
  explicit CurvatureField(BundlePtr bundle);

  int base_dim() const { return bundle_->base_dim(); }
  int algebra_dim() const { return bundle_->algebra_dim(); }
  static int pair_count(int n) { return n * (n - 1) / 2; }

  double operator()(NodeIndex v, int gamma, int i, int j) const;
  void set(NodeIndex v, int gamma, int i, int j, double value);

  /// max |F| over nodes; on Dirichlet grids `interior_only` skips boundary
  /// nodes, whose derivatives use one-sided stencils.
  double max_abs(bool interior_only = false) const;

 private:
  int pair_index(int i, int j) const;
};

/// Right logarithmic derivative p_i = (d_i s) s^{-1} by central
/// log-differences. Dirichlet boundaries use the first-order one-sided
/// log-difference, which keeps the discrete energy and the EP residual in
/// summation-by-parts duality. Throws DomainError naming the node and axis if
/// neighbours are beyond the log injectivity radius.
AlgebraOneForm reduce_jet(const GroupField& s);

/// F^g_{ij} = d_j p^g_i - d_i p^g_j + c^g_ab p^a_i p^b_j.
CurvatureField curvature(const AlgebraOneForm& sigma);

/// (nabla eta)_i = d_i xi + [A_i, xi].
AlgebraOneForm covariant_derivative_ad(const AlgebraField& eta, const ConnectionForm& a);

/// (nabla~ nu)_i = d_i psi - ad*_{A_i} psi.
CoalgebraOneForm covariant_derivative_coad(const CoalgebraField& nu, const ConnectionForm& a);

/// delta sigma = nabla^H eta - [sigma^H, eta] with sigma^H = sigma + A.
AlgebraOneForm variation_delta_sigma(const AlgebraOneForm& sigma, const AlgebraField& eta, const ConnectionForm& a);

/// sigma measured relative to the connection: p_i + A_i.
AlgebraOneForm sigma_h(const AlgebraOneForm& sigma, const ConnectionForm& a);

ConnectionForm zero_connection(const BundlePtr& bundle);

/// Integrates a flat sigma along the axis-lexicographic spanning tree rooted
/// at `base_node` with midpoint exponential steps, s(x + h e_i) =
/// exp(h mid(p_i)) s(x). Throws FlatnessError if max |curvature| exceeds
/// `flatness_tol`.
GroupField reconstruct_section(const AlgebraOneForm& sigma, const GroupElement& base_value, NodeIndex base_node,
                               double flatness_tol = 1e-3);

}  // namespace covep
