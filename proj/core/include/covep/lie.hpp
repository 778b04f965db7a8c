#pragma once

// Matrix Lie groups and their algebras in coordinates.
//
// Algebra elements are coordinate vectors in a fixed basis {E_a}. For so(3)
// and su(2) the basis satisfies [E_a, E_b] = eps_abc E_c; su(2) elements are
// realized as E_a = (1/2) * quaternion unit, so SU(2) is stored as unit
// quaternions and SO(3) as 3x3 rotation matrices. The abelian group R^k uses
// translations.

#include <Eigen/Dense>

#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace covep {

inline constexpr int kMaxAlgebraDim = 8;

using CoordStorage = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxAlgebraDim, 1>;
using AlgebraMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxAlgebraDim, kMaxAlgebraDim>;

/// Coordinate vector tagged by the space it lives in, so that algebra and
/// coalgebra elements cannot be mixed up silently.
template <class Tag>
class Coordinates {
 public:
  Coordinates() = default;
  explicit Coordinates(int m) : v_(CoordStorage::Zero(m)) {}
  explicit Coordinates(const CoordStorage& v) : v_(v) {}
  Coordinates(std::initializer_list<double> values) : v_(static_cast<Eigen::Index>(values.size())) {
    Eigen::Index k = 0;
    for (double x : values) v_[k++] = x;
  }

  static Coordinates zero(int m) { return Coordinates(m); }
  static Coordinates unit(int m, int k) {
    Coordinates e(m);
    e[k] = 1.0;
    return e;
  }

  int size() const { return static_cast<int>(v_.size()); }
  double operator[](int k) const { return v_[k]; }
  double& operator[](int k) { return v_[k]; }
  const CoordStorage& coords() const { return v_; }
  CoordStorage& coords() { return v_; }

  double max_abs() const { return v_.size() == 0 ? 0.0 : v_.cwiseAbs().maxCoeff(); }
  bool all_finite() const { return v_.allFinite(); }

  Coordinates& operator+=(const Coordinates& o) {
    v_ += o.v_;
    return *this;
  }
  Coordinates& operator-=(const Coordinates& o) {
    v_ -= o.v_;
    return *this;
  }
  Coordinates& operator*=(double s) {
    v_ *= s;
    return *this;
  }

  friend Coordinates operator+(Coordinates a, const Coordinates& b) { return a += b; }
  friend Coordinates operator-(Coordinates a, const Coordinates& b) { return a -= b; }
  friend Coordinates operator*(double s, Coordinates a) { return a *= s; }
  friend Coordinates operator*(Coordinates a, double s) { return a *= s; }
  friend Coordinates operator-(Coordinates a) { return a *= -1.0; }

 private:
  CoordStorage v_;
};

struct AlgebraTag;
struct CoalgebraTag;

/// xi^a in the basis {E_a}.
using AlgebraVector = Coordinates<AlgebraTag>;
/// mu_b on the dual basis {E^b}.
using CoalgebraVector = Coordinates<CoalgebraTag>;

/// Natural pairing <mu, a> = sum_a mu_a a^a.
double pairing(const CoalgebraVector& mu, const AlgebraVector& a);

enum class GroupKind { AbelianR, SO3, SU2 };

/// Point of the structure group. The payload depends on the group:
/// a translation vector, a rotation matrix or a unit quaternion.
class GroupElement {
 public:
  using Translation = CoordStorage;
  using Rotation = Eigen::Matrix3d;
  using Quaternion = Eigen::Quaterniond;

  GroupElement() : value_(Translation(0)) {}
  explicit GroupElement(Translation t) : value_(std::move(t)) {}
  explicit GroupElement(const Rotation& r) : value_(r) {}
  explicit GroupElement(const Quaternion& q) : value_(q) {}

  GroupKind kind() const;

  const Translation& translation() const { return std::get<Translation>(value_); }
  const Rotation& rotation() const { return std::get<Rotation>(value_); }
  const Quaternion& quaternion() const { return std::get<Quaternion>(value_); }

  /// Flat payload: translation components, row-major rotation, or (w,x,y,z).
  std::vector<double> payload() const;

  /// Largest absolute difference between the payloads of two elements of
  /// the same group.
  friend double payload_distance(const GroupElement& a, const GroupElement& b);

 private:
  std::variant<Translation, Rotation, Quaternion> value_;
};

double payload_distance(const GroupElement& a, const GroupElement& b);

/// Matrix Lie group descriptor: structure constants c^g_ab, a constant
/// metric h_ab on the algebra (extended by right translation), and the
/// group operations of the chosen representation.
class GroupModel {
 public:
  static GroupModel abelian(int k);
  static GroupModel so3();
  static GroupModel su2();

  /// Parses "abelian_r:k", "so3" or "su2".
  static GroupModel from_name(std::string_view name);

  /// Same group with a different algebra metric. Throws ConstructionError
  /// unless h is symmetric positive-definite.
  GroupModel with_metric(const AlgebraMatrix& h) const;

  GroupKind kind() const { return kind_; }
  int dim() const { return dim_; }
  /// Name in the form accepted by from_name.
  std::string name() const;

  double structure_constant(int gamma, int alpha, int beta) const {
    return c_[static_cast<std::size_t>((gamma * dim_ + alpha) * dim_ + beta)];
  }
  const AlgebraMatrix& metric() const { return h_; }
  const AlgebraMatrix& metric_inverse() const { return h_inv_; }

  /// True when h([a,b],c) + h(b,[a,c]) = 0 for all basis triples.
  bool is_ad_invariant(double tol = 1e-12) const;

  AlgebraVector bracket(const AlgebraVector& a, const AlgebraVector& b) const;
  /// ad*_a mu, defined by <ad*_a mu, z> = <mu, [a, z]>.
  CoalgebraVector coad(const AlgebraVector& a, const CoalgebraVector& mu) const;

  CoalgebraVector flat(const AlgebraVector& a) const;
  AlgebraVector sharp(const CoalgebraVector& mu) const;

  GroupElement identity() const;
  GroupElement exp(const AlgebraVector& a) const;
  /// Inverse of exp near the identity. Throws DomainError outside the
  /// injectivity radius (SO3: angle >= pi - 1e-6, SU2: w <= -1 + 1e-9).
  AlgebraVector log(const GroupElement& g) const;
  GroupElement multiply(const GroupElement& a, const GroupElement& b) const;
  GroupElement inverse(const GroupElement& a) const;

  /// Builds an element from a flat payload, checking the representation
  /// invariants within `tol` and then renormalizing.
  GroupElement from_payload(std::span<const double> payload, double tol = 1e-9) const;
  int payload_size() const;

  /// Checks the element invariants (orthogonality, unit norm) within tol.
  bool is_valid(const GroupElement& g, double tol) const;

 private:
  struct Term {
    int gamma, alpha, beta;
    double value;
  };

  GroupModel(GroupKind kind, int dim, std::vector<double> c);
  void check_structure() const;
  void require_dim(int m, const char* what) const;
  void require_kind(const GroupElement& g) const;

  GroupKind kind_;
  int dim_;
  std::vector<double> c_;
  std::vector<Term> terms_;
  AlgebraMatrix h_;
  AlgebraMatrix h_inv_;
};

/// Hat map R^3 -> so(3) for the basis with [E_a, E_b] = eps_abc E_c.
Eigen::Matrix3d hat(const Eigen::Vector3d& w);

}  // namespace covep
