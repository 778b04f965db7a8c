#include "covep/lie.hpp"

#include "covep/errors.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace covep {

namespace {

constexpr double kSo3Drift = 1e-11;

// eps_abc as a dense m^3 array indexed (gamma, alpha, beta).
std::vector<double> levi_civita_constants() {
  std::vector<double> c(27, 0.0);
  auto at = [&](int g, int a, int b) -> double& { return c[static_cast<std::size_t>((g * 3 + a) * 3 + b)]; };
  at(2, 0, 1) = 1.0;
  at(2, 1, 0) = -1.0;
  at(0, 1, 2) = 1.0;
  at(0, 2, 1) = -1.0;
  at(1, 2, 0) = 1.0;
  at(1, 0, 2) = -1.0;
  return c;
}

Eigen::Matrix3d orthonormalize(const Eigen::Matrix3d& r) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d q = svd.matrixU() * svd.matrixV().transpose();
  if (q.determinant() < 0) {
    Eigen::Matrix3d u = svd.matrixU();
    u.col(2) *= -1.0;
    q = u * svd.matrixV().transpose();
  }
  return q;
}

double orthogonality_drift(const Eigen::Matrix3d& r) {
  return (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
}

}  // namespace

double pairing(const CoalgebraVector& mu, const AlgebraVector& a) {
  if (mu.size() != a.size()) throw ContractViolation("pairing: dimension mismatch");
  return mu.coords().dot(a.coords());
}

Eigen::Matrix3d hat(const Eigen::Vector3d& w) {
  Eigen::Matrix3d m;
  m << 0.0, -w.z(), w.y(), w.z(), 0.0, -w.x(), -w.y(), w.x(), 0.0;
  return m;
}

GroupKind GroupElement::kind() const {
  switch (value_.index()) {
    case 0:
      return GroupKind::AbelianR;
    case 1:
      return GroupKind::SO3;
    default:
      return GroupKind::SU2;
  }
}

std::vector<double> GroupElement::payload() const {
  switch (kind()) {
    case GroupKind::AbelianR: {
      const auto& t = translation();
      return {t.data(), t.data() + t.size()};
    }
    case GroupKind::SO3: {
      const auto& r = rotation();
      std::vector<double> out;
      out.reserve(9);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out.push_back(r(i, j));
      return out;
    }
    case GroupKind::SU2: {
      const auto& q = quaternion();
      return {q.w(), q.x(), q.y(), q.z()};
    }
  }
  return {};
}

double payload_distance(const GroupElement& a, const GroupElement& b) {
  if (a.kind() != b.kind()) throw ContractViolation("payload_distance: elements of different groups");
  switch (a.kind()) {
    case GroupKind::AbelianR:
      if (a.translation().size() != b.translation().size())
        throw ContractViolation("payload_distance: dimension mismatch");
      return a.translation().size() == 0 ? 0.0 : (a.translation() - b.translation()).cwiseAbs().maxCoeff();
    case GroupKind::SO3:
      return (a.rotation() - b.rotation()).cwiseAbs().maxCoeff();
    case GroupKind::SU2:
      return (a.quaternion().coeffs() - b.quaternion().coeffs()).cwiseAbs().maxCoeff();
  }
  return 0.0;
}

GroupModel::GroupModel(GroupKind kind, int dim, std::vector<double> c)
    : kind_(kind), dim_(dim), c_(std::move(c)) {
  for (int g = 0; g < dim_; ++g)
    for (int a = 0; a < dim_; ++a)
      for (int b = 0; b < dim_; ++b)
        if (double v = structure_constant(g, a, b); v != 0.0) terms_.push_back({g, a, b, v});
  h_ = AlgebraMatrix::Identity(dim_, dim_);
  h_inv_ = h_;
  check_structure();
}

GroupModel GroupModel::abelian(int k) {
  if (k < 1 || k > kMaxAlgebraDim)
    throw ConstructionError("abelian_r: dimension must be in [1, " + std::to_string(kMaxAlgebraDim) + "]");
  return GroupModel(GroupKind::AbelianR, k, std::vector<double>(static_cast<std::size_t>(k * k * k), 0.0));
}

GroupModel GroupModel::so3() { return GroupModel(GroupKind::SO3, 3, levi_civita_constants()); }

GroupModel GroupModel::su2() { return GroupModel(GroupKind::SU2, 3, levi_civita_constants()); }

GroupModel GroupModel::from_name(std::string_view name) {
  if (name == "so3") return so3();
  if (name == "su2") return su2();
  constexpr std::string_view prefix = "abelian_r:";
  if (name.substr(0, prefix.size()) == prefix) {
    auto digits = name.substr(prefix.size());
    int k = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty())
      throw ConstructionError("group name: bad abelian dimension in '" + std::string(name) + "'");
    return abelian(k);
  }
  throw ConstructionError("group name: unknown group '" + std::string(name) + "'");
}

std::string GroupModel::name() const {
  switch (kind_) {
    case GroupKind::AbelianR:
      return "abelian_r:" + std::to_string(dim_);
    case GroupKind::SO3:
      return "so3";
    case GroupKind::SU2:
      return "su2";
  }
  return {};
}

GroupModel GroupModel::with_metric(const AlgebraMatrix& h) const {
  if (h.rows() != dim_ || h.cols() != dim_)
    throw ConstructionError("algebra metric: expected a " + std::to_string(dim_) + "x" + std::to_string(dim_) +
                            " matrix");
  if (!h.allFinite()) throw ConstructionError("algebra metric: non-finite entry");
  if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-14 * (1.0 + h.cwiseAbs().maxCoeff()))
    throw ConstructionError("algebra metric: not symmetric");
  Eigen::SelfAdjointEigenSolver<AlgebraMatrix> eig(h);
  if (eig.eigenvalues().minCoeff() <= 0.0) throw ConstructionError("algebra metric: not positive-definite");
  GroupModel out = *this;
  out.h_ = h;
  out.h_inv_ = h.inverse();
  if ((out.h_ * out.h_inv_ - AlgebraMatrix::Identity(dim_, dim_)).cwiseAbs().maxCoeff() > 1e-12)
    throw ConstructionError("algebra metric: too ill-conditioned to invert");
  return out;
}

void GroupModel::check_structure() const {
  const int m = dim_;
  for (int g = 0; g < m; ++g)
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        if (structure_constant(g, a, b) != -structure_constant(g, b, a))
          throw ConstructionError("structure constants not antisymmetric");
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int g = 0; g < m; ++g)
        for (int d = 0; d < m; ++d) {
          double s = 0.0;
          for (int r = 0; r < m; ++r)
            s += structure_constant(r, a, b) * structure_constant(d, r, g) +
                 structure_constant(r, b, g) * structure_constant(d, r, a) +
                 structure_constant(r, g, a) * structure_constant(d, r, b);
          if (std::abs(s) > 1e-12) throw ConstructionError("structure constants violate the Jacobi identity");
        }
}

bool GroupModel::is_ad_invariant(double tol) const {
  for (int a = 0; a < dim_; ++a)
    for (int b = 0; b < dim_; ++b)
      for (int c = 0; c < dim_; ++c) {
        auto ea = AlgebraVector::unit(dim_, a);
        auto eb = AlgebraVector::unit(dim_, b);
        auto ec = AlgebraVector::unit(dim_, c);
        double lhs = bracket(ea, eb).coords().dot(h_ * ec.coords()) + eb.coords().dot(h_ * bracket(ea, ec).coords());
        if (std::abs(lhs) > tol) return false;
      }
  return true;
}

void GroupModel::require_dim(int m, const char* what) const {
  if (m != dim_) {
    std::ostringstream os;
    os << what << ": expected algebra dimension " << dim_ << ", got " << m;
    throw ContractViolation(os.str());
  }
}

void GroupModel::require_kind(const GroupElement& g) const {
  if (g.kind() != kind_) throw ContractViolation("group element belongs to a different group");
  if (kind_ == GroupKind::AbelianR && g.translation().size() != dim_)
    throw ContractViolation("abelian element has the wrong dimension");
}

AlgebraVector GroupModel::bracket(const AlgebraVector& a, const AlgebraVector& b) const {
  require_dim(a.size(), "bracket");
  require_dim(b.size(), "bracket");
  AlgebraVector out(dim_);
  for (const auto& t : terms_) out[t.gamma] += t.value * a[t.alpha] * b[t.beta];
  return out;
}

CoalgebraVector GroupModel::coad(const AlgebraVector& a, const CoalgebraVector& mu) const {
  require_dim(a.size(), "coad");
  require_dim(mu.size(), "coad");
  CoalgebraVector out(dim_);
  for (const auto& t : terms_) out[t.beta] += mu[t.gamma] * t.value * a[t.alpha];
  return out;
}

CoalgebraVector GroupModel::flat(const AlgebraVector& a) const {
  require_dim(a.size(), "flat");
  return CoalgebraVector(CoordStorage(h_.transpose() * a.coords()));
}

AlgebraVector GroupModel::sharp(const CoalgebraVector& mu) const {
  require_dim(mu.size(), "sharp");
  return AlgebraVector(CoordStorage(h_inv_.transpose() * mu.coords()));
}

GroupElement GroupModel::identity() const {
  switch (kind_) {
    case GroupKind::AbelianR:
      return GroupElement(GroupElement::Translation(CoordStorage::Zero(dim_)));
    case GroupKind::SO3:
      return GroupElement(Eigen::Matrix3d(Eigen::Matrix3d::Identity()));
    case GroupKind::SU2:
      return GroupElement(Eigen::Quaterniond::Identity());
  }
  return {};
}

GroupElement GroupModel::exp(const AlgebraVector& a) const {
  require_dim(a.size(), "exp");
  switch (kind_) {
    case GroupKind::AbelianR:
      return GroupElement(GroupElement::Translation(a.coords()));
    case GroupKind::SO3: {
      const Eigen::Vector3d w(a[0], a[1], a[2]);
      const double theta2 = w.squaredNorm();
      const double theta = std::sqrt(theta2);
      double s, c;  // sin(t)/t, (1 - cos t)/t^2
      if (theta < 1e-4) {
        s = 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0;
        c = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
      } else {
        s = std::sin(theta) / theta;
        c = (1.0 - std::cos(theta)) / theta2;
      }
      const Eigen::Matrix3d k = hat(w);
      return GroupElement(Eigen::Matrix3d(Eigen::Matrix3d::Identity() + s * k + c * k * k));
    }
    case GroupKind::SU2: {
      const Eigen::Vector3d w(a[0], a[1], a[2]);
      const double theta2 = w.squaredNorm();
      const double theta = std::sqrt(theta2);
      double s;  // sin(t/2)/t
      if (theta < 1e-4)
        s = 0.5 - theta2 / 48.0 + theta2 * theta2 / 3840.0;
      else
        s = std::sin(0.5 * theta) / theta;
      Eigen::Quaterniond q(std::cos(0.5 * theta), s * w.x(), s * w.y(), s * w.z());
      q.normalize();
      return GroupElement(q);
    }
  }
  return {};
}

AlgebraVector GroupModel::log(const GroupElement& g) const {
  require_kind(g);
  switch (kind_) {
    case GroupKind::AbelianR:
      return AlgebraVector(g.translation());
    case GroupKind::SO3: {
      const auto& r = g.rotation();
      const Eigen::Vector3d v(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
      const double sin_t = 0.5 * v.norm();
      const double cos_t = 0.5 * (r.trace() - 1.0);
      const double theta = std::atan2(sin_t, cos_t);
      if (theta >= std::numbers::pi - 1e-6) {
        std::ostringstream os;
        os << "so3 log: rotation angle " << theta << " outside the injectivity radius";
        throw DomainError(os.str());
      }
      double f;  // theta / (2 sin theta)
      if (theta < 1e-4)
        f = 0.5 * (1.0 + theta * theta / 6.0 + 7.0 * theta * theta * theta * theta / 360.0);
      else
        f = theta / (2.0 * sin_t);
      const Eigen::Vector3d w = f * v;
      return AlgebraVector{w.x(), w.y(), w.z()};
    }
    case GroupKind::SU2: {
      const auto& q = g.quaternion();
      if (q.w() <= -1.0 + 1e-9) {
        std::ostringstream os;
        os << "su2 log: quaternion scalar part " << q.w() << " outside the injectivity radius";
        throw DomainError(os.str());
      }
      const Eigen::Vector3d v = q.vec();
      const double vn = v.norm();
      const double theta = 2.0 * std::atan2(vn, q.w());
      double f;  // theta / |v|
      if (vn < 1e-8)
        f = 2.0 / q.w();
      else
        f = theta / vn;
      const Eigen::Vector3d w = f * v;
      return AlgebraVector{w.x(), w.y(), w.z()};
    }
  }
  return {};
}

GroupElement GroupModel::multiply(const GroupElement& a, const GroupElement& b) const {
  require_kind(a);
  require_kind(b);
  switch (kind_) {
    case GroupKind::AbelianR:
      return GroupElement(GroupElement::Translation(a.translation() + b.translation()));
    case GroupKind::SO3: {
      Eigen::Matrix3d r = a.rotation() * b.rotation();
      if (orthogonality_drift(r) > kSo3Drift) r = orthonormalize(r);
      return GroupElement(r);
    }
    case GroupKind::SU2: {
      Eigen::Quaterniond q = a.quaternion() * b.quaternion();
      q.normalize();
      return GroupElement(q);
    }
  }
  return {};
}

GroupElement GroupModel::inverse(const GroupElement& a) const {
  require_kind(a);
  switch (kind_) {
    case GroupKind::AbelianR:
      return GroupElement(GroupElement::Translation(-a.translation()));
    case GroupKind::SO3:
      return GroupElement(Eigen::Matrix3d(a.rotation().transpose()));
    case GroupKind::SU2:
      return GroupElement(a.quaternion().conjugate());
  }
  return {};
}

int GroupModel::payload_size() const {
  switch (kind_) {
    case GroupKind::AbelianR:
      return dim_;
    case GroupKind::SO3:
      return 9;
    case GroupKind::SU2:
      return 4;
  }
  return 0;
}

bool GroupModel::is_valid(const GroupElement& g, double tol) const {
  if (g.kind() != kind_) return false;
  switch (kind_) {
    case GroupKind::AbelianR:
      return g.translation().size() == dim_ && g.translation().allFinite();
    case GroupKind::SO3:
      return g.rotation().allFinite() && orthogonality_drift(g.rotation()) <= tol &&
             std::abs(g.rotation().determinant() - 1.0) <= tol;
    case GroupKind::SU2:
      return g.quaternion().coeffs().allFinite() && std::abs(g.quaternion().squaredNorm() - 1.0) <= tol;
  }
  return false;
}

GroupElement GroupModel::from_payload(std::span<const double> payload, double tol) const {
  if (static_cast<int>(payload.size()) != payload_size())
    throw InputError("group element payload: expected " + std::to_string(payload_size()) + " components, got " +
                     std::to_string(payload.size()));
  GroupElement g;
  switch (kind_) {
    case GroupKind::AbelianR: {
      CoordStorage t(dim_);
      for (int k = 0; k < dim_; ++k) t[k] = payload[static_cast<std::size_t>(k)];
      g = GroupElement(t);
      break;
    }
    case GroupKind::SO3: {
      Eigen::Matrix3d r;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = payload[static_cast<std::size_t>(3 * i + j)];
      g = GroupElement(r);
      break;
    }
    case GroupKind::SU2:
      g = GroupElement(Eigen::Quaterniond(payload[0], payload[1], payload[2], payload[3]));
      break;
  }
  if (!is_valid(g, tol)) throw InputError("group element payload violates the " + name() + " invariants");
  if (kind_ == GroupKind::SO3 && orthogonality_drift(g.rotation()) > kSo3Drift)
    return GroupElement(orthonormalize(g.rotation()));
  if (kind_ == GroupKind::SU2) return GroupElement(g.quaternion().normalized());
  return g;
}

}  // namespace covep
