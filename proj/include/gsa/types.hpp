#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gsa {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class NormKind { L2, LInf, L1 };

inline double norm(const Eigen::Ref<const Vector>& v, NormKind kind) {
  switch (kind) {
    case NormKind::L2:
      return v.norm();
    case NormKind::LInf:
      return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
    case NormKind::L1:
      return v.cwiseAbs().sum();
  }
  return v.norm();
}

inline bool all_finite(const Eigen::Ref<const Vector>& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) return false;
  }
  return true;
}

std::string_view to_string(NormKind kind);
NormKind parse_norm(std::string_view name);

/// Thrown when a constructor or operation receives parameters outside its
/// documented domain. The message names the offending parameter.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace gsa
