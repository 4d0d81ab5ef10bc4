#include "gracecbf/plant.hpp"

#include "gracecbf/errors.hpp"

namespace gracecbf {
namespace {

void require_dim(StateView x, std::size_t n) {
  if (x.size() != n) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected state of dimension " + std::to_string(n) + ", got " +
                    std::to_string(x.size()));
  }
}

}  // namespace

Vec ControlAffineSystem::dynamics(StateView x, std::span<const double> u) const {
  const std::size_t n = state_dim();
  const std::size_t m = input_dim();
  require_dim(x, n);
  if (u.size() != m) {
    throw Error(ErrorCode::DimensionMismatch, "control dimension does not match plant");
  }
  Vec dx = drift(x);
  const Vec g = input_map(x);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) dx[i] += g[i * m + j] * u[j];
  }
  return dx;
}

Vec FirstOrderIntegrator::drift(StateView x) const {
  require_dim(x, 1);
  return {0.0};
}

Vec FirstOrderIntegrator::input_map(StateView x) const {
  require_dim(x, 1);
  return {1.0};
}

Vec FirstOrderIntegrator::drift_jacobian(StateView x) const {
  require_dim(x, 1);
  return {0.0};
}

Vec DoubleIntegrator::drift(StateView x) const {
  require_dim(x, 2);
  return {x[1], 0.0};
}

Vec DoubleIntegrator::input_map(StateView x) const {
  require_dim(x, 2);
  return {0.0, 1.0};
}

Vec DoubleIntegrator::drift_jacobian(StateView x) const {
  require_dim(x, 2);
  return {0.0, 1.0,
          0.0, 0.0};
}

}  // namespace gracecbf
