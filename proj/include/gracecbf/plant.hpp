#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace gracecbf {

using StateView = std::span<const double>;
using Vec = std::vector<double>;

/// Control-affine plant xdot = f(x) + g(x) u.
///
/// Matrices are returned row-major: input_map() is n x m, drift_jacobian()
/// is n x n. The Jacobian is needed to form second Lie derivatives of a
/// barrier for relative-degree-2 constraints.
class ControlAffineSystem {
 public:
  virtual ~ControlAffineSystem() = default;

  virtual std::string_view name() const = 0;
  virtual std::size_t state_dim() const = 0;
  virtual std::size_t input_dim() const = 0;

  virtual Vec drift(StateView x) const = 0;
  virtual Vec input_map(StateView x) const = 0;
  virtual Vec drift_jacobian(StateView x) const = 0;

  /// f(x) + g(x) u. Throws DimensionMismatch on bad sizes.
  Vec dynamics(StateView x, std::span<const double> u) const;
};

/// xdot = u (velocity-actuated point mass).
class FirstOrderIntegrator final : public ControlAffineSystem {
 public:
  std::string_view name() const override { return "first-order-integrator"; }
  std::size_t state_dim() const override { return 1; }
  std::size_t input_dim() const override { return 1; }
  Vec drift(StateView x) const override;
  Vec input_map(StateView x) const override;
  Vec drift_jacobian(StateView x) const override;
};

/// xddot = u with state (x, xdot).
class DoubleIntegrator final : public ControlAffineSystem {
 public:
  std::string_view name() const override { return "double-integrator"; }
  std::size_t state_dim() const override { return 2; }
  std::size_t input_dim() const override { return 1; }
  Vec drift(StateView x) const override;
  Vec input_map(StateView x) const override;
  Vec drift_jacobian(StateView x) const override;
};

}  // namespace gracecbf
