#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <variant>

#include "gracecbf/class_k.hpp"
#include "gracecbf/plant.hpp"

namespace gracecbf {

/// Scalar barrier candidate h(x) together with its first and second
/// derivatives. The Hessian is row-major n x n and only consulted by
/// relative-degree-2 constraints.
struct ScalarBarrier {
  std::function<double(StateView)> value;
  std::function<Vec(StateView)> gradient;
  std::function<Vec(StateView)> hessian;

  /// h(x) = weights . x + offset.
  static ScalarBarrier affine(Vec weights, double offset);
  /// h(x) = x[index] - threshold in a state of dimension dim.
  static ScalarBarrier coordinate(std::size_t dim, std::size_t index, double threshold);
};

/// Two-layer barrier: the raw function H is mapped through
/// h_g = (H - b) / (b - a) so the primary boundary H = b lands on 0 and the
/// catastrophe boundary H = a lands on -1.
class GracefulBarrier {
 public:
  /// Throws InvalidArgument unless catastrophe < primary.
  GracefulBarrier(ScalarBarrier raw, double catastrophe_threshold, double primary_threshold);

  const ScalarBarrier& raw() const noexcept { return raw_; }
  double catastrophe_threshold() const noexcept { return a_; }
  double primary_threshold() const noexcept { return b_; }
  /// b - a; the factor dividing every derivative of H.
  double layer_width() const noexcept { return b_ - a_; }

  double value(StateView x) const;
  Vec gradient(StateView x) const;
  Vec hessian(StateView x) const;

 private:
  ScalarBarrier raw_;
  double a_;
  double b_;
};

/// Maps a raw barrier value into the graceful coordinate.
double layer_transform(double raw_value, double catastrophe_threshold, double primary_threshold);

enum class SafetyRegion { Safe, Danger, Catastrophe };

std::string_view to_string(SafetyRegion region);

/// Safe: h_g >= 0. Danger: -1 < h_g < 0. Catastrophe: h_g <= -1.
SafetyRegion classify_region(double h_g);

enum class BarrierFamily { Zeroing, Reciprocal, Exponential, Graceful1, Graceful2 };

std::string_view to_string(BarrierFamily family);

struct ExponentialGains {
  double gamma1;
  double gamma2;
};

struct DampedGains {
  double zeta;
  double omega_n;
};

/// One barrier together with the gains of the constraint family applied to
/// it. Build through the named constructors, which validate gains.
class BarrierSpec {
 public:
  static BarrierSpec zeroing(ScalarBarrier h, ClassK alpha);
  /// Canonical reciprocal barrier B = 1/h with Bdot <= alpha3(h).
  static BarrierSpec reciprocal(ScalarBarrier h, ClassK alpha3);
  static BarrierSpec exponential(ScalarBarrier h, double gamma1, double gamma2);
  static BarrierSpec graceful1(GracefulBarrier h_g, ClassK alpha);
  static BarrierSpec graceful2(GracefulBarrier h_g, double zeta, double omega_n);

  BarrierFamily family() const noexcept { return family_; }
  bool is_graceful() const noexcept {
    return family_ == BarrierFamily::Graceful1 || family_ == BarrierFamily::Graceful2;
  }
  /// Second-order families need a relative-degree-2 plant.
  bool is_second_order() const noexcept {
    return family_ == BarrierFamily::Exponential || family_ == BarrierFamily::Graceful2;
  }

  /// h for the zeroing / reciprocal / exponential families. Throws
  /// InvalidArgument for graceful specs.
  const ScalarBarrier& barrier() const;
  /// Throws InvalidArgument for non-graceful specs.
  const GracefulBarrier& graceful() const;

  /// Class-K gain of the first-order families (Zeroing, Reciprocal, Graceful1).
  const ClassK& alpha() const;
  const ExponentialGains& exponential_gains() const;
  const DampedGains& damped_gains() const;

 private:
  using Barrier = std::variant<ScalarBarrier, GracefulBarrier>;
  using Gains = std::variant<ClassK, ExponentialGains, DampedGains>;

  BarrierSpec(BarrierFamily family, Barrier barrier, Gains gains)
      : family_(family), barrier_(std::move(barrier)), gains_(gains) {}

  BarrierFamily family_;
  Barrier barrier_;
  Gains gains_;
};

/// Half-space normal . u >= offset in control space.
///
/// Constraints are normalized so that |normal| = 1; for a scalar input with
/// positive input gain the normal is exactly 1 and offset is u_sf.
struct AffineControlConstraint {
  Vec normal;
  double offset = 0.0;

  bool satisfied_by(std::span<const double> u) const;
  /// Offset for a scalar constraint with unit normal; throws
  /// DimensionMismatch otherwise.
  double scalar_bound() const;
};

/// hdot(x, u) >= -alpha(h(x)).
AffineControlConstraint zeroing_constraint(StateView x, const BarrierSpec& spec,
                                           const ControlAffineSystem& plant);

/// With B = 1/h: Bdot <= alpha3(h)  <=>  hdot >= -alpha3(h) h^2. Requires h > 0.
AffineControlConstraint reciprocal_constraint(StateView x, const BarrierSpec& spec,
                                              const ControlAffineSystem& plant);

/// hddot + (g1 + g2) hdot + g1 g2 h >= 0 for a relative-degree-2 barrier.
AffineControlConstraint exponential_constraint(StateView x, const BarrierSpec& spec,
                                               const ControlAffineSystem& plant);

/// h2 = hdot + gamma1 h, the second barrier of the exponential cascade.
double high_order_h2(StateView x, double gamma1, const ScalarBarrier& h,
                     const ControlAffineSystem& plant);

/// h_g dot >= -alpha(h_g / (h_g + 1)). Requires h_g > -1.
AffineControlConstraint graceful1_constraint(StateView x, const BarrierSpec& spec,
                                             const ControlAffineSystem& plant);

/// h_g ddot >= -2 zeta wn h_g dot - wn^2 h_g / (h_g + 1). Requires h_g > -1.
AffineControlConstraint graceful2_constraint(StateView x, const BarrierSpec& spec,
                                             const ControlAffineSystem& plant);

/// Dispatches on spec.family().
AffineControlConstraint safety_constraint(StateView x, const BarrierSpec& spec,
                                          const ControlAffineSystem& plant);

/// Decay rates of the second-order barrier response, i.e. -gamma1, -gamma2 are
/// the roots of s^2 + 2 zeta wn s + wn^2. Ordered gamma1 <= gamma2.
struct DampingRoots {
  double gamma1;
  double gamma2;
};

/// Throws ComplexRoots when zeta < 1.
DampingRoots characteristic_roots(double zeta, double omega_n);

/// Barrier value and Lie derivatives along a plant at one state.
struct LieDerivatives {
  double h = 0.0;
  double lf_h = 0.0;
  Vec lg_h;
  /// Second-order terms; filled only when requested.
  double lf2_h = 0.0;
  Vec lg_lf_h;
};

LieDerivatives lie_derivatives(StateView x, const std::function<double(StateView)>& value,
                               const std::function<Vec(StateView)>& gradient,
                               const std::function<Vec(StateView)>& hessian,
                               const ControlAffineSystem& plant, bool second_order);

}  // namespace gracecbf
