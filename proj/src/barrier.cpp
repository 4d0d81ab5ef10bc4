#include "gracecbf/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gracecbf/errors.hpp"

namespace gracecbf {
namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, std::string(what) + " is not finite");
}

void require_finite_state(StateView x) {
  for (double v : x) require_finite(v, "state component");
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

bool all_zero(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](double e) { return e == 0.0; });
}

/// Turns lg . u >= rhs into a unit-normal half-space. A scalar input keeps
/// the normal at exactly +-1 so offsets are bit-identical to the hand-derived
/// bounds.
AffineControlConstraint normalize(const Vec& lg, double rhs) {
  if (all_zero(lg)) {
    throw Error(ErrorCode::DegenerateConstraint,
                "control does not appear in the constrained derivative at this state");
  }
  if (lg.size() == 1) {
    const double gain = lg[0];
    return {{gain > 0.0 ? 1.0 : -1.0}, rhs / std::abs(gain)};
  }
  const double norm = std::sqrt(dot(lg, lg));
  Vec normal(lg.size());
  std::transform(lg.begin(), lg.end(), normal.begin(), [norm](double e) { return e / norm; });
  return {std::move(normal), rhs / norm};
}

LieDerivatives lie_of(StateView x, const ScalarBarrier& h, const ControlAffineSystem& plant,
                      bool second_order) {
  return lie_derivatives(x, h.value, h.gradient, h.hessian, plant, second_order);
}

LieDerivatives lie_of(StateView x, const GracefulBarrier& hg, const ControlAffineSystem& plant,
                      bool second_order) {
  return lie_derivatives(
      x, [&hg](StateView s) { return hg.value(s); }, [&hg](StateView s) { return hg.gradient(s); },
      [&hg](StateView s) { return hg.hessian(s); }, plant, second_order);
}

void require_relative_degree_two(const LieDerivatives& lie) {
  if (!all_zero(lie.lg_h)) {
    throw Error(ErrorCode::DegenerateConstraint,
                "barrier has relative degree 1 here; a second-order constraint does not apply");
  }
}

/// h_g / (h_g + 1), the stiffening ratio; diverges at the catastrophe boundary.
double stiffening_ratio(double h_g) {
  if (!(h_g > -1.0)) {
    throw Error(ErrorCode::CatastropheBoundary,
                "graceful barrier at or beyond the catastrophe boundary (h_g = " +
                    std::to_string(h_g) + ")");
  }
  return h_g / (h_g + 1.0);
}

}  // namespace

ScalarBarrier ScalarBarrier::affine(Vec weights, double offset) {
  const std::size_t n = weights.size();
  ScalarBarrier b;
  b.value = [weights, offset](StateView x) {
    if (x.size() != weights.size()) throw Error(ErrorCode::DimensionMismatch, "barrier dimension");
    return dot(weights, x) + offset;
  };
  b.gradient = [weights](StateView) { return weights; };
  b.hessian = [n](StateView) { return Vec(n * n, 0.0); };
  return b;
}

ScalarBarrier ScalarBarrier::coordinate(std::size_t dim, std::size_t index, double threshold) {
  if (index >= dim) throw Error(ErrorCode::InvalidArgument, "coordinate index out of range");
  Vec w(dim, 0.0);
  w[index] = 1.0;
  // Written out rather than via affine() so h = x[i] - threshold is a single
  // rounding, matching hand evaluation.
  ScalarBarrier b = affine(w, -threshold);
  b.value = [dim, index, threshold](StateView x) {
    if (x.size() != dim) throw Error(ErrorCode::DimensionMismatch, "barrier dimension");
    return x[index] - threshold;
  };
  return b;
}

GracefulBarrier::GracefulBarrier(ScalarBarrier raw, double catastrophe_threshold,
                                 double primary_threshold)
    : raw_(std::move(raw)), a_(catastrophe_threshold), b_(primary_threshold) {
  require_finite(a_, "catastrophe threshold");
  require_finite(b_, "primary threshold");
  if (!(a_ < b_)) {
    throw Error(ErrorCode::InvalidArgument, "catastrophe threshold must lie below primary threshold");
  }
}

double GracefulBarrier::value(StateView x) const { return layer_transform(raw_.value(x), a_, b_); }

Vec GracefulBarrier::gradient(StateView x) const {
  Vec g = raw_.gradient(x);
  for (double& e : g) e /= layer_width();
  return g;
}

Vec GracefulBarrier::hessian(StateView x) const {
  Vec h = raw_.hessian(x);
  for (double& e : h) e /= layer_width();
  return h;
}

double layer_transform(double raw_value, double catastrophe_threshold, double primary_threshold) {
  if (!(catastrophe_threshold < primary_threshold)) {
    throw Error(ErrorCode::InvalidArgument, "layer ordering requires a < b");
  }
  return (raw_value - primary_threshold) / (primary_threshold - catastrophe_threshold);
}

std::string_view to_string(SafetyRegion region) {
  switch (region) {
    case SafetyRegion::Safe: return "Safe";
    case SafetyRegion::Danger: return "Danger";
    case SafetyRegion::Catastrophe: return "Catastrophe";
  }
  return "?";
}

SafetyRegion classify_region(double h_g) {
  if (std::isnan(h_g)) throw Error(ErrorCode::InvalidArgument, "cannot classify NaN");
  if (h_g >= 0.0) return SafetyRegion::Safe;
  if (h_g > -1.0) return SafetyRegion::Danger;
  return SafetyRegion::Catastrophe;
}

std::string_view to_string(BarrierFamily family) {
  switch (family) {
    case BarrierFamily::Zeroing: return "zeroing";
    case BarrierFamily::Reciprocal: return "reciprocal";
    case BarrierFamily::Exponential: return "exponential";
    case BarrierFamily::Graceful1: return "graceful1";
    case BarrierFamily::Graceful2: return "graceful2";
  }
  return "?";
}

BarrierSpec BarrierSpec::zeroing(ScalarBarrier h, ClassK alpha) {
  return BarrierSpec(BarrierFamily::Zeroing, std::move(h), alpha);
}

BarrierSpec BarrierSpec::reciprocal(ScalarBarrier h, ClassK alpha3) {
  return BarrierSpec(BarrierFamily::Reciprocal, std::move(h), alpha3);
}

BarrierSpec BarrierSpec::exponential(ScalarBarrier h, double gamma1, double gamma2) {
  if (!(std::isfinite(gamma1) && std::isfinite(gamma2) && gamma1 > 0.0 && gamma2 > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "exponential CBF gains must be positive");
  }
  return BarrierSpec(BarrierFamily::Exponential, std::move(h), ExponentialGains{gamma1, gamma2});
}

BarrierSpec BarrierSpec::graceful1(GracefulBarrier h_g, ClassK alpha) {
  return BarrierSpec(BarrierFamily::Graceful1, std::move(h_g), alpha);
}

BarrierSpec BarrierSpec::graceful2(GracefulBarrier h_g, double zeta, double omega_n) {
  if (!(std::isfinite(zeta) && std::isfinite(omega_n) && zeta > 0.0 && omega_n > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "graceful damping ratio and natural frequency must be positive");
  }
  return BarrierSpec(BarrierFamily::Graceful2, std::move(h_g), DampedGains{zeta, omega_n});
}

const ScalarBarrier& BarrierSpec::barrier() const {
  if (const auto* h = std::get_if<ScalarBarrier>(&barrier_)) return *h;
  throw Error(ErrorCode::InvalidArgument, "graceful spec has no plain barrier; use graceful()");
}

const GracefulBarrier& BarrierSpec::graceful() const {
  if (const auto* hg = std::get_if<GracefulBarrier>(&barrier_)) return *hg;
  throw Error(ErrorCode::InvalidArgument, "spec is not graceful");
}

const ClassK& BarrierSpec::alpha() const {
  if (const auto* k = std::get_if<ClassK>(&gains_)) return *k;
  throw Error(ErrorCode::InvalidArgument, "spec has no single class-K gain");
}

const ExponentialGains& BarrierSpec::exponential_gains() const {
  if (const auto* g = std::get_if<ExponentialGains>(&gains_)) return *g;
  throw Error(ErrorCode::InvalidArgument, "spec is not exponential");
}

const DampedGains& BarrierSpec::damped_gains() const {
  if (const auto* g = std::get_if<DampedGains>(&gains_)) return *g;
  throw Error(ErrorCode::InvalidArgument, "spec is not second-order graceful");
}

bool AffineControlConstraint::satisfied_by(std::span<const double> u) const {
  if (u.size() != normal.size()) throw Error(ErrorCode::DimensionMismatch, "control dimension");
  return dot(normal, u) >= offset;
}

double AffineControlConstraint::scalar_bound() const {
  if (normal.size() != 1 || normal[0] != 1.0) {
    throw Error(ErrorCode::DimensionMismatch, "constraint is not a scalar lower bound");
  }
  return offset;
}

LieDerivatives lie_derivatives(StateView x, const std::function<double(StateView)>& value,
                               const std::function<Vec(StateView)>& gradient,
                               const std::function<Vec(StateView)>& hessian,
                               const ControlAffineSystem& plant, bool second_order) {
  const std::size_t n = plant.state_dim();
  const std::size_t m = plant.input_dim();
  if (x.size() != n) throw Error(ErrorCode::DimensionMismatch, "state does not match plant");
  require_finite_state(x);

  LieDerivatives out;
  out.h = value(x);
  require_finite(out.h, "barrier value");
  const Vec grad = gradient(x);
  const Vec f = plant.drift(x);
  const Vec g = plant.input_map(x);

  out.lf_h = dot(grad, f);
  out.lg_h.assign(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) out.lg_h[j] += grad[i] * g[i * m + j];
  }
  if (!second_order) return out;

  // grad(Lf h)_k = sum_i H_ik f_i + sum_i grad_i dF_i/dx_k
  const Vec hess = hessian(x);
  const Vec jac = plant.drift_jacobian(x);
  Vec grad_lf(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) grad_lf[k] += hess[i * n + k] * f[i] + grad[i] * jac[i * n + k];
  }
  out.lf2_h = dot(grad_lf, f);
  out.lg_lf_h.assign(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < n; ++k) out.lg_lf_h[j] += grad_lf[k] * g[k * m + j];
  }
  return out;
}

AffineControlConstraint zeroing_constraint(StateView x, const BarrierSpec& spec,
                                           const ControlAffineSystem& plant) {
  if (spec.family() != BarrierFamily::Zeroing) throw Error(ErrorCode::InvalidArgument, "expected zeroing spec");
  const auto lie = lie_of(x, spec.barrier(), plant, false);
  return normalize(lie.lg_h, -spec.alpha()(lie.h) - lie.lf_h);
}

AffineControlConstraint reciprocal_constraint(StateView x, const BarrierSpec& spec,
                                              const ControlAffineSystem& plant) {
  if (spec.family() != BarrierFamily::Reciprocal) throw Error(ErrorCode::InvalidArgument, "expected reciprocal spec");
  const auto lie = lie_of(x, spec.barrier(), plant, false);
  if (!(lie.h > 0.0)) {
    throw Error(ErrorCode::OutsideDomain, "reciprocal barrier is only defined where h > 0");
  }
  // -hdot / h^2 <= alpha3(h)  <=>  hdot >= -alpha3(h) h^2
  return normalize(lie.lg_h, -spec.alpha()(lie.h) * lie.h * lie.h - lie.lf_h);
}

AffineControlConstraint exponential_constraint(StateView x, const BarrierSpec& spec,
                                               const ControlAffineSystem& plant) {
  if (spec.family() != BarrierFamily::Exponential) throw Error(ErrorCode::InvalidArgument, "expected exponential spec");
  const auto [g1, g2] = spec.exponential_gains();
  const auto lie = lie_of(x, spec.barrier(), plant, true);
  require_relative_degree_two(lie);
  return normalize(lie.lg_lf_h, -g1 * g2 * lie.h - (g1 + g2) * lie.lf_h - lie.lf2_h);
}

double high_order_h2(StateView x, double gamma1, const ScalarBarrier& h,
                     const ControlAffineSystem& plant) {
  require_finite(gamma1, "gamma1");
  const auto lie = lie_of(x, h, plant, false);
  require_relative_degree_two(lie);
  return lie.lf_h + gamma1 * lie.h;
}

AffineControlConstraint graceful1_constraint(StateView x, const BarrierSpec& spec,
                                             const ControlAffineSystem& plant) {
  if (spec.family() != BarrierFamily::Graceful1) throw Error(ErrorCode::InvalidArgument, "expected graceful1 spec");
  const auto lie = lie_of(x, spec.graceful(), plant, false);
  const double ratio = stiffening_ratio(lie.h);
  return normalize(lie.lg_h, -spec.alpha()(ratio) - lie.lf_h);
}

AffineControlConstraint graceful2_constraint(StateView x, const BarrierSpec& spec,
                                             const ControlAffineSystem& plant) {
  if (spec.family() != BarrierFamily::Graceful2) throw Error(ErrorCode::InvalidArgument, "expected graceful2 spec");
  const auto [zeta, wn] = spec.damped_gains();
  const auto lie = lie_of(x, spec.graceful(), plant, true);
  const double ratio = stiffening_ratio(lie.h);
  require_relative_degree_two(lie);
  return normalize(lie.lg_lf_h, -2.0 * zeta * wn * lie.lf_h - wn * wn * ratio - lie.lf2_h);
}

AffineControlConstraint safety_constraint(StateView x, const BarrierSpec& spec,
                                          const ControlAffineSystem& plant) {
  switch (spec.family()) {
    case BarrierFamily::Zeroing: return zeroing_constraint(x, spec, plant);
    case BarrierFamily::Reciprocal: return reciprocal_constraint(x, spec, plant);
    case BarrierFamily::Exponential: return exponential_constraint(x, spec, plant);
    case BarrierFamily::Graceful1: return graceful1_constraint(x, spec, plant);
    case BarrierFamily::Graceful2: return graceful2_constraint(x, spec, plant);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown barrier family");
}

DampingRoots characteristic_roots(double zeta, double omega_n) {
  require_finite(zeta, "zeta");
  require_finite(omega_n, "omega_n");
  if (!(omega_n > 0.0)) throw Error(ErrorCode::InvalidArgument, "natural frequency must be positive");
  if (zeta < 1.0) {
    throw Error(ErrorCode::ComplexRoots, "underdamped (zeta < 1) response has no real decay rates");
  }
  // Larger root directly, smaller from the product to avoid cancellation.
  const double fast = omega_n * (zeta + std::sqrt((zeta - 1.0) * (zeta + 1.0)));
  const double slow = omega_n * omega_n / fast;
  return {slow, fast};
}

}  // namespace gracecbf
