#include "gracecbf/filter.hpp"

#include <cmath>
#include <numeric>

#include "gracecbf/errors.hpp"

namespace gracecbf {
namespace {

void require_positive(double v, const char* name) {
  if (!(std::isfinite(v) && v > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be finite and positive");
  }
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

void validate(const BaselineLaw& law) {
  std::visit(Overloaded{[](const ProportionalPosition& p) { require_positive(p.k, "k"); },
                        [](const PositionVelocityFeedback& pd) {
                          require_positive(pd.k1, "k1");
                          require_positive(pd.k2, "k2");
                        }},
             law);
}

double baseline_control(StateView x, const BaselineLaw& law) {
  return std::visit(
      Overloaded{[&](const ProportionalPosition& p) {
                   if (x.size() != 1) throw Error(ErrorCode::DimensionMismatch, "P law needs a 1-d state");
                   return -p.k * (x[0] - p.target);
                 },
                 [&](const PositionVelocityFeedback& pd) {
                   if (x.size() != 2) throw Error(ErrorCode::DimensionMismatch, "PD law needs a 2-d state");
                   return -pd.k1 * (x[0] - pd.target) - pd.k2 * x[1];
                 }},
      law);
}

FilterResult filter_scalar(double u_d, const AffineControlConstraint& constraint) {
  const double u_sf = constraint.scalar_bound();
  const bool active = u_sf > u_d;
  return {active ? u_sf : u_d, active, u_d, u_sf};
}

VectorFilterResult filter_projection(std::span<const double> u_d,
                                     const AffineControlConstraint& constraint) {
  const auto& a = constraint.normal;
  if (a.size() != u_d.size()) throw Error(ErrorCode::DimensionMismatch, "control dimension");
  const double c = constraint.offset;
  const double a_dot_u = std::inner_product(a.begin(), a.end(), u_d.begin(), 0.0);
  const double a_dot_a = std::inner_product(a.begin(), a.end(), a.begin(), 0.0);

  VectorFilterResult out;
  out.u_d.assign(u_d.begin(), u_d.end());
  out.u_sf = c;
  out.active = c > a_dot_u;
  if (!out.active) {
    out.u_star = out.u_d;
    return out;
  }
  if (a_dot_a == 0.0) throw Error(ErrorCode::ZeroNormal, "infeasible constraint with zero normal");
  if (a.size() == 1) {
    // Land exactly on the boundary point rather than u_d + (c - a u_d)/a,
    // which can round off it.
    out.u_star = {c / a[0]};
    return out;
  }
  const double step = (c - a_dot_u) / a_dot_a;
  out.u_star = out.u_d;
  for (std::size_t i = 0; i < a.size(); ++i) out.u_star[i] += step * a[i];
  return out;
}

}  // namespace gracecbf
