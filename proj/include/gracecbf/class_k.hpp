#pragma once

namespace gracecbf {

/// Extended class-K function alpha: R -> R, alpha(0) = 0, strictly increasing.
/// Only the linear family alpha(r) = gain * r is provided.
class ClassK {
 public:
  enum class Kind { Linear };

  /// Throws InvalidArgument unless gain is finite and > 0.
  static ClassK linear(double gain);

  double operator()(double r) const noexcept { return gain_ * r; }

  Kind kind() const noexcept { return kind_; }
  double gain() const noexcept { return gain_; }

 private:
  ClassK(Kind kind, double gain) : kind_(kind), gain_(gain) {}

  Kind kind_;
  double gain_;
};

}  // namespace gracecbf
