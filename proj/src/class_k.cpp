#include "gracecbf/class_k.hpp"

#include <cmath>

#include "gracecbf/errors.hpp"

namespace gracecbf {

ClassK ClassK::linear(double gain) {
  if (!std::isfinite(gain) || gain <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "class-K gain must be finite and positive");
  }
  return ClassK(Kind::Linear, gain);
}

}  // namespace gracecbf
