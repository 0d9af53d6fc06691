#include "ridgeshift/problem.hpp"

#include <cmath>

#include "ridgeshift/errors.hpp"

namespace ridgeshift {

Penalty Penalty::fixed(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw InvalidArgument("lambda must be positive and finite");
  }
  Penalty p;
  p.value_ = value;
  return p;
}

void ProblemSpec::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be positive");
  if (!(snr > 0.0) || !std::isfinite(snr)) throw InvalidArgument("snr must be positive");
  if (!(signal > 0.0) || !std::isfinite(signal)) throw InvalidArgument("signal must be positive");
  if (shift.size() != spectrum.size()) {
    throw InvalidArgument("shift does not match the spectrum atom count");
  }
}

}  // namespace ridgeshift
