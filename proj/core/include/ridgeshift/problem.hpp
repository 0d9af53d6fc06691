#pragma once

#include <optional>

#include "ridgeshift/spectral_model.hpp"

namespace ridgeshift {

/// Ridge penalty: a fixed positive value or "tune for in-distribution risk".
class Penalty {
 public:
  static Penalty optimal() noexcept { return Penalty(); }
  /// Throws InvalidArgument unless value > 0 and finite.
  static Penalty fixed(double value);

  bool is_optimal() const noexcept { return !value_.has_value(); }
  /// Requires !is_optimal().
  double value() const { return *value_; }

  friend bool operator==(const Penalty&, const Penalty&) = default;

 private:
  Penalty() = default;
  std::optional<double> value_;
};

/// Everything needed for one asymptotic risk evaluation.
struct ProblemSpec {
  SpectralModel spectrum = SpectralModel::isotropic();
  ShiftSpec shift = ShiftSpec::identity(SpectralModel::isotropic());
  double gamma = 1.0;   // P / N
  double snr = 1.0;     // beta^T Sigma beta / sigma^2
  Penalty penalty = Penalty::optimal();
  double signal = 1.0;  // beta^T Sigma beta

  double noise_variance() const noexcept { return signal / snr; }

  /// Throws InvalidArgument on gamma, snr or signal out of range, or a shift
  /// that does not match the spectrum.
  void validate() const;
};

}  // namespace ridgeshift
