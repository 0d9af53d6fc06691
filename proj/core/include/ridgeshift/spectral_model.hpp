#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace ridgeshift {

/// One point mass of the covariance spectrum.
struct Atom {
  double variance;         // s > 0
  double weight;           // spectral weight rho >= 0
  double signal_fraction;  // pi >= 0, share of beta^T Sigma beta on this atom

  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Discrete covariance spectrum with per-atom signal allocation.
///
/// Atoms are kept in canonical order (strictly increasing variance); atoms
/// with zero weight and zero signal are dropped on construction. Weights and
/// signal fractions each sum to one.
class SpectralModel {
 public:
  static constexpr double kSumTolerance = 1e-9;

  /// Validates and canonicalizes. Throws InvalidArgument.
  explicit SpectralModel(std::vector<Atom> atoms);

  /// The identity covariance: a single atom (1, 1, 1).
  static SpectralModel isotropic();

  std::span<const Atom> atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  const Atom& operator[](std::size_t i) const { return atoms_[i]; }
  bool is_isotropic() const noexcept { return atoms_.size() == 1; }

  friend bool operator==(const SpectralModel&, const SpectralModel&) = default;

 private:
  std::vector<Atom> atoms_;
};

/// Concept shift on one atom: kappa = |beta~|/|beta|, cos_theta = alignment.
struct AtomShift {
  double kappa = 1.0;
  double cos_theta = 1.0;

  friend bool operator==(const AtomShift&, const AtomShift&) = default;
};

/// Per-atom concept shift, aligned with the canonical atom order of a spectrum.
class ShiftSpec {
 public:
  /// Throws InvalidArgument when kappa < 0, |cos_theta| > 1 or the length
  /// does not match `spectrum`.
  ShiftSpec(std::vector<AtomShift> shifts, const SpectralModel& spectrum);

  /// No shift on every atom of `spectrum`.
  static ShiftSpec identity(const SpectralModel& spectrum);

  std::span<const AtomShift> shifts() const noexcept { return shifts_; }
  std::size_t size() const noexcept { return shifts_.size(); }
  const AtomShift& operator[](std::size_t i) const { return shifts_[i]; }

  friend bool operator==(const ShiftSpec&, const ShiftSpec&) = default;

 private:
  std::vector<AtomShift> shifts_;
};

/// Builds a spectrum and a shift given in the same (user) atom order. Both
/// are permuted together into canonical order and zero atoms are dropped.
std::pair<SpectralModel, ShiftSpec> make_shifted_model(std::vector<Atom> atoms,
                                                       std::vector<AtomShift> shifts);

/// Mixture of robust (unchanged) and non-robust (zeroed) features with robust
/// fraction q: kappa = cos_theta = sqrt(q). At q = 0 the alignment is reported
/// as 1 since kappa multiplies every occurrence of it.
AtomShift shift_from_robust_fraction(double q);

/// Isotropic problem equivalent to ridge on whitened covariates.
struct WhitenedModel {
  SpectralModel spectrum;
  ShiftSpec shift;
};

/// Maps an anisotropic (spectrum, shift) to the single-atom model seen after
/// whitening: kappa_eff^2 = sum pi kappa^2, kappa_eff cos_eff = sum pi kappa cos.
WhitenedModel whiten_equivalent(const SpectralModel& spectrum, const ShiftSpec& shift);

}  // namespace ridgeshift
