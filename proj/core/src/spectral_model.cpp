#include "ridgeshift/spectral_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ridgeshift/errors.hpp"

namespace ridgeshift {
namespace {

constexpr double kCanonicalTolerance = 1e-12;

void check_atom(const Atom& a) {
  if (!std::isfinite(a.variance) || !std::isfinite(a.weight) ||
      !std::isfinite(a.signal_fraction)) {
    throw InvalidArgument("spectrum: non-finite atom entry");
  }
  if (a.variance <= 0.0) {
    std::ostringstream os;
    os << "spectrum: atom variance must be positive, got " << a.variance;
    throw InvalidArgument(os.str());
  }
  if (a.weight < 0.0) throw InvalidArgument("spectrum: negative spectral weight");
  if (a.signal_fraction < 0.0) throw InvalidArgument("spectrum: negative signal fraction");
}

// Sorts the index set by variance and drops atoms carrying neither weight nor signal.
std::vector<std::size_t> canonical_order(const std::vector<Atom>& atoms) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].weight != 0.0 || atoms[i].signal_fraction != 0.0) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return atoms[a].variance < atoms[b].variance;
  });
  return order;
}

void check_shift(const AtomShift& s) {
  if (!std::isfinite(s.kappa) || !std::isfinite(s.cos_theta)) {
    throw InvalidArgument("shift: non-finite entry");
  }
  if (s.kappa < 0.0) throw InvalidArgument("shift: kappa must be >= 0");
  if (std::abs(s.cos_theta) > 1.0) throw InvalidArgument("shift: |cos_theta| must be <= 1");
}

}  // namespace

SpectralModel::SpectralModel(std::vector<Atom> atoms) {
  if (atoms.empty()) throw InvalidArgument("spectrum: at least one atom is required");
  for (const auto& a : atoms) check_atom(a);

  for (std::size_t i : canonical_order(atoms)) atoms_.push_back(atoms[i]);
  if (atoms_.empty()) throw InvalidArgument("spectrum: all atoms have zero weight and signal");

  for (std::size_t i = 1; i < atoms_.size(); ++i) {
    if (atoms_[i].variance == atoms_[i - 1].variance) {
      std::ostringstream os;
      os << "spectrum: duplicate atom variance " << atoms_[i].variance;
      throw InvalidArgument(os.str());
    }
  }

  double weight_sum = 0.0;
  double signal_sum = 0.0;
  for (const auto& a : atoms_) {
    weight_sum += a.weight;
    signal_sum += a.signal_fraction;
  }
  if (std::abs(weight_sum - 1.0) > kSumTolerance) {
    std::ostringstream os;
    os << "spectrum: spectral weights sum to " << weight_sum << ", expected 1";
    throw InvalidArgument(os.str());
  }
  if (std::abs(signal_sum - 1.0) > kSumTolerance) {
    std::ostringstream os;
    os << "spectrum: signal fractions sum to " << signal_sum << ", expected 1";
    throw InvalidArgument(os.str());
  }
  // Renormalize only when outside the canonical tolerance so that
  // re-canonicalizing a canonical model leaves every bit unchanged.
  if (std::abs(weight_sum - 1.0) > kCanonicalTolerance) {
    for (auto& a : atoms_) a.weight /= weight_sum;
  }
  if (std::abs(signal_sum - 1.0) > kCanonicalTolerance) {
    for (auto& a : atoms_) a.signal_fraction /= signal_sum;
  }
}

SpectralModel SpectralModel::isotropic() { return SpectralModel({{1.0, 1.0, 1.0}}); }

ShiftSpec::ShiftSpec(std::vector<AtomShift> shifts, const SpectralModel& spectrum)
    : shifts_(std::move(shifts)) {
  if (shifts_.size() != spectrum.size()) {
    std::ostringstream os;
    os << "shift: " << shifts_.size() << " entries for a spectrum with " << spectrum.size()
       << " atoms";
    throw InvalidArgument(os.str());
  }
  for (const auto& s : shifts_) check_shift(s);
}

ShiftSpec ShiftSpec::identity(const SpectralModel& spectrum) {
  return ShiftSpec(std::vector<AtomShift>(spectrum.size()), spectrum);
}

std::pair<SpectralModel, ShiftSpec> make_shifted_model(std::vector<Atom> atoms,
                                                       std::vector<AtomShift> shifts) {
  if (shifts.size() != atoms.size()) {
    std::ostringstream os;
    os << "shift: " << shifts.size() << " entries for " << atoms.size() << " atoms";
    throw InvalidArgument(os.str());
  }
  for (const auto& a : atoms) check_atom(a);
  std::vector<AtomShift> kept;
  for (std::size_t i : canonical_order(atoms)) kept.push_back(shifts[i]);
  SpectralModel spectrum(std::move(atoms));
  ShiftSpec shift(std::move(kept), spectrum);
  return {std::move(spectrum), std::move(shift)};
}

AtomShift shift_from_robust_fraction(double q) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw InvalidArgument("robust fraction q must lie in [0, 1]");
  }
  if (q == 0.0) return {0.0, 1.0};
  const double r = std::sqrt(q);
  return {r, r};
}

WhitenedModel whiten_equivalent(const SpectralModel& spectrum, const ShiftSpec& shift) {
  if (shift.size() != spectrum.size()) {
    throw InvalidArgument("whiten: shift does not match spectrum");
  }
  double kappa_sq = 0.0;
  double overlap = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const double pi = spectrum[i].signal_fraction;
    kappa_sq += pi * shift[i].kappa * shift[i].kappa;
    overlap += pi * shift[i].kappa * shift[i].cos_theta;
    total += pi;
  }
  // Dividing by the accumulated sum keeps the no-shift point exactly at (1, 1).
  kappa_sq /= total;
  overlap /= total;
  const double kappa = std::sqrt(kappa_sq);
  double cos_theta = 1.0;
  if (kappa > 0.0) cos_theta = std::clamp(overlap / kappa, -1.0, 1.0);

  auto iso = SpectralModel::isotropic();
  ShiftSpec eff({{kappa, cos_theta}}, iso);
  return {std::move(iso), std::move(eff)};
}

}  // namespace ridgeshift
