#include "ridgeshift/finite_sample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ridgeshift/errors.hpp"
#include "ridgeshift/parallel.hpp"
#include "ridgeshift/random.hpp"

namespace ridgeshift {
namespace {

Eigen::VectorXd normal_vector(CounterRng& rng, std::size_t n) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
  return v;
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

Eigen::LLT<Eigen::MatrixXd> factor_shifted(const Eigen::MatrixXd& psi, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("lambda must be positive and finite");
  }
  Eigen::MatrixXd a = psi;
  a.diagonal().array() += lambda;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) {
    throw NumericFailure("Cholesky factorization of Psi + lambda I failed");
  }
  return llt;
}

}  // namespace

std::vector<AtomBlock> allocate_dimensions(const SpectralModel& spectrum, std::size_t dim) {
  const std::size_t k = spectrum.size();
  std::vector<std::size_t> counts(k);
  std::vector<double> remainders(k);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double exact = spectrum[i].weight * static_cast<double>(dim);
    counts[i] = static_cast<std::size_t>(std::floor(exact));
    remainders[i] = exact - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
  // sum floor(rho_i dim) <= dim, and the shortfall is below the atom count.
  for (std::size_t j = 0; assigned < dim; ++j, ++assigned) ++counts[order[j % k]];

  std::vector<AtomBlock> blocks(k);
  std::size_t offset = 0;
  for (std::size_t i = 0; i < k; ++i) {
    blocks[i] = {offset, counts[i], spectrum[i].variance};
    offset += counts[i];
  }
  return blocks;
}

Eigen::VectorXd coordinate_variances(std::span<const AtomBlock> blocks) {
  std::size_t dim = 0;
  for (const auto& b : blocks) dim = std::max(dim, b.offset + b.size);
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
  for (const auto& b : blocks) {
    v.segment(static_cast<Eigen::Index>(b.offset), static_cast<Eigen::Index>(b.size))
        .setConstant(b.variance);
  }
  return v;
}

Eigen::VectorXd shifted_coefficient(const Eigen::VectorXd& beta, const Eigen::VectorXd& draw,
                                    AtomShift shift) {
  const double norm = beta.norm();
  if (norm == 0.0) return Eigen::VectorXd::Zero(beta.size());
  if (shift.kappa == 0.0 || std::abs(shift.cos_theta) == 1.0) {
    return (shift.kappa * shift.cos_theta) * beta;
  }
  if (draw.size() != beta.size()) throw InvalidArgument("shifted_coefficient: size mismatch");

  const Eigen::VectorXd unit = beta / norm;
  Eigen::VectorXd u = draw - draw.dot(unit) * unit;
  u -= u.dot(unit) * unit;  // second pass restores orthogonality to rounding level
  const double u_norm = u.norm();
  if (!(u_norm > 0.0)) throw NumericFailure("shifted_coefficient: draw is parallel to beta");
  u /= u_norm;

  const double sin_theta = std::sqrt(std::max(0.0, 1.0 - shift.cos_theta * shift.cos_theta));
  return (shift.kappa * norm) * (shift.cos_theta * unit + sin_theta * u);
}

CoefficientPair build_coefficients(const SpectralModel& spectrum, const ShiftSpec& shift,
                                   std::size_t dim, std::uint64_t seed, double signal) {
  if (shift.size() != spectrum.size()) throw InvalidArgument("shift does not match spectrum");
  if (dim < 2 * spectrum.size()) {
    std::ostringstream os;
    os << "dimension " << dim << " is below 2 x " << spectrum.size() << " atoms";
    throw InvalidArgument(os.str());
  }

  CoefficientPair pair;
  pair.blocks = allocate_dimensions(spectrum, dim);
  pair.beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  pair.beta_tilde = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));

  CounterRng rng(stream_key(seed, 0, StreamPurpose::Coefficients));
  for (std::size_t t = 0; t < spectrum.size(); ++t) {
    const AtomBlock& block = pair.blocks[t];
    const Atom& atom = spectrum[t];
    if (block.size == 0) {
      if (atom.signal_fraction > 0.0) {
        std::ostringstream os;
        os << "atom with variance " << atom.variance << " carries signal but gets no dimensions";
        throw InvalidArgument(os.str());
      }
      continue;
    }
    if (block.size < 2 && shift[t].kappa > 0.0 && std::abs(shift[t].cos_theta) != 1.0) {
      std::ostringstream os;
      os << "atom with variance " << atom.variance
         << " has one dimension; no orthogonal direction for cos_theta=" << shift[t].cos_theta;
      throw InvalidArgument(os.str());
    }

    Eigen::VectorXd direction = normal_vector(rng, block.size);
    direction.normalize();
    const double norm = std::sqrt(atom.signal_fraction * signal / atom.variance);
    const Eigen::VectorXd beta = norm * direction;
    const Eigen::VectorXd draw = normal_vector(rng, block.size);

    const auto off = static_cast<Eigen::Index>(block.offset);
    const auto len = static_cast<Eigen::Index>(block.size);
    pair.beta.segment(off, len) = beta;
    pair.beta_tilde.segment(off, len) = shifted_coefficient(beta, draw, shift[t]);
  }
  return pair;
}

Dataset sample_dataset(const SpectralModel& spectrum, const Eigen::VectorXd& beta,
                       double noise_variance, std::size_t dim, std::size_t samples,
                       std::uint64_t seed) {
  if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance)) {
    throw InvalidArgument("noise variance must be >= 0");
  }
  if (static_cast<std::size_t>(beta.size()) != dim) {
    throw InvalidArgument("sample_dataset: beta length differs from dimension");
  }
  const auto p = static_cast<Eigen::Index>(dim);
  const auto n = static_cast<Eigen::Index>(samples);

  Dataset data;
  data.seed = seed;
  data.generator = kGeneratorTag;
  data.variances = coordinate_variances(allocate_dimensions(spectrum, dim));
  const Eigen::ArrayXd scale = data.variances.array().sqrt();

  data.x.resize(p, n);
  CounterRng covariates(stream_key(seed, 0, StreamPurpose::Covariates));
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < p; ++i) data.x(i, j) = scale[i] * covariates.normal();
  }

  CounterRng noise(stream_key(seed, 0, StreamPurpose::Noise));
  const double sigma = std::sqrt(noise_variance);
  data.y = data.x.transpose() * beta;
  for (Eigen::Index j = 0; j < n; ++j) data.y[j] += sigma * noise.normal();

  data.psi = Eigen::MatrixXd::Zero(p, p);
  if (n > 0) {
    data.psi.selfadjointView<Eigen::Lower>().rankUpdate(data.x, 1.0 / static_cast<double>(n));
    data.psi = data.psi.selfadjointView<Eigen::Lower>();
  }
  return data;
}

Dataset whiten(const Dataset& data) {
  Dataset out;
  out.seed = data.seed;
  out.generator = data.generator;
  const Eigen::ArrayXd inv_scale = data.variances.array().rsqrt();
  out.x = inv_scale.matrix().asDiagonal() * data.x;
  out.y = data.y;
  out.psi = inv_scale.matrix().asDiagonal() * data.psi * inv_scale.matrix().asDiagonal();
  out.variances = Eigen::VectorXd::Ones(data.variances.size());
  return out;
}

CoefficientPair whiten(const CoefficientPair& coeffs) {
  const Eigen::VectorXd scale = coordinate_variances(coeffs.blocks).array().sqrt();
  CoefficientPair out;
  out.beta = scale.cwiseProduct(coeffs.beta);
  out.beta_tilde = scale.cwiseProduct(coeffs.beta_tilde);
  out.blocks = coeffs.blocks;
  for (auto& b : out.blocks) b.variance = 1.0;
  return out;
}

Eigen::VectorXd ridge_fit(const Dataset& data, double lambda) {
  const auto p = static_cast<Eigen::Index>(data.dim());
  if (data.samples() == 0) {
    if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
    return Eigen::VectorXd::Zero(p);
  }
  const double n = static_cast<double>(data.samples());
  // (X X^T + lambda N I) b = X Y  <=>  (Psi + lambda I) b = X Y / N
  const Eigen::VectorXd rhs = data.x * data.y / n;
  const auto llt = factor_shifted(data.psi, lambda);
  Eigen::VectorXd b = llt.solve(rhs);

  Eigen::MatrixXd a = data.psi;
  a.diagonal().array() += lambda;
  const double residual = (a * b - rhs).norm();
  if (!b.allFinite() || residual > 1e-10 * std::max(rhs.norm(), 1e-300)) {
    std::ostringstream os;
    os << "ridge normal equations unresolved, relative residual " << residual / rhs.norm();
    throw NumericFailure(os.str(), residual);
  }
  return b;
}

ConditionalRisk conditional_risk(const Dataset& data, const CoefficientPair& coeffs,
                                 double lambda, double noise_variance) {
  const auto llt = factor_shifted(data.psi, lambda);

  // Psi (Psi + lambda)^{-1} beta = beta - lambda (Psi + lambda)^{-1} beta
  const Eigen::VectorXd error = coeffs.beta - lambda * llt.solve(coeffs.beta) - coeffs.beta_tilde;
  ConditionalRisk out;
  out.bias = data.variances.dot(error.cwiseAbs2());

  if (data.samples() > 0) {
    // Psi (Psi + lambda)^{-2} = A A^T with A = (Psi + lambda)^{-1} X / sqrt(N).
    const double n = static_cast<double>(data.samples());
    const Eigen::MatrixXd a = llt.solve(data.x / std::sqrt(n));
    out.variance = noise_variance / n * data.variances.dot(a.rowwise().squaredNorm());
  }
  if (!std::isfinite(out.bias) || !std::isfinite(out.variance)) {
    throw NumericFailure("conditional risk is not finite");
  }
  return out;
}

SampleStats summarize(std::span<const double> values) {
  SampleStats s;
  s.count = values.size();
  if (values.empty()) return s;
  s.mean = pairwise_sum(values) / static_cast<double>(values.size());
  if (values.size() >= 2) {
    std::vector<double> sq(values.size());
    std::transform(values.begin(), values.end(), sq.begin(),
                   [&](double v) { return (v - s.mean) * (v - s.mean); });
    const double var = pairwise_sum(sq) / static_cast<double>(values.size() - 1);
    s.std_error = std::sqrt(var / static_cast<double>(values.size()));
  }
  return s;
}

SampleStats empirical_risk_estimate(const Eigen::VectorXd& beta_hat, const CoefficientPair& coeffs,
                                    const Eigen::VectorXd& variances, std::size_t n_test,
                                    std::uint64_t seed) {
  if (n_test == 0) throw InvalidArgument("n_test must be >= 1");
  const Eigen::VectorXd d = (beta_hat - coeffs.beta_tilde).cwiseProduct(variances.cwiseSqrt());
  CounterRng rng(stream_key(seed, 0, StreamPurpose::TestInputs));
  std::vector<double> losses(n_test);
  for (auto& loss : losses) {
    double pred = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i) pred += d[i] * rng.normal();
    loss = pred * pred;
  }
  return summarize(losses);
}

McSummary mc_risk(const ProblemSpec& problem, std::size_t dim, std::size_t n_seeds,
                  std::uint64_t base_seed, const McOptions& options) {
  problem.validate();
  if (n_seeds < 2) throw InvalidArgument("mc: n_seeds must be >= 2");
  const double n_real = std::round(static_cast<double>(dim) / problem.gamma);
  const auto samples = static_cast<std::size_t>(n_real);

  // Theory reference: the problem itself, or its isotropic whitened equivalent.
  ProblemSpec reference = problem;
  if (options.whiten) {
    auto eff = whiten_equivalent(problem.spectrum, problem.shift);
    reference.spectrum = std::move(eff.spectrum);
    reference.shift = std::move(eff.shift);
  }
  const double lambda =
      problem.penalty.is_optimal()
          ? optimal_lambda(reference.spectrum, problem.gamma, problem.snr, options.lambda)
          : problem.penalty.value();

  McSummary summary;
  summary.dim = dim;
  summary.samples = samples;
  summary.base_seed = base_seed;
  summary.theory = asymptotic_risk_at(reference, lambda, options.lambda.solver);
  summary.per_seed.resize(n_seeds);

  const double noise = problem.noise_variance();
  parallel_for(n_seeds, options.threads, [&](std::size_t k) {
    const std::uint64_t seed = base_seed + k;
    try {
      CoefficientPair coeffs =
          build_coefficients(problem.spectrum, problem.shift, dim, seed, problem.signal);
      Dataset data = sample_dataset(problem.spectrum, coeffs.beta, noise, dim, samples, seed);
      if (options.whiten) {
        data = whiten(data);
        coeffs = whiten(coeffs);
      }
      summary.per_seed[k] = conditional_risk(data, coeffs, lambda, noise);
    } catch (const NumericFailure& e) {
      std::ostringstream os;
      os << "mc seed " << seed << ": " << e.what();
      throw NumericFailure(os.str(), e.last_residual());
    }
  });

  std::vector<double> b(n_seeds), v(n_seeds), r(n_seeds);
  for (std::size_t k = 0; k < n_seeds; ++k) {
    b[k] = summary.per_seed[k].bias;
    v[k] = summary.per_seed[k].variance;
    r[k] = summary.per_seed[k].risk();
  }
  summary.bias = summarize(b);
  summary.variance = summarize(v);
  summary.risk = summarize(r);
  return summary;
}

}  // namespace ridgeshift
