#include "prelog/spectra.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "prelog/errors.hpp"
#include "prelog/numeric.hpp"

namespace prelog {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// int_lo^hi exp(i 2 pi q x) dx
cd exponential_integral(double q, double lo, double hi) {
  if (q == 0.0) return {hi - lo, 0.0};
  const double center = 0.5 * (lo + hi);
  return cis_turns(q * center) * (sinpi(q * (hi - lo)) / (kPi * q));
}

template <typename T>
std::vector<T> trim_trailing_zeros(std::vector<T> coefficients) {
  while (coefficients.size() > 1 && coefficients.back() == T{}) coefficients.pop_back();
  return coefficients;
}

// Roots of sum_k c_k z^k via companion-matrix eigenvalues.
std::vector<cd> polynomial_roots(std::vector<cd> coefficients) {
  coefficients = trim_trailing_zeros(std::move(coefficients));
  const auto degree = static_cast<Eigen::Index>(coefficients.size()) - 1;
  if (degree < 1) return {};
  if (degree == 1) return {-coefficients[0] / coefficients[1]};
  MatrixXcd companion = MatrixXcd::Zero(degree, degree);
  const cd lead = coefficients.back();
  for (Eigen::Index i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < degree; ++i) companion(i, degree - 1) = -coefficients[i] / lead;
  const Eigen::ComplexEigenSolver<MatrixXcd> solver(companion, false);
  if (solver.info() != Eigen::Success) throw NumericalError("polynomial root finding did not converge");
  const auto& values = solver.eigenvalues();
  return {values.data(), values.data() + values.size()};
}

double evaluate_polynomial(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double evaluate_trigonometric(const std::vector<cd>& r, double x) {
  double acc = r[0].real();
  for (std::size_t m = 1; m < r.size(); ++m) acc += 2.0 * (r[m] * cis_turns(-static_cast<double>(m) * x)).real();
  return acc;
}

std::vector<double> polynomial_derivative(const std::vector<double>& c) {
  if (c.size() <= 1) return {0.0};
  std::vector<double> out(c.size() - 1);
  for (std::size_t k = 1; k < c.size(); ++k) out[k - 1] = static_cast<double>(k) * c[k];
  return out;
}

std::vector<cd> trigonometric_derivative(const std::vector<cd>& r) {
  std::vector<cd> out(r.size());
  out[0] = 0.0;
  for (std::size_t m = 1; m < r.size(); ++m) out[m] = cd(0.0, -2.0 * kPi * static_cast<double>(m)) * r[m];
  return out;
}

// Newton polishing of a bracketed-or-nearby root of g = f - level.
template <typename F, typename DF>
double polish_root(double x, double lo, double hi, const F& g, const DF& dg) {
  for (int iter = 0; iter < 8; ++iter) {
    const double slope = dg(x);
    if (slope == 0.0 || !std::isfinite(slope)) break;
    const double next = x - g(x) / slope;
    if (!(next > lo && next < hi)) break;
    if (std::fabs(next - x) <= 1e-16 * std::max(1.0, std::fabs(x))) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

double measure_at_least(const DensityPiece& piece, double level) {
  if (piece.is_constant()) return piece.constant_value() >= level ? piece.support().length() : 0.0;
  // Level sets of a nonconstant polynomial or trigonometric polynomial are
  // finite, so {f >= level} and {f > level} have equal measure.
  return piece.measure_above(level);
}

}  // namespace

// DensityPiece ---------------------------------------------------------------

DensityPiece::DensityPiece(Interval support, Formula formula) : support_(support), formula_(std::move(formula)) {
  if (!(support_.lo < support_.hi)) throw DomainError("density piece needs lo < hi");
  std::visit(
      [](auto& f) {
        if (f.coefficients.empty()) throw DomainError("density piece needs at least one coefficient");
        f.coefficients = trim_trailing_zeros(std::move(f.coefficients));
      },
      formula_);
  if (const auto* trig = std::get_if<TrigonometricDensity>(&formula_)) {
    if (std::fabs(trig->coefficients[0].imag()) > 1e-12)
      throw DomainError("trigonometric density needs a real constant coefficient");
  }
}

DensityPiece DensityPiece::constant(Interval support, double value) {
  return {support, PolynomialDensity{{value}}};
}

DensityPiece DensityPiece::polynomial(Interval support, std::vector<double> coefficients) {
  return {support, PolynomialDensity{std::move(coefficients)}};
}

DensityPiece DensityPiece::trigonometric(Interval support, std::vector<cd> coefficients) {
  return {support, TrigonometricDensity{std::move(coefficients)}};
}

double DensityPiece::operator()(double x) const {
  if (const auto* poly = std::get_if<PolynomialDensity>(&formula_)) return evaluate_polynomial(poly->coefficients, x);
  return evaluate_trigonometric(std::get<TrigonometricDensity>(formula_).coefficients, x);
}

bool DensityPiece::is_constant() const {
  return std::visit([](const auto& f) { return f.coefficients.size() == 1; }, formula_);
}

double DensityPiece::constant_value() const {
  return std::visit([](const auto& f) { return std::real(f.coefficients[0]); }, formula_);
}

bool DensityPiece::identically_zero() const { return is_constant() && constant_value() == 0.0; }

cd DensityPiece::fourier(std::int64_t m, double lo, double hi) const {
  lo = std::max(lo, support_.lo);
  hi = std::min(hi, support_.hi);
  if (!(hi > lo)) return 0.0;
  const auto q = static_cast<double>(m);

  if (const auto* poly = std::get_if<PolynomialDensity>(&formula_)) {
    const auto& c = poly->coefficients;
    if (m == 0) {
      double acc = 0.0, hi_pow = hi, lo_pow = lo;
      for (std::size_t k = 0; k < c.size(); ++k) {
        acc += c[k] * (hi_pow - lo_pow) / static_cast<double>(k + 1);
        hi_pow *= hi;
        lo_pow *= lo;
      }
      return acc;
    }
    // J_k = int x^k e^{i w x}; J_k = [x^k e^{i w x}/(i w)] - (k/(i w)) J_{k-1}.
    const cd iw(0.0, 2.0 * kPi * q);
    const cd e_hi = cis_turns(q * hi);
    const cd e_lo = cis_turns(q * lo);
    cd moment = exponential_integral(q, lo, hi);
    cd acc = c[0] * moment;
    double hi_pow = 1.0, lo_pow = 1.0;
    for (std::size_t k = 1; k < c.size(); ++k) {
      hi_pow *= hi;
      lo_pow *= lo;
      moment = (hi_pow * e_hi - lo_pow * e_lo) / iw - (static_cast<double>(k) / iw) * moment;
      acc += c[k] * moment;
    }
    return acc;
  }

  const auto& r = std::get<TrigonometricDensity>(formula_).coefficients;
  cd acc = r[0].real() * exponential_integral(q, lo, hi);
  for (std::size_t j = 1; j < r.size(); ++j) {
    const auto dj = static_cast<double>(j);
    acc += r[j] * exponential_integral(q - dj, lo, hi);
    acc += std::conj(r[j]) * exponential_integral(q + dj, lo, hi);
  }
  return acc;
}

std::vector<double> DensityPiece::level_candidates(double level) const {
  if (is_constant()) return {};
  const double lo = support_.lo, hi = support_.hi;
  std::vector<double> out;
  auto g = [&](double x) { return (*this)(x) - level; };

  if (const auto* poly = std::get_if<PolynomialDensity>(&formula_)) {
    std::vector<cd> shifted(poly->coefficients.begin(), poly->coefficients.end());
    shifted[0] -= level;
    const auto derivative = polynomial_derivative(poly->coefficients);
    auto dg = [&](double x) { return evaluate_polynomial(derivative, x); };
    for (const cd& z : polynomial_roots(shifted)) {
      if (std::fabs(z.imag()) > 1e-6 * std::max(1.0, std::abs(z))) continue;
      if (!(z.real() > lo && z.real() < hi)) continue;
      out.push_back(polish_root(z.real(), lo, hi, g, dg));
    }
  } else {
    // With z = exp(-i 2 pi x): f(x) - level = z^{-L} P(z), deg P = 2L.
    const auto& r = std::get<TrigonometricDensity>(formula_).coefficients;
    const std::size_t order = r.size() - 1;
    std::vector<cd> p(2 * order + 1);
    for (std::size_t m = 1; m <= order; ++m) {
      p[order + m] = r[m];
      p[order - m] = std::conj(r[m]);
    }
    p[order] = r[0].real() - level;
    const auto derivative = trigonometric_derivative(r);
    auto dg = [&](double x) { return evaluate_trigonometric(derivative, x); };
    for (const cd& z : polynomial_roots(p)) {
      if (std::fabs(std::abs(z) - 1.0) > 1e-5) continue;
      const double x = -std::arg(z) / (2.0 * kPi);
      // arg = pi maps to x = -1/2; the point 1/2 is the same harmonic.
      for (const double candidate : {x, x + 1.0, x - 1.0}) {
        if (candidate > lo && candidate < hi) out.push_back(polish_root(candidate, lo, hi, g, dg));
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double DensityPiece::measure_above(double level) const {
  if (is_constant()) return constant_value() > level ? support_.length() : 0.0;
  std::vector<double> breaks{support_.lo};
  const auto roots = level_candidates(level);
  breaks.insert(breaks.end(), roots.begin(), roots.end());
  breaks.push_back(support_.hi);
  double measure = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double width = breaks[i + 1] - breaks[i];
    if (width <= 0.0) continue;
    if ((*this)(0.5 * (breaks[i] + breaks[i + 1])) > level) measure += width;
  }
  return measure;
}

double DensityPiece::minimum() const {
  if (is_constant()) return constant_value();
  const DensityPiece slope = std::visit(
      [&](const auto& f) -> DensityPiece {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, PolynomialDensity>)
          return DensityPiece::polynomial(support_, polynomial_derivative(f.coefficients));
        else
          return DensityPiece::trigonometric(support_, trigonometric_derivative(f.coefficients));
      },
      formula_);
  double best = std::min((*this)(support_.lo), (*this)(support_.hi));
  for (const double x : slope.level_candidates(0.0)) best = std::min(best, (*this)(x));
  return best;
}

// SpectralDistribution -------------------------------------------------------

SpectralDistribution::SpectralDistribution(std::vector<DensityPiece> pieces, std::vector<PointMass> point_masses)
    : pieces_(std::move(pieces)), point_masses_(std::move(point_masses)) {
  std::sort(pieces_.begin(), pieces_.end(),
            [](const DensityPiece& a, const DensityPiece& b) { return a.support().lo < b.support().lo; });
  std::sort(point_masses_.begin(), point_masses_.end(),
            [](const PointMass& a, const PointMass& b) { return a.location < b.location; });

  double total = 0.0;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& s = pieces_[i].support();
    if (s.lo < -0.5 || s.hi > 0.5) throw DomainError("density piece support must lie in [-1/2, 1/2]");
    if (i + 1 < pieces_.size() && pieces_[i + 1].support().lo < s.hi)
      throw DomainError("density piece supports overlap");
    if (pieces_[i].minimum() < -1e-10) throw DomainError("density must be nonnegative");
    total += pieces_[i].mass();
  }
  for (std::size_t i = 0; i < point_masses_.size(); ++i) {
    const auto& p = point_masses_[i];
    if (p.location < -0.5 || p.location > 0.5) throw DomainError("point mass location must lie in [-1/2, 1/2]");
    if (p.weight < 0.0) throw DomainError("point mass weight must be nonnegative");
    if (i > 0 && point_masses_[i - 1].location == p.location) throw DomainError("point mass locations must be distinct");
    total += p.weight;
  }
  if (std::fabs(total - 1.0) > kMassTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "spectral distribution must have unit total mass, got " << total;
    throw DomainError(msg.str());
  }
}

SpectralDistribution SpectralDistribution::white() {
  return SpectralDistribution({DensityPiece::constant({-0.5, 0.5}, 1.0)});
}

SpectralDistribution SpectralDistribution::flat_band(double half_width) {
  if (!(half_width > 0.0 && half_width <= 0.5)) throw DomainError("flat band half-width must lie in (0, 1/2]");
  return SpectralDistribution({DensityPiece::constant({-half_width, half_width}, 0.5 / half_width)});
}

SpectralDistribution SpectralDistribution::point_mass(double location) {
  return SpectralDistribution({}, {{location, 1.0}});
}

SpectralDistribution SpectralDistribution::trigonometric(std::vector<cd> coefficients) {
  return SpectralDistribution({DensityPiece::trigonometric({-0.5, 0.5}, std::move(coefficients))});
}

double SpectralDistribution::continuous_mass(double lo, double hi) const {
  double acc = 0.0;
  for (const auto& piece : pieces_) acc += piece.mass(lo, hi);
  return acc;
}

double SpectralDistribution::continuous_cdf(double x) const { return continuous_mass(-0.5, x); }

double SpectralDistribution::cdf(double x) const {
  double acc = continuous_cdf(x);
  for (const auto& p : point_masses_)
    if (p.location <= x) acc += p.weight;
  return acc;
}

double SpectralDistribution::uncovered_measure() const {
  double covered = 0.0;
  for (const auto& piece : pieces_) covered += piece.support().length();
  return 1.0 - covered;
}

// Free functions -------------------------------------------------------------

CovarianceMatrix::CovarianceMatrix(MatrixXcd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0)
    throw DomainError("covariance matrix must be square and nonempty");
}

AuxiliarySpectrum::AuxiliarySpectrum(SpectralDistribution spectrum, double snr)
    : spectrum_(std::move(spectrum)), snr_(snr) {
  if (!(snr > 0.0)) throw DomainError("auxiliary spectrum needs snr > 0");
}

double AuxiliarySpectrum::operator()(double x) const { return x + snr_ * spectrum_.cdf(x); }

double AuxiliarySpectrum::density(double x) const { return 1.0 + snr_ * density_at(spectrum_, x); }

double density_at(const SpectralDistribution& spectrum, double x) {
  if (!(x >= -0.5 && x <= 0.5)) throw DomainError("frequency must lie in [-1/2, 1/2]");
  for (const auto& piece : spectrum.pieces())
    if (piece.support().contains(x)) return std::max(0.0, piece(x));
  return 0.0;
}

double flat_set_measure(const SpectralDistribution& spectrum) {
  return partition_measures(spectrum).mu_s1;
}

cd autocovariance(const SpectralDistribution& spectrum, std::int64_t m) {
  cd acc = 0.0;
  for (const auto& piece : spectrum.pieces()) acc += piece.fourier(m);
  for (const auto& p : spectrum.point_masses()) acc += p.weight * cis_turns(static_cast<double>(m) * p.location);
  return acc;
}

VectorXcd autocovariance_sequence(const SpectralDistribution& spectrum, Eigen::Index count) {
  VectorXcd out(count);
  for (Eigen::Index m = 0; m < count; ++m) out(m) = autocovariance(spectrum, m);
  return out;
}

CovarianceMatrix toeplitz_covariance(const SpectralDistribution& spectrum, Eigen::Index n) {
  if (n < 1) throw DomainError("covariance order must be positive");
  return CovarianceMatrix(hermitian_toeplitz(autocovariance_sequence(spectrum, n)));
}

HarmonicPartition partition_measures(const SpectralDistribution& spectrum) {
  double positive = 0.0, at_least_one = 0.0;
  for (const auto& piece : spectrum.pieces()) {
    positive += piece.measure_above(0.0);
    at_least_one += measure_at_least(piece, 1.0);
  }
  return {1.0 - positive, at_least_one, positive - at_least_one};
}

AuxiliarySpectrum auxiliary_spectrum(const SpectralDistribution& spectrum, double snr) {
  return AuxiliarySpectrum(spectrum, snr);
}

}  // namespace prelog
