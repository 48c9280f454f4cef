#pragma once

#include <complex>
#include <cstdint>
#include <variant>
#include <vector>

#include "prelog/linalg.hpp"

namespace prelog {

/// Closed interval of normalized frequencies inside [-1/2, 1/2].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Density c0 + c1*x + c2*x^2 + ... on the piece.
struct PolynomialDensity {
  std::vector<double> coefficients;
  friend bool operator==(const PolynomialDensity&, const PolynomialDensity&) = default;
};

/// Density r0 + 2 Re sum_{m>=1} r_m exp(-i 2 pi m x); the coefficients are
/// the Fourier coefficients of the density, r_m = int f(x) exp(i 2 pi m x) dx
/// when the piece spans the full band.
struct TrigonometricDensity {
  std::vector<std::complex<double>> coefficients;
  friend bool operator==(const TrigonometricDensity&, const TrigonometricDensity&) = default;
};

/// One absolutely continuous component of a spectral distribution: a
/// density formula restricted to an interval.
class DensityPiece {
 public:
  using Formula = std::variant<PolynomialDensity, TrigonometricDensity>;

  DensityPiece(Interval support, Formula formula);

  static DensityPiece constant(Interval support, double value);
  static DensityPiece polynomial(Interval support, std::vector<double> coefficients);
  static DensityPiece trigonometric(Interval support, std::vector<std::complex<double>> coefficients);

  const Interval& support() const { return support_; }
  const Formula& formula() const { return formula_; }

  /// Evaluates the formula; callers restrict x to the support.
  double operator()(double x) const;

  bool is_constant() const;
  /// Only meaningful when is_constant().
  double constant_value() const;
  bool identically_zero() const;

  /// int_lo^hi f(x) exp(i 2 pi m x) dx over [lo,hi] intersected with the
  /// support, in closed form.
  std::complex<double> fourier(std::int64_t m, double lo, double hi) const;
  std::complex<double> fourier(std::int64_t m) const { return fourier(m, support_.lo, support_.hi); }

  /// Mass over [lo,hi] intersected with the support.
  double mass(double lo, double hi) const { return fourier(0, lo, hi).real(); }
  double mass() const { return mass(support_.lo, support_.hi); }

  /// Sorted points strictly inside the support where the density may cross
  /// or touch `level`. May contain spurious candidates; never misses a
  /// crossing. Empty for constant pieces.
  std::vector<double> level_candidates(double level) const;

  /// Lebesgue measure of {x in support : f(x) > level}.
  double measure_above(double level) const;

  /// Minimum of the density over the support.
  double minimum() const;

  friend bool operator==(const DensityPiece&, const DensityPiece&) = default;

 private:
  Interval support_;
  Formula formula_;
};

struct PointMass {
  double location = 0.0;
  double weight = 0.0;
  friend bool operator==(const PointMass&, const PointMass&) = default;
};

/// Spectral distribution function F on [-1/2, 1/2] of a unit-variance
/// stationary process: absolutely continuous pieces plus point masses.
/// Construction validates unit total mass, disjoint supports, nonnegative
/// densities and distinct point-mass locations.
class SpectralDistribution {
 public:
  static constexpr double kMassTolerance = 1e-12;

  explicit SpectralDistribution(std::vector<DensityPiece> pieces, std::vector<PointMass> point_masses = {});

  /// Density 1 on the whole band.
  static SpectralDistribution white();
  /// Density 1/(2 w) on [-w, w].
  static SpectralDistribution flat_band(double half_width);
  static SpectralDistribution point_mass(double location);
  /// Full-band trigonometric density with the given Fourier coefficients.
  static SpectralDistribution trigonometric(std::vector<std::complex<double>> coefficients);

  const std::vector<DensityPiece>& pieces() const { return pieces_; }
  const std::vector<PointMass>& point_masses() const { return point_masses_; }
  bool has_point_masses() const { return !point_masses_.empty(); }

  /// F(x): right-continuous, F(-1/2^-) = 0, F(1/2) = 1.
  double cdf(double x) const;
  /// Absolutely continuous part of F(x).
  double continuous_cdf(double x) const;
  /// Absolutely continuous mass of [lo, hi].
  double continuous_mass(double lo, double hi) const;

  /// Measure of [-1/2,1/2] not covered by any piece.
  double uncovered_measure() const;

  friend bool operator==(const SpectralDistribution&, const SpectralDistribution&) = default;

 private:
  std::vector<DensityPiece> pieces_;
  std::vector<PointMass> point_masses_;
};

/// Lebesgue measures of the sets where F' = 0, F' >= 1 and 0 < F' < 1.
struct HarmonicPartition {
  double mu_s1 = 0.0;
  double mu_s2 = 0.0;
  double mu_s3 = 0.0;

  double positive_measure() const { return mu_s2 + mu_s3; }
};

/// n x n Hermitian Toeplitz covariance of the centered fading vector.
class CovarianceMatrix {
 public:
  explicit CovarianceMatrix(MatrixXcd entries);

  Eigen::Index order() const { return entries_.rows(); }
  const MatrixXcd& entries() const { return entries_; }
  double min_eigenvalue() const { return prelog::min_eigenvalue(entries_); }

 private:
  MatrixXcd entries_;
};

/// Distribution function F_V(x) = x + snr F(x) of the auxiliary Gaussian
/// process; its a.e. derivative is 1 + snr F'(x).
class AuxiliarySpectrum {
 public:
  AuxiliarySpectrum(SpectralDistribution spectrum, double snr);

  double operator()(double x) const;
  double density(double x) const;
  double snr() const { return snr_; }

 private:
  SpectralDistribution spectrum_;
  double snr_;
};

/// a.e. derivative F'(x): density of the absolutely continuous part. At a
/// shared piece boundary the first piece containing x wins.
double density_at(const SpectralDistribution& spectrum, double x);

/// mu({x : F'(x) = 0}).
double flat_set_measure(const SpectralDistribution& spectrum);

/// int exp(i 2 pi m x) dF(x).
std::complex<double> autocovariance(const SpectralDistribution& spectrum, std::int64_t m);

/// autocovariance(0..count-1).
VectorXcd autocovariance_sequence(const SpectralDistribution& spectrum, Eigen::Index count);

CovarianceMatrix toeplitz_covariance(const SpectralDistribution& spectrum, Eigen::Index n);

HarmonicPartition partition_measures(const SpectralDistribution& spectrum);

AuxiliarySpectrum auxiliary_spectrum(const SpectralDistribution& spectrum, double snr);

}  // namespace prelog
