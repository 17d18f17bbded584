#include "corra/channel_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace corra {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kPsdTol = 1e-10;
constexpr double kDegenerateTrace = 1e-12;

void check_half_wavelength(const ArrayConfig& cfg) {
  if (cfg.spacing != 0.5)
    throw std::invalid_argument("covariance_dft_approx: requires half-wavelength spacing, got " +
                                std::to_string(cfg.spacing));
}

}  // namespace

void ArrayConfig::validate() const {
  if (antennas < 1) throw std::invalid_argument("ArrayConfig: antennas must be >= 1");
  if (!(spacing > 0.0)) throw std::invalid_argument("ArrayConfig: spacing must be > 0");
}

void DeviceProfile::validate() const {
  if (!(asd > 0.0)) throw std::invalid_argument("DeviceProfile: asd must be > 0");
  if (!(beta > 0.0)) throw std::invalid_argument("DeviceProfile: beta must be > 0");
  if (!(std::abs(mean_aoa) <= kPi / 2))
    throw std::invalid_argument("DeviceProfile: mean_aoa must lie in [-pi/2, pi/2]");
}

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::exact:
      return "exact";
    case Provenance::dft_approx:
      return "dft_approx";
    case Provenance::supplied:
      return "supplied";
  }
  return "unknown";
}

CovarianceMatrix::CovarianceMatrix(CMatrix mat, Provenance provenance, RVector angular_power)
    : angular_power_(std::move(angular_power)), provenance_(provenance) {
  if (mat.rows() != mat.cols() || mat.rows() == 0)
    throw std::invalid_argument("CovarianceMatrix: matrix must be square and non-empty");

  const double scale = mat.cwiseAbs().maxCoeff();
  const double asym = (mat - mat.adjoint()).cwiseAbs().maxCoeff();
  if (asym > kHermitianTol * scale)
    throw std::invalid_argument("CovarianceMatrix: matrix is not Hermitian");

  mat_ = (mat + mat.adjoint()) * 0.5;

  const double tr = mat_.trace().real();
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(mat_, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("CovarianceMatrix: eigenvalue computation failed");
  if (eig.eigenvalues().minCoeff() < -kPsdTol * std::abs(tr))
    throw std::invalid_argument("CovarianceMatrix: matrix is not positive semidefinite");

  if (angular_power_.size() > 0) {
    if (angular_power_.size() != mat_.rows())
      throw std::invalid_argument("CovarianceMatrix: angular power length mismatch");
    if (angular_power_.minCoeff() < 0.0)
      throw std::invalid_argument("CovarianceMatrix: angular power must be nonnegative");
  }
}

double pas_value(double theta, const DeviceProfile& profile) {
  const double offset = std::abs(theta - profile.mean_aoa);
  if (offset > kPi) return 0.0;
  const double s = profile.asd;
  const double norm = std::sqrt(2.0) * s * (1.0 - std::exp(-std::sqrt(2.0) * kPi / s));
  return profile.beta * std::exp(-std::sqrt(2.0) * offset / s) / norm;
}

CVector steering_vector(double theta, const ArrayConfig& cfg) {
  cfg.validate();
  if (!(std::abs(theta) <= kPi / 2))
    throw std::invalid_argument("steering_vector: theta must lie in [-pi/2, pi/2]");
  const double phase = -2.0 * kPi * cfg.spacing * std::sin(theta);
  CVector v(cfg.antennas);
  for (int m = 0; m < cfg.antennas; ++m) v(m) = std::polar(1.0, phase * m);
  return v;
}

CovarianceMatrix covariance_exact(const DeviceProfile& profile, const ArrayConfig& cfg,
                                  int quadrature_points) {
  profile.validate();
  return covariance_exact([&](double t) { return pas_value(t, profile); }, profile.beta, cfg,
                          quadrature_points);
}

CovarianceMatrix covariance_exact(const PowerAzimuthSpectrum& pas, double beta,
                                  const ArrayConfig& cfg, int quadrature_points,
                                  NodeOrder order) {
  cfg.validate();
  if (quadrature_points < 64)
    throw std::invalid_argument("covariance_exact: need at least 64 quadrature points");
  if (!(beta > 0.0)) throw std::invalid_argument("covariance_exact: beta must be > 0");

  const int m_count = cfg.antennas;
  const double step = kPi / quadrature_points;

  // The ULA covariance is Hermitian Toeplitz; accumulate its first column.
  std::vector<Complex> column(static_cast<std::size_t>(m_count), Complex(0.0, 0.0));
  double weight_sum = 0.0;
  for (int i = 0; i < quadrature_points; ++i) {
    const int n = order == NodeOrder::ascending ? i : quadrature_points - 1 - i;
    const double theta = -kPi / 2 + (n + 0.5) * step;
    const double w = pas(theta) * step;
    if (w == 0.0) continue;
    weight_sum += w;
    const double phase = -2.0 * kPi * cfg.spacing * std::sin(theta);
    for (int d = 0; d < m_count; ++d) column[static_cast<std::size_t>(d)] += w * std::polar(1.0, phase * d);
  }

  const double raw_trace = m_count * weight_sum;
  if (raw_trace < kDegenerateTrace)
    throw std::domain_error("covariance_exact: PAS has no support on [-pi/2, pi/2]");
  const double scale = m_count * beta / raw_trace;

  CMatrix r(m_count, m_count);
  for (int a = 0; a < m_count; ++a) {
    for (int b = 0; b < m_count; ++b) {
      const Complex c = column[static_cast<std::size_t>(std::abs(a - b))] * scale;
      r(a, b) = a >= b ? c : std::conj(c);
    }
    r(a, a) = Complex(column[0].real() * scale, 0.0);
  }
  return CovarianceMatrix(std::move(r), Provenance::exact);
}

CMatrix angular_dft_basis(int antennas) {
  if (antennas < 1) throw std::invalid_argument("angular_dft_basis: antennas must be >= 1");
  CMatrix f(antennas, antennas);
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(antennas));
  for (int i = 0; i < antennas; ++i) {
    const double u = 2.0 * i / antennas - 1.0;  // sin of the grid angle
    for (int m = 0; m < antennas; ++m) f(m, i) = std::polar(inv_sqrt, -kPi * u * m);
  }
  return f;
}

CovarianceMatrix covariance_dft_approx(const DeviceProfile& profile, const ArrayConfig& cfg) {
  profile.validate();
  return covariance_dft_approx([&](double t) { return pas_value(t, profile); }, profile.beta,
                               cfg);
}

CovarianceMatrix covariance_dft_approx(const PowerAzimuthSpectrum& pas, double beta,
                                       const ArrayConfig& cfg) {
  cfg.validate();
  check_half_wavelength(cfg);
  if (!(beta > 0.0)) throw std::invalid_argument("covariance_dft_approx: beta must be > 0");

  const int m_count = cfg.antennas;
  auto grid = [m_count](int i) { return std::asin(std::clamp(2.0 * i / m_count - 1.0, -1.0, 1.0)); };

  RVector r(m_count);
  for (int i = 0; i < m_count; ++i) r(i) = m_count * pas(grid(i)) * (grid(i + 1) - grid(i));

  const double total = r.sum();
  if (total < kDegenerateTrace)
    throw std::domain_error("covariance_dft_approx: PAS has no support on the angle grid");
  r *= m_count * beta / total;

  const CMatrix f = angular_dft_basis(m_count);
  CMatrix mat = f * r.cast<Complex>().asDiagonal() * f.adjoint();
  return CovarianceMatrix(std::move(mat), Provenance::dft_approx, std::move(r));
}

ChannelSampler::ChannelSampler(const CovarianceMatrix& cov) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(cov.matrix());
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("ChannelSampler: eigendecomposition failed");
  RVector lambda = eig.eigenvalues();
  const double floor = -kPsdTol * std::abs(cov.trace());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) < floor) throw std::domain_error("ChannelSampler: covariance has a negative eigenvalue");
    lambda(i) = std::sqrt(std::max(lambda(i), 0.0));
  }
  factor_ = eig.eigenvectors() * lambda.cast<Complex>().asDiagonal();
}

CVector ChannelSampler::sample(Rng& rng) const {
  const CVector z = rng.complex_normal_vector(dim());
  return factor_ * z;
}

CVector sample_channel(const CovarianceMatrix& cov, Rng& rng) { return ChannelSampler(cov).sample(rng); }

}  // namespace corra
