#pragma once

#include <functional>

#include "corra/rng.hpp"
#include "corra/types.hpp"

namespace corra {

// Uniform linear array. `spacing` is the element separation in wavelengths.
struct ArrayConfig {
  int antennas = 1;
  double spacing = 0.5;

  void validate() const;
};

// Per-device second-order channel statistics. Angles are in radians.
struct DeviceProfile {
  double asd = 0.0;       // angular spread of the Laplacian PAS
  double mean_aoa = 0.0;  // in [-pi/2, pi/2]
  double beta = 1.0;      // large-scale fading coefficient

  void validate() const;
};

enum class Provenance { exact, dft_approx, supplied };

const char* to_string(Provenance p);

// Hermitian PSD spatial covariance. The constructor checks the Hermitian and
// PSD invariants and stores the exactly-symmetrised matrix; values are
// immutable afterwards and safe to share between threads.
class CovarianceMatrix {
 public:
  explicit CovarianceMatrix(CMatrix mat, Provenance provenance = Provenance::supplied,
                            RVector angular_power = RVector());

  const CMatrix& matrix() const { return mat_; }
  int dim() const { return static_cast<int>(mat_.rows()); }
  Provenance provenance() const { return provenance_; }

  // Eigenvalues in the angular (centred DFT) basis; empty unless built by
  // covariance_dft_approx.
  const RVector& angular_power() const { return angular_power_; }
  bool has_angular_power() const { return angular_power_.size() > 0; }

  double trace() const { return mat_.trace().real(); }
  double frobenius_norm() const { return mat_.norm(); }

 private:
  CMatrix mat_;
  RVector angular_power_;
  Provenance provenance_;
};

using PowerAzimuthSpectrum = std::function<double(double)>;

// Truncated Laplacian power azimuth spectrum; zero for |theta - mean_aoa| > pi.
double pas_value(double theta, const DeviceProfile& profile);

// v(theta)_m = exp(-j 2 pi spacing m sin(theta)), m = 0..M-1.
CVector steering_vector(double theta, const ArrayConfig& cfg);

enum class NodeOrder { ascending, descending };

inline constexpr int kDefaultQuadraturePoints = 4096;

// Midpoint-rule integral of v v^H p(theta) over [-pi/2, pi/2], rescaled so
// that trace = M * beta.
CovarianceMatrix covariance_exact(const DeviceProfile& profile, const ArrayConfig& cfg,
                                  int quadrature_points = kDefaultQuadraturePoints);
CovarianceMatrix covariance_exact(const PowerAzimuthSpectrum& pas, double beta,
                                  const ArrayConfig& cfg, int quadrature_points,
                                  NodeOrder order = NodeOrder::ascending);

// Unitary basis whose column i is v(asin(2i/M - 1)) / sqrt(M): the M-point DFT
// with its frequency axis aligned to the arcsin angle grid.
CMatrix angular_dft_basis(int antennas);

// F diag(r) F^H with r_i = M p(t_{i-1}) (t_i - t_{i-1}), t_i = asin(2i/M - 1),
// rescaled so that sum(r) = M * beta. Only valid for half-wavelength spacing.
CovarianceMatrix covariance_dft_approx(const DeviceProfile& profile, const ArrayConfig& cfg);
CovarianceMatrix covariance_dft_approx(const PowerAzimuthSpectrum& pas, double beta,
                                       const ArrayConfig& cfg);

// Draws h ~ CN(0, R) as h = U Lambda^{1/2} z. The factor is computed once.
class ChannelSampler {
 public:
  explicit ChannelSampler(const CovarianceMatrix& cov);

  CVector sample(Rng& rng) const;
  int dim() const { return static_cast<int>(factor_.rows()); }
  const CMatrix& factor() const { return factor_; }

 private:
  CMatrix factor_;
};

CVector sample_channel(const CovarianceMatrix& cov, Rng& rng);

}  // namespace corra
