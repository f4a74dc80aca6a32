#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace dampsim {

using cplx = std::complex<double>;

/// Periodic box [-L, L)^n sampled with N points per axis.
///
/// `sigma` is the exponent of the elastic operator (-Delta)^sigma and travels
/// with the grid because every multiplier in the project depends on it.
/// Storage order is row-major with axis 0 slowest. Storage index i on an axis
/// maps to the signed wavenumber index k = i for i < N/2 and k = i - N
/// otherwise, so the Nyquist mode is k = -N/2.
struct GridSpec {
  int dim = 1;
  int points = 64;
  double half_length = 1.0;
  double sigma = 1.0;

  /// Throws ValidationError unless dim in {1,2,3}, points >= 4 is a power of
  /// two, half_length > 0 and sigma > 0.
  void validate() const;

  std::size_t size() const;
  double spacing() const { return 2.0 * half_length / points; }
  double cell_volume() const;
  double box_volume() const;
  double coordinate(int index) const { return -half_length + index * spacing(); }

  int signed_index(int i) const { return i < points / 2 ? i : i - points; }
  /// xi_k = (pi / L) k for storage index i.
  double wavenumber(int i) const;

  std::array<int, 3> unflatten(std::size_t flat) const;
  std::size_t flatten(const std::array<int, 3>& storage_index) const;
  /// Storage index of the mode -k.
  std::size_t mirror(std::size_t flat) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// |xi| for every storage index.
std::vector<double> wavenumber_norms(const GridSpec& grid);

/// |xi|^(2 s) for every storage index. The zero mode gets 1 for s == 0 and 0
/// otherwise (for s < 0 callers are responsible for the mean-zero check).
std::vector<double> symbol(const GridSpec& grid, double s);

/// Sampled real field on a grid.
class RealField {
 public:
  explicit RealField(const GridSpec& grid);
  /// Throws ValidationError on size mismatch or non-finite entries.
  RealField(const GridSpec& grid, std::vector<double> values);

  const GridSpec& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

/// Fourier coefficients of a real field.
///
/// Normalization: c_k = N^-n sum_j f(x_j) exp(-i xi_k . x_j), with x_j the
/// physical node coordinates. c_0 is the field mean, and a real field
/// f(x) = cos(pi x / L) has c_{+1} = c_{-1} = 1/2.
class SpectralField {
 public:
  explicit SpectralField(const GridSpec& grid);
  SpectralField(const GridSpec& grid, std::vector<cplx> coeffs);

  const GridSpec& grid() const { return grid_; }
  std::span<const cplx> coeffs() const { return coeffs_; }
  std::span<cplx> coeffs() { return coeffs_; }
  std::size_t size() const { return coeffs_.size(); }

  /// Coefficient at a signed multi-index; unused axes are ignored.
  cplx coeff(const std::array<int, 3>& k) const;
  cplx& coeff(const std::array<int, 3>& k);

 private:
  std::size_t locate(const std::array<int, 3>& k) const;

  GridSpec grid_;
  std::vector<cplx> coeffs_;
};

/// (u, u_t) snapshot.
struct StatePair {
  RealField u;
  RealField ut;
  double time = 0.0;

  /// Throws ValidationError if the fields live on different grids or time < 0.
  void validate() const;
  const GridSpec& grid() const { return u.grid(); }
};

enum class Norm { L1, L2, Linf };

inline constexpr double kHermitianTolerance = 1e-10;
inline constexpr double kImaginaryTolerance = 1e-10;
inline constexpr double kZeroModeTolerance = 1e-12;

SpectralField forward_transform(const RealField& f);

/// Rejects coefficient sets that are not Hermitian to within
/// kHermitianTolerance (relative to the largest coefficient) and discards
/// imaginary residue below kImaginaryTolerance.
RealField inverse_transform(const SpectralField& F);

/// Multiplies every coefficient by |xi|^(2 s). Negative powers require a
/// vanishing zero mode and leave it at exactly 0.
SpectralField frac_laplacian(const SpectralField& F, double s);

/// True if |c_0| <= kZeroModeTolerance * max |c_k|.
bool has_zero_mean(std::span<const cplx> coeffs);

/// Riemann-sum approximation of the whole-space L^q norm.
double lq_norm(const RealField& f, Norm q);
/// Same for any finite q >= 1.
double lq_norm(const RealField& f, double q);
double lq_norm(const GridSpec& grid, std::span<const double> values, Norm q);

/// Whole-space L^2 norm of the field with these coefficients. Equal to the
/// nodal Riemann sum by discrete Parseval, without a transform.
double parseval_l2(const GridSpec& grid, std::span<const cplx> coeffs);

/// Pairwise summation with a fixed split order, so the result depends only
/// on the input values.
double pairwise_sum(std::span<const double> values);

}  // namespace dampsim
