#include "dampsim/spectral_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dampsim/errors.hpp"
#include "dampsim/fft.hpp"

namespace dampsim {

void GridSpec::validate() const {
  if (dim < 1 || dim > 3) {
    throw ValidationError("grid.dim must be 1, 2 or 3 (got " + std::to_string(dim) + ")");
  }
  if (points < 4 || (points & (points - 1)) != 0) {
    throw ValidationError("grid.points must be a power of two >= 4 (got " +
                          std::to_string(points) + ")");
  }
  if (!(half_length > 0.0) || !std::isfinite(half_length)) {
    throw ValidationError("grid.half_length must be positive and finite");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ValidationError("grid.sigma must be positive and finite");
  }
}

std::size_t GridSpec::size() const {
  std::size_t total = 1;
  for (int d = 0; d < dim; ++d) total *= static_cast<std::size_t>(points);
  return total;
}

double GridSpec::cell_volume() const { return std::pow(spacing(), dim); }

double GridSpec::box_volume() const { return std::pow(2.0 * half_length, dim); }

double GridSpec::wavenumber(int i) const {
  return std::numbers::pi / half_length * signed_index(i);
}

std::array<int, 3> GridSpec::unflatten(std::size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  const auto n = static_cast<std::size_t>(points);
  for (int d = dim - 1; d >= 0; --d) {
    idx[static_cast<std::size_t>(d)] = static_cast<int>(flat % n);
    flat /= n;
  }
  return idx;
}

std::size_t GridSpec::flatten(const std::array<int, 3>& storage_index) const {
  std::size_t flat = 0;
  for (int d = 0; d < dim; ++d) {
    flat = flat * static_cast<std::size_t>(points) +
           static_cast<std::size_t>(storage_index[static_cast<std::size_t>(d)]);
  }
  return flat;
}

std::size_t GridSpec::mirror(std::size_t flat) const {
  auto idx = unflatten(flat);
  for (int d = 0; d < dim; ++d) {
    auto& i = idx[static_cast<std::size_t>(d)];
    i = (points - i) % points;
  }
  return flatten(idx);
}

std::vector<double> wavenumber_norms(const GridSpec& grid) {
  std::vector<double> axis(static_cast<std::size_t>(grid.points));
  for (int i = 0; i < grid.points; ++i) {
    const double k = grid.wavenumber(i);
    axis[static_cast<std::size_t>(i)] = k * k;
  }
  std::vector<double> out(grid.size());
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    const auto idx = grid.unflatten(flat);
    double sq = 0.0;
    for (int d = 0; d < grid.dim; ++d) sq += axis[static_cast<std::size_t>(idx[static_cast<std::size_t>(d)])];
    out[flat] = std::sqrt(sq);
  }
  return out;
}

std::vector<double> symbol(const GridSpec& grid, double s) {
  auto out = wavenumber_norms(grid);
  for (auto& r : out) {
    if (r == 0.0) {
      r = (s == 0.0) ? 1.0 : 0.0;
    } else {
      r = std::pow(r, 2.0 * s);
    }
  }
  return out;
}

RealField::RealField(const GridSpec& grid) : grid_(grid), values_(grid.size(), 0.0) {
  grid_.validate();
}

RealField::RealField(const GridSpec& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  grid_.validate();
  if (values_.size() != grid_.size()) {
    throw ValidationError("field length " + std::to_string(values_.size()) +
                          " does not match grid size " + std::to_string(grid_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw ValidationError("non-finite field value at index " + std::to_string(i));
    }
  }
}

SpectralField::SpectralField(const GridSpec& grid) : grid_(grid), coeffs_(grid.size()) {
  grid_.validate();
}

SpectralField::SpectralField(const GridSpec& grid, std::vector<cplx> coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
  grid_.validate();
  if (coeffs_.size() != grid_.size()) {
    throw ValidationError("coefficient count does not match grid size");
  }
}

std::size_t SpectralField::locate(const std::array<int, 3>& k) const {
  std::array<int, 3> storage{0, 0, 0};
  const int n = grid_.points;
  for (int d = 0; d < grid_.dim; ++d) {
    const int kd = k[static_cast<std::size_t>(d)];
    if (kd < -n / 2 || kd >= n / 2) {
      throw ValidationError("wavenumber index " + std::to_string(kd) + " outside [-N/2, N/2)");
    }
    storage[static_cast<std::size_t>(d)] = (kd + n) % n;
  }
  return grid_.flatten(storage);
}

cplx SpectralField::coeff(const std::array<int, 3>& k) const { return coeffs_[locate(k)]; }
cplx& SpectralField::coeff(const std::array<int, 3>& k) { return coeffs_[locate(k)]; }

void StatePair::validate() const {
  if (!(u.grid() == ut.grid())) throw ValidationError("u and u_t live on different grids");
  if (!(time >= 0.0) || !std::isfinite(time)) throw ValidationError("state time must be >= 0");
}

SpectralField forward_transform(const RealField& f) {
  const auto values = f.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw ValidationError("forward_transform: non-finite input value at index " +
                            std::to_string(i));
    }
  }
  SpectralField out(f.grid());
  fft::forward_real(f.grid(), values, out.coeffs());
  return out;
}

namespace {

std::string describe_mode(const GridSpec& grid, std::size_t flat) {
  const auto idx = grid.unflatten(flat);
  std::ostringstream os;
  os << "(";
  for (int d = 0; d < grid.dim; ++d) {
    if (d) os << ", ";
    os << grid.signed_index(idx[static_cast<std::size_t>(d)]);
  }
  os << ")";
  return os.str();
}

double max_abs(std::span<const cplx> c) {
  double m = 0.0;
  for (const auto& z : c) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace

RealField inverse_transform(const SpectralField& F) {
  const auto& grid = F.grid();
  const auto c = F.coeffs();
  const double scale = max_abs(c);

  double worst = 0.0;
  std::size_t worst_mode = 0;
  for (std::size_t flat = 0; flat < c.size(); ++flat) {
    const double gap = std::abs(c[grid.mirror(flat)] - std::conj(c[flat]));
    if (gap > worst) {
      worst = gap;
      worst_mode = flat;
    }
  }
  if (scale > 0.0 && worst > kHermitianTolerance * scale) {
    std::ostringstream os;
    os << "inverse_transform: coefficients are not Hermitian; worst mode k = "
       << describe_mode(grid, worst_mode) << " with |c(-k) - conj(c(k))| / max|c| = "
       << worst / scale;
    throw ValidationError(os.str());
  }

  std::vector<cplx> work(c.begin(), c.end());
  fft::inverse(grid, work);
  double real_scale = 0.0;
  double imag_worst = 0.0;
  for (const auto& z : work) {
    real_scale = std::max(real_scale, std::abs(z.real()));
    imag_worst = std::max(imag_worst, std::abs(z.imag()));
  }
  if (real_scale > 0.0 && imag_worst > kImaginaryTolerance * real_scale) {
    throw ValidationError("inverse_transform: imaginary residue too large");
  }
  std::vector<double> values(work.size());
  for (std::size_t i = 0; i < work.size(); ++i) values[i] = work[i].real();
  return RealField(grid, std::move(values));
}

bool has_zero_mean(std::span<const cplx> coeffs) {
  return std::abs(coeffs[0]) <= kZeroModeTolerance * max_abs(coeffs);
}

SpectralField frac_laplacian(const SpectralField& F, double s) {
  if (!std::isfinite(s)) throw ValidationError("frac_laplacian: power must be finite");
  if (s < 0.0 && !has_zero_mean(F.coeffs())) {
    throw ValidationError(
        "frac_laplacian: negative power requires a mean-zero field (|c_0| <= 1e-12 max|c|)");
  }
  const auto mult = symbol(F.grid(), s);
  SpectralField out = F;
  auto c = out.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= mult[i];
  return out;
}

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kBlock = 16;
  if (values.size() <= kBlock) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double lq_norm(const GridSpec& grid, std::span<const double> values, Norm q) {
  switch (q) {
    case Norm::Linf: {
      double m = 0.0;
      for (double v : values) m = std::max(m, std::abs(v));
      return m;
    }
    case Norm::L1: {
      std::vector<double> a(values.size());
      for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(values[i]);
      return grid.cell_volume() * pairwise_sum(a);
    }
    case Norm::L2: {
      std::vector<double> a(values.size());
      for (std::size_t i = 0; i < a.size(); ++i) a[i] = values[i] * values[i];
      return std::sqrt(grid.cell_volume() * pairwise_sum(a));
    }
  }
  return 0.0;
}

double parseval_l2(const GridSpec& grid, std::span<const cplx> coeffs) {
  std::vector<double> a(coeffs.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::norm(coeffs[i]);
  return std::sqrt(grid.box_volume() * pairwise_sum(a));
}

double lq_norm(const RealField& f, Norm q) { return lq_norm(f.grid(), f.values(), q); }

double lq_norm(const RealField& f, double q) {
  if (!(q >= 1.0) || !std::isfinite(q)) throw ValidationError("lq_norm: q must be finite and >= 1");
  if (q == 1.0) return lq_norm(f, Norm::L1);
  if (q == 2.0) return lq_norm(f, Norm::L2);
  const auto values = f.values();
  std::vector<double> a(values.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::pow(std::abs(values[i]), q);
  return std::pow(f.grid().cell_volume() * pairwise_sum(a), 1.0 / q);
}

}  // namespace dampsim
