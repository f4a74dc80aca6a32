#include "dampsim/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace dampsim::fft {
namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int dim, int points, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_tuple(dim, points, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;

    std::size_t total = 1;
    for (int d = 0; d < dim; ++d) total *= static_cast<std::size_t>(points);
    std::vector<fftw_complex> scratch(total);
    std::vector<int> n(dim, points);
    fftw_plan plan = fftw_plan_dft(dim, n.data(), scratch.data(), scratch.data(), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

// exp(-i xi_k x_j) with x_j = -L + j dx differs from the plain DFT kernel by
// (-1)^(k_1 + ... + k_n); the same factor appears in both directions.
void apply_checkerboard(const GridSpec& grid, std::span<cplx> data) {
  const std::size_t n = static_cast<std::size_t>(grid.points);
  if (grid.dim == 1) {
    for (std::size_t i = 1; i < n; i += 2) data[i] = -data[i];
    return;
  }
  const std::size_t row = n;
  const std::size_t rows = data.size() / row;
  for (std::size_t r = 0; r < rows; ++r) {
    // parity of the leading indices
    std::size_t rem = r;
    int parity = 0;
    for (int d = 0; d < grid.dim - 1; ++d) {
      parity += static_cast<int>(rem % n);
      rem /= n;
    }
    const std::size_t start = (parity % 2 == 0) ? 1 : 0;
    cplx* base = data.data() + r * row;
    for (std::size_t i = start; i < row; i += 2) base[i] = -base[i];
  }
}

void execute(const GridSpec& grid, std::span<cplx> data, int sign) {
  fftw_plan plan = cache().get(grid.dim, grid.points, sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
}

}  // namespace

void forward(const GridSpec& grid, std::span<cplx> data) {
  execute(grid, data, FFTW_FORWARD);
  apply_checkerboard(grid, data);
  const double scale = 1.0 / static_cast<double>(data.size());
  for (auto& c : data) c *= scale;
}

void inverse(const GridSpec& grid, std::span<cplx> data) {
  apply_checkerboard(grid, data);
  execute(grid, data, FFTW_BACKWARD);
}

void forward_real(const GridSpec& grid, std::span<const double> in, std::span<cplx> out) {
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = cplx(in[i], 0.0);
  forward(grid, out);
}

void inverse_real(const GridSpec& grid, std::span<const cplx> in, std::span<double> out,
                  std::span<cplx> scratch) {
  std::copy(in.begin(), in.end(), scratch.begin());
  inverse(grid, scratch);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = scratch[i].real();
}

}  // namespace dampsim::fft
