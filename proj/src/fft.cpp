#include "cyfam/fft.hpp"

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace cyfam::fft {
namespace {

// FFTW plans are created once per shape and direction. Planning is not
// thread safe, execution through the new-array interface is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int dims, int n, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(dims, n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::size_t total = 1;
    std::vector<int> shape(static_cast<std::size_t>(dims), n);
    for (int d = 0; d < dims; ++d) total *= static_cast<std::size_t>(n);
    std::vector<fftw_complex> scratch(total);
    fftw_plan plan = fftw_plan_dft(dims, shape.data(), scratch.data(), scratch.data(), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw std::runtime_error("fftw planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void run(std::span<cplx> data, int dims, int n, int sign) {
  std::size_t total = 1;
  for (int d = 0; d < dims; ++d) total *= static_cast<std::size_t>(n);
  if (data.size() != total) throw std::invalid_argument("fft: data size does not match shape");
  fftw_plan plan = cache().get(dims, n, sign);
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, p, p);
}

}  // namespace

void forward(std::span<cplx> data, int dims, int n) { run(data, dims, n, FFTW_FORWARD); }

void inverse(std::span<cplx> data, int dims, int n) {
  run(data, dims, n, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(data.size());
  for (auto& v : data) v *= scale;
}

}  // namespace cyfam::fft
