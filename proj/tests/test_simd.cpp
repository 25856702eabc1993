#include <doctest.h>

#include <random>
#include <stdexcept>
#include <vector>

#include "cyfam/calculus.hpp"
#include "cyfam/simd/kernels.hpp"
#include "cyfam/torus.hpp"

using namespace cyfam;

namespace {

std::vector<cplx> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<cplx> v(n);
  for (auto& z : v) z = cplx(d(rng), d(rng));
  return v;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Restores the process-wide variant on scope exit.
struct IsaGuard {
  simd::Isa saved = simd::active_isa();
  ~IsaGuard() { simd::set_active_isa(saved); }
};

}  // namespace

TEST_SUITE("simd") {
  TEST_CASE("scalar is always available and the active variant is supported") {
    CHECK(simd::isa_supported(simd::Isa::scalar));
    CHECK(simd::isa_supported(simd::active_isa()));
  }

  TEST_CASE("unsupported variants are rejected") {
    IsaGuard guard;
    for (simd::Isa isa : {simd::Isa::avx2, simd::Isa::neon})
      if (!simd::isa_supported(isa)) CHECK_THROWS_AS(simd::set_active_isa(isa), std::invalid_argument);
  }

  TEST_CASE("every supported variant matches the scalar reference") {
    std::mt19937_64 rng(11);
    const simd::KernelTable& ref = simd::kernels(simd::Isa::scalar);
    for (simd::Isa isa : {simd::Isa::avx2, simd::Isa::neon}) {
      if (!simd::isa_supported(isa)) continue;
      CAPTURE(simd::isa_name(isa));
      const simd::KernelTable& k = simd::kernels(isa);
      // odd lengths exercise the remainder loops
      for (std::size_t n : {0u, 1u, 2u, 3u, 7u, 64u, 1001u}) {
        CAPTURE(n);
        const auto a = random_vec(n, rng), b = random_vec(n, rng), y0 = random_vec(n, rng);
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = a[i].real() - 0.3;

        std::vector<cplx> o1(n), o2(n);
        ref.cmul(a.data(), b.data(), o1.data(), n);
        k.cmul(a.data(), b.data(), o2.data(), n);
        CHECK(max_diff(o1, o2) <= 1e-15 * 8);

        o1 = y0;
        o2 = y0;
        ref.cmul_acc(a.data(), b.data(), o1.data(), n);
        k.cmul_acc(a.data(), b.data(), o2.data(), n);
        CHECK(max_diff(o1, o2) <= 1e-14);

        o1 = y0;
        o2 = y0;
        ref.cmulc_acc(a.data(), b.data(), o1.data(), n);
        k.cmulc_acc(a.data(), b.data(), o2.data(), n);
        CHECK(max_diff(o1, o2) <= 1e-14);

        ref.scale_real(a.data(), r.data(), o1.data(), n);
        k.scale_real(a.data(), r.data(), o2.data(), n);
        CHECK(max_diff(o1, o2) == 0.0);

        o1 = y0;
        o2 = y0;
        ref.axpy(cplx(0.7, -1.1), a.data(), o1.data(), n);
        k.axpy(cplx(0.7, -1.1), a.data(), o2.data(), n);
        CHECK(max_diff(o1, o2) <= 1e-14);

        const cplx s1 = ref.weighted_sum(a.data(), r.data(), n), s2 = k.weighted_sum(a.data(), r.data(), n);
        CHECK(std::abs(s1 - s2) <= 1e-13 * (1.0 + static_cast<double>(n)));
        CHECK(ref.max_abs(a.data(), n) == k.max_abs(a.data(), n));
      }
    }
  }

  TEST_CASE("the spectral calculus gives the same answer under every variant") {
    IsaGuard guard;
    const auto g = FiberGrid::make(preset_family("siegel-e").period(cplx(0.05, 0.1)), 8);
    std::mt19937_64 rng(5);
    const TensorField f = TensorField::scalar(g, random_vec(g->size(), rng));
    const MetricField m = MetricField::flat(g);
    simd::set_active_isa(simd::Isa::scalar);
    const TensorField ref = spectral_derivative(spectral_derivative(f, Derivative::holo), Derivative::anti);
    const cplx ref_int = integrate(f, m);
    for (simd::Isa isa : {simd::Isa::avx2, simd::Isa::neon}) {
      if (!simd::isa_supported(isa)) continue;
      simd::set_active_isa(isa);
      const TensorField d = spectral_derivative(spectral_derivative(f, Derivative::holo), Derivative::anti);
      CHECK((d - ref).sup_norm() <= 1e-12 * (1.0 + ref.sup_norm()));
      CHECK(std::abs(integrate(f, m) - ref_int) <= 1e-13);
    }
  }
}
