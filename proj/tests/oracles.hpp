#pragma once

// Reference values computed independently of the library: closed forms and
// numbers frozen from high-precision Ewald sums (mpmath, 25 digits).

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double pi = 3.14159265358979323846;

// -d_s d_sbar log Im(tau + s) at s = 0
inline double wp_elliptic(cplx tau) { return 0.25 / (tau.imag() * tau.imag()); }

// Omega(s) = i I + s [[0,1],[1,0]]: -d d-bar log det Im Omega at 0
inline constexpr double wp_siegel_e = 0.5;

// theta_1(v | tau) by its q-series, q = e^{i pi tau}
inline cplx theta1(cplx v, cplx tau) {
  cplx acc = 0.0;
  for (int n = 0; n < 40; ++n) {
    const double e = (n + 0.5) * (n + 0.5);
    const cplx term = std::exp(cplx(0.0, pi) * tau * e) * std::sin((2.0 * n + 1.0) * v);
    acc += (n % 2 ? -1.0 : 1.0) * term;
    if (std::abs(term) < 1e-300) break;
  }
  return 2.0 * acc;
}

inline double log_abs_eta(cplx tau) {
  const cplx q2 = std::exp(cplx(0.0, 2.0 * pi) * tau);
  double acc = -pi * tau.imag() / 12.0;
  cplx p = 1.0;
  for (int k = 1; k < 200; ++k) {
    p *= q2;
    acc += std::log(std::abs(1.0 - p));
    if (std::abs(p) < 1e-18) break;
  }
  return acc;
}

// Zero-mean Green kernel of the unit-volume flat metric on C/(Z + tau Z),
// box G = delta - 1; lattice coordinates (x, y), z = x + tau y.
inline double green_theta(double x, double y, cplx tau) {
  x -= std::floor(x);
  y -= std::floor(y);
  const cplx z = x + tau * y;
  return -(std::log(std::abs(theta1(pi * z, tau))) - log_abs_eta(tau)) / pi + tau.imag() * y * y;
}

// Integral over (0, t0] of the Gaussian image sum, summed over image energies
// e (heat kernel (4 pi t)^{-n} / sqrt(det R) sum exp(-e / t)):
//   (4 pi)^{-n} e^{1-n} Gamma(n-1, e/t0) / sqrt(det R), E_1 for n = 1.
inline double image_time_integral(const std::vector<double>& energies, int n, double t0, double sqrt_det_r) {
  double acc = 0.0;
  for (double e : energies) {
    const double x = e / t0;
    const double term = n == 1 ? boost::math::expint(1, x) : std::pow(e, 1.0 - n) * boost::math::tgamma(n - 1.0, x);
    acc += term;
  }
  return acc * std::pow(4.0 * pi, -n) / sqrt_det_r;
}

struct KernelSample {
  std::vector<double> u;
  double value;
};

// Ewald sums, t0 = 0.05, image radius 6 (n = 1) / 2 (n = 2), mode cut lambda t0 <= 60.
inline const std::vector<KernelSample>& ewald_tau_i() {
  static const std::vector<KernelSample> v = {
      {{0.5, 0.5}, -0.1103178000763258},
      {{0.25, 0.1}, 0.036803436763442303},
      {{0.5, 0.0}, -0.055158900038162898},
      {{0.1, 0.3}, 5.7152918974042235e-18},
  };
  return v;
}
inline const std::vector<KernelSample>& ewald_tau_2i() {
  static const std::vector<KernelSample> v = {
      {{0.5, 0.5}, -0.16785441310387648},
      {{0.25, 0.1}, 0.14093692404038124},
      {{0.5, 0.0}, 0.11269551306571358},
      {{0.1, 0.3}, -0.080665120296926069},
  };
  return v;
}
// tau = 0.3 + 1.2 i
inline const std::vector<KernelSample>& ewald_tau_skew() {
  static const std::vector<KernelSample> v = {
      {{0.5, 0.5}, -0.10866917330108171},
      {{0.25, 0.1}, 0.038999673693716232},
      {{0.5, 0.0}, -0.020530969036682317},
      {{0.1, 0.3}, -0.039927645300939206},
  };
  return v;
}
// Omega = i I, n = 2
inline const std::vector<KernelSample>& ewald_siegel() {
  static const std::vector<KernelSample> v = {
      {{0.5, 0.5, 0.5, 0.5}, -0.14046098554536575},
      {{0.5, 0.0, 0.0, 0.0}, 0.04446222515960623},
      {{0.25, 0.1, 0.3, 0.2}, 0.010280481119358937},
  };
  return v;
}

// Random real trigonometric polynomial with |k_a| <= kmax, zero constant term optional.
struct TrigPoly {
  std::vector<std::vector<int>> k;
  std::vector<cplx> c;

  double operator()(const std::vector<double>& u) const {
    double acc = 0.0;
    for (std::size_t m = 0; m < k.size(); ++m) {
      double arg = 0.0;
      for (std::size_t a = 0; a < u.size(); ++a) arg += k[m][a] * u[a];
      acc += 2.0 * std::real(c[m] * std::exp(cplx(0.0, 2.0 * pi * arg)));
    }
    return acc;
  }
};

inline TrigPoly random_trig(int dims, int kmax, int terms, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kd(-kmax, kmax);
  std::normal_distribution<double> nd(0.0, 1.0);
  TrigPoly p;
  while (static_cast<int>(p.k.size()) < terms) {
    std::vector<int> k(static_cast<std::size_t>(dims));
    bool zero = true;
    for (int& v : k) {
      v = kd(rng);
      zero = zero && v == 0;
    }
    if (zero) continue;
    p.k.push_back(k);
    p.c.emplace_back(nd(rng), nd(rng));
  }
  return p;
}

}  // namespace oracle
