#include "cyfam/theta.hpp"

#include <Eigen/QR>
#include <cmath>
#include <sstream>
#include <vector>

#include "cyfam/error.hpp"
#include "cyfam/quadrature.hpp"

namespace cyfam {

double log_abs_theta1(cplx v, cplx tau) {
  const cplx q = std::exp(I * pi * tau);
  cplx sum = 0.0;
  double prev = 0.0;
  for (int n = 0; n < 200; ++n) {
    const double e = (n + 0.5) * (n + 0.5);
    const cplx term = std::pow(q, e) * std::sin((2.0 * n + 1.0) * v);
    sum += (n % 2 == 0 ? 1.0 : -1.0) * term;
    const double mag = std::abs(term);
    if (n > 2 && mag < 1e-18 * std::abs(sum) && prev < 1e-17 * std::abs(sum)) break;
    prev = mag;
  }
  return std::log(2.0 * std::abs(sum));
}

double log_abs_eta(cplx tau) {
  const cplx q2 = std::exp(2.0 * pi * I * tau);
  double acc = -pi * tau.imag() / 12.0;  // log |e^{i pi tau / 12}|
  cplx qk = q2;
  for (int k = 1; k < 400; ++k) {
    acc += std::log(std::abs(1.0 - qk));
    if (std::abs(qk) < 1e-18) break;
    qk *= q2;
  }
  return acc;
}

double ThetaGreenOracle::log_part(double x, double y) const {
  const cplx w = x + tau_ * y;
  return -(log_abs_theta1(pi * w, tau_) - log_abs_eta(tau_)) / pi;
}

ThetaGreenOracle::ThetaGreenOracle(cplx tau) : tau_(tau) {
  if (!(tau.imag() > 0.0)) throw InvalidPeriod("theta oracle needs Im tau > 0");

  // Coarse probe set away from the lattice points.
  std::vector<std::pair<double, double>> probes;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) probes.emplace_back(0.3 + 0.1 * i, 0.3 + 0.1 * j);

  auto lpart = [this](double x, double y) { return log_part(x, y); };
  auto ppart = [this](double x, double y) { return quadratic_part(x, y); };

  const double mean_l = integrate_cell_singular([&](double x, double y) { return log_part(x, y); }, 64);
  const double mean_p = integrate_cell_singular([&](double x, double y) { return quadratic_part(x, y); }, 64);

  // Rows: PDE (box G = -1 off the diagonal), periodicity in x and y, zero mean.
  const auto rows = static_cast<Eigen::Index>(3 * probes.size() + 1);
  RMat a = RMat::Zero(rows, 3);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(rows);
  Eigen::Index r = 0;
  for (const auto& [x, y] : probes) {
    a(r, 0) = box(lpart, x, y);
    a(r, 1) = box(ppart, x, y);
    b(r) = -1.0;
    ++r;
    a(r, 0) = log_part(x + 1.0, y) - log_part(x, y);
    a(r, 1) = quadratic_part(x + 1.0, y) - quadratic_part(x, y);
    ++r;
    a(r, 0) = log_part(x, y + 1.0) - log_part(x, y);
    a(r, 1) = quadratic_part(x, y + 1.0) - quadratic_part(x, y);
    ++r;
  }
  a(r, 0) = mean_l;
  a(r, 1) = mean_p;
  a(r, 2) = 1.0;

  const Eigen::VectorXd sol = a.colPivHouseholderQr().solve(b);
  a1_ = sol(0);
  a2_ = sol(1);
  c_ = sol(2);
  fit_residual_ = (a * sol - b).cwiseAbs().maxCoeff();
  if (!(fit_residual_ < 1e-9)) {
    std::ostringstream os;
    os << "theta Green oracle fit residual " << fit_residual_ << " exceeds 1e-9";
    throw AccuracyError(os.str());
  }
}

double ThetaGreenOracle::operator()(double x, double y) const {
  // Reduce to the cell [-1/2, 1/2)^2 for stable theta evaluation.
  x -= std::floor(x + 0.5);
  y -= std::floor(y + 0.5);
  if (std::abs(x) < 1e-14 && std::abs(y) < 1e-14) throw SingularPoint("theta Green kernel at the origin");
  return a1_ * log_part(x, y) + a2_ * quadratic_part(x, y) + c_;
}

}  // namespace cyfam
