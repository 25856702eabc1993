#include "cyfam/quadrature.hpp"

#include <boost/math/special_functions/legendre.hpp>
#include <map>
#include <mutex>

namespace cyfam {

const GaussRule& gauss_legendre01(int points) {
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(points); it != cache.end()) return it->second;

  GaussRule rule;
  const auto zeros = boost::math::legendre_p_zeros<double>(points);  // nonnegative half
  auto add = [&](double x) {
    const double dp = boost::math::legendre_p_prime(points, x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes.push_back(0.5 * (x + 1.0));
    rule.weights.push_back(0.5 * w);
  };
  for (double z : zeros) {
    add(z);
    if (z != 0.0) add(-z);
  }
  return cache.emplace(points, std::move(rule)).first->second;
}

double integrate_cell_singular(const std::function<double(double, double)>& f, int points) {
  const GaussRule& rule = gauss_legendre01(points);
  constexpr double a = 0.5;
  double total = 0.0;
  // Quadrants of [-1/2, 1/2]^2 around the singular point, each split along its
  // diagonal into two triangles with the singularity at the vertex.
  for (int sx : {1, -1})
    for (int sy : {1, -1})
      for (int swap : {0, 1}) {
        double part = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
          const double t = rule.nodes[i];
          const double rho = t * t * t;
          const double drho = 3.0 * t * t;
          for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
            const double sigma = rule.nodes[j];
            double x = a * rho;
            double y = a * rho * sigma;
            if (swap) std::swap(x, y);
            const double jac = a * a * rho * drho;
            part += rule.weights[i] * rule.weights[j] * jac * f(sx * x, sy * y);
          }
        }
        total += part;
      }
  return total;
}

}  // namespace cyfam
