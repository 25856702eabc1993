#include "cyfam/green.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "cyfam/error.hpp"

namespace cyfam {

namespace {

constexpr double kRoundoffFloor = 1e-13;

void box_indices(int dims, int radius, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> k(static_cast<std::size_t>(dims), -radius);
  while (true) {
    f(k);
    int i = dims - 1;
    while (i >= 0 && ++k[static_cast<std::size_t>(i)] > radius) k[static_cast<std::size_t>(i--)] = -radius;
    if (i < 0) return;
  }
}

}  // namespace

GreenOperator::GreenOperator(PeriodMatrix omega, GreenOptions opts) : period_(std::move(omega)), opts_(opts) {
  const int n = period_.n();
  const int d = 2 * n;
  const RMat im = period_.imag();
  t0_ = opts_.t0_scale * Eigen::SelfAdjointEigenSolver<RMat>(im).eigenvalues().maxCoeff();

  // R = Re(J G^{-1} J^H) with J the du/dz Jacobian, so box = -div R grad in lattice coordinates.
  const CMat om = period_.omega();
  const CMat m = (om - om.conjugate()).inverse();
  CMat jz(d, n), jb(d, n);
  jz.topRows(n) = CMat::Identity(n, n) - om * m;
  jz.bottomRows(n) = m;
  jb.topRows(n) = om * m;
  jb.bottomRows(n) = -m;
  const CMat ginv = flat_metric(period_).inverse();
  const CMat q = jz * ginv.transpose() * jb.transpose();
  r_ = (0.5 * (q + q.transpose())).real();
  rinv_ = r_.inverse();
  sqrt_det_r_ = std::sqrt(r_.determinant());

  Eigen::SelfAdjointEigenSolver<RMat> es(r_);
  const double rmin = es.eigenvalues().minCoeff();
  const double rinv_min = 1.0 / es.eigenvalues().maxCoeff();

  const double cut = opts_.exponent_cutoff;
  const int kmax = static_cast<int>(std::floor(std::sqrt(cut / (t0_ * 4.0 * pi * pi * rmin)))) + 1;
  lambda_min_ = std::numeric_limits<double>::infinity();
  box_indices(d, kmax, [&](const std::vector<int>& k) {
    if (std::all_of(k.begin(), k.end(), [](int v) { return v == 0; })) return;
    const double lam = eigenvalue(k);
    lambda_min_ = std::min(lambda_min_, lam);
    if (lam * t0_ <= cut) modes_.push_back({k, lam});
  });
  // Images beyond this box have exponent a / t0 > cut for every reduced u.
  const int mmax = static_cast<int>(std::ceil(0.5 + std::sqrt(4.0 * t0_ * cut / rinv_min)));
  box_indices(d, mmax, [&](const std::vector<int>& m) { images_.push_back(m); });
}

double GreenOperator::eigenvalue(std::span<const int> k) const {
  double acc = 0.0;
  const int d = static_cast<int>(r_.rows());
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) acc += k[static_cast<std::size_t>(a)] * r_(a, b) * k[static_cast<std::size_t>(b)];
  return 4.0 * pi * pi * acc;
}

std::vector<double> GreenOperator::reduce(std::span<const double> u) const {
  if (static_cast<int>(u.size()) != 2 * n()) throw ShapeError("fiber point has wrong dimension");
  std::vector<double> v(u.begin(), u.end());
  for (double& x : v) x -= std::round(x);
  return v;
}

double GreenOperator::heat_kernel_spectral(double t, std::span<const double> u) const {
  const std::vector<double> v = reduce(u);
  double acc = 1.0;
  for (const Mode& m : modes_) {
    double arg = 0.0;
    for (std::size_t a = 0; a < v.size(); ++a) arg += m.k[a] * v[a];
    acc += std::exp(-m.lambda * t) * std::cos(2.0 * pi * arg);
  }
  return acc;
}

std::vector<double> GreenOperator::image_exponents(std::span<const double> v, double t_max) const {
  const int d = 2 * n();
  std::vector<double> out;
  Eigen::VectorXd w(d);
  for (const auto& m : images_) {
    for (int a = 0; a < d; ++a) w(a) = v[static_cast<std::size_t>(a)] + m[static_cast<std::size_t>(a)];
    const double e = 0.25 * w.dot(rinv_ * w);
    if (e <= opts_.exponent_cutoff * t_max) out.push_back(e);
  }
  return out;
}

double GreenOperator::image_sum(const std::vector<double>& exponents, double t) const {
  double acc = 0.0;
  for (double e : exponents) acc += std::exp(-e / t);
  return std::pow(4.0 * pi * t, -n()) / sqrt_det_r_ * acc;
}

double GreenOperator::heat_kernel_images(double t, std::span<const double> u) const {
  const std::vector<double> v = reduce(u);
  return image_sum(image_exponents(v, std::max(t, t0_)), t);
}

double GreenOperator::heat_kernel(double t, std::span<const double> u) const {
  if (!(t > 0.0)) throw DomainError("heat kernel needs t > 0");
  return t >= t0_ ? heat_kernel_spectral(t, u) : heat_kernel_images(t, u);
}

GreenOperator::Value GreenOperator::kernel(std::span<const double> u) const {
  const std::vector<double> v = reduce(u);
  if (std::all_of(v.begin(), v.end(), [](double x) { return std::abs(x) < 1e-14; }))
    throw SingularPoint("Green kernel evaluated on the diagonal");
  // Large times: exact integral of each Fourier mode from t0 to infinity.
  double spectral = 0.0;
  for (const Mode& m : modes_) {
    double arg = 0.0;
    for (std::size_t a = 0; a < v.size(); ++a) arg += m.k[a] * v[a];
    spectral += std::exp(-m.lambda * t0_) / m.lambda * std::cos(2.0 * pi * arg);
  }
  // Small times: image sum integrated numerically.
  double err = 0.0;
  const std::vector<double> ex = image_exponents(v, t0_);
  if (ex.empty()) return {spectral - t0_, 0.0};
  // t = t0 e^{-x}: each image becomes a smooth step in x, which GK handles at full precision.
  const double emin = *std::min_element(ex.begin(), ex.end());
  const double xmax = std::max(1.0, std::log(t0_ * (opts_.exponent_cutoff + 20.0) / emin));
  auto f = [&](double x) {
    const double t = t0_ * std::exp(-x);
    return image_sum(ex, t) * t;
  };
  const double small =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, xmax, 15, opts_.quadrature_tol, &err);
  return {spectral + small - t0_, err};
}

TensorField green_apply(const TensorField& chi, const MetricField& g) {
  const cplx h = harmonic_projection(chi, g);
  TensorField f = chi;
  for (auto& z : f.values()) z -= h;
  return poisson_solve(f, g);
}

TensorField green_apply(const GreenOperator& op, const TensorField& chi) {
  if ((chi.fiber().period().omega() - op.period().omega()).cwiseAbs().maxCoeff() > 1e-14)
    throw ShapeError("field and Green operator belong to different fibers");
  return green_apply(chi, MetricField::flat(chi.grid()));
}

LowerBound green_lower_bound(const GreenOperator& op, double tol, int coarse_points) {
  if (!(tol > 0.0)) throw AccuracyError("Green lower bound needs a positive tolerance");
  const int n = op.n();
  const int d = 2 * n;
  if (coarse_points <= 0) coarse_points = n == 1 ? 64 : 8;
  LowerBound out;
  out.coarse_points = coarse_points;

  // Coarse search, split across threads by the first coordinate.
  struct Best {
    double value;
    std::vector<double> u;
  };
  std::vector<std::future<Best>> jobs;
  for (int i0 = 0; i0 < coarse_points; ++i0) {
    jobs.push_back(std::async(std::launch::async, [&, i0] {
      Best best{std::numeric_limits<double>::infinity(), {}};
      std::vector<double> u(static_cast<std::size_t>(d));
      std::vector<int> idx(static_cast<std::size_t>(d - 1), 0);
      while (true) {
        u[0] = static_cast<double>(i0) / coarse_points;
        bool origin = i0 == 0;
        for (int a = 1; a < d; ++a) {
          u[static_cast<std::size_t>(a)] = static_cast<double>(idx[static_cast<std::size_t>(a - 1)]) / coarse_points;
          origin = origin && idx[static_cast<std::size_t>(a - 1)] == 0;
        }
        if (!origin) {
          const double g = op.green_kernel(u);
          if (g < best.value) best = {g, u};
        }
        int a = d - 2;
        while (a >= 0 && ++idx[static_cast<std::size_t>(a)] == coarse_points) idx[static_cast<std::size_t>(a--)] = 0;
        if (a < 0) break;
      }
      return best;
    }));
  }
  Best best{std::numeric_limits<double>::infinity(), {}};
  for (auto& j : jobs) {
    Best b = j.get();
    if (b.value < best.value) best = std::move(b);
  }

  // Newton refinement with central differences.
  std::vector<double> u = best.u;
  const double step = 1e-4;
  Eigen::VectorXd grad(d);
  RMat hess(d, d);
  double last = 0.0;
  auto eval = [&](const std::vector<double>& p) { return op.green_kernel(p); };
  auto derivatives = [&](const std::vector<double>& p) {
    const double g0 = eval(p);
    for (int a = 0; a < d; ++a) {
      std::vector<double> pp = p, pm = p;
      pp[static_cast<std::size_t>(a)] += step;
      pm[static_cast<std::size_t>(a)] -= step;
      const double gp = eval(pp), gm = eval(pm);
      grad(a) = (gp - gm) / (2 * step);
      hess(a, a) = (gp - 2 * g0 + gm) / (step * step);
      for (int b = a + 1; b < d; ++b) {
        std::vector<double> q1 = p, q2 = p, q3 = p, q4 = p;
        q1[static_cast<std::size_t>(a)] += step, q1[static_cast<std::size_t>(b)] += step;
        q2[static_cast<std::size_t>(a)] += step, q2[static_cast<std::size_t>(b)] -= step;
        q3[static_cast<std::size_t>(a)] -= step, q3[static_cast<std::size_t>(b)] += step;
        q4[static_cast<std::size_t>(a)] -= step, q4[static_cast<std::size_t>(b)] -= step;
        hess(a, b) = hess(b, a) = (eval(q1) - eval(q2) - eval(q3) + eval(q4)) / (4 * step * step);
      }
    }
  };
  for (int it = 0; it < 30; ++it) {
    derivatives(u);
    Eigen::LLT<RMat> llt(hess);
    if (llt.info() != Eigen::Success) break;  // not locally convex: keep the grid minimum
    const Eigen::VectorXd dx = -llt.solve(grad);
    std::vector<double> trial = u;
    for (int a = 0; a < d; ++a) trial[static_cast<std::size_t>(a)] += dx(a);
    if (eval(trial) > eval(u) + 1e-15) break;
    u = std::move(trial);
    last = dx.norm();
    if (last < 1e-11) break;
  }
  derivatives(u);
  const GreenOperator::Value v = op.kernel(u);
  const double hnorm = Eigen::SelfAdjointEigenSolver<RMat>(hess).eigenvalues().cwiseAbs().maxCoeff();
  out.minimum = v.value;
  out.minimizer = u;
  out.quadrature_error = v.error;
  out.gradient = grad.norm();
  // the last term covers floating-point error of a single kernel evaluation
  out.margin = 10.0 * v.error + out.gradient * std::max(last, 1e-12) + 0.5 * hnorm * last * last +
               kRoundoffFloor * (1.0 + std::abs(v.value));
  if (10.0 * v.error > tol)
    throw AccuracyError("kernel quadrature error " + std::to_string(v.error) + " exceeds tolerance");
  out.c = std::max(0.0, -out.minimum) + out.margin;
  return out;
}

FamilyBound green_family_bound(const std::vector<PeriodMatrix>& samples, double tol, GreenOptions opts) {
  FamilyBound out;
  for (const auto& p : samples) {
    const double c = green_lower_bound(GreenOperator(p, opts), tol).c;
    out.per_sample.push_back(c);
    out.c = std::max(out.c, c);
  }
  return out;
}

double verify_green_reconstruction(const AdmissibleForm& w, const TensorField& a) {
  const TensorField rhs = green_apply(inner_product(a, a, w.metric()), w.metric());
  return (phi(w) - rhs).sup_norm();
}

std::string kernel_profile_csv(const GreenOperator& op, int samples) {
  if (op.n() != 1) throw ShapeError("kernel profile is available for one-dimensional fibers");
  std::ostringstream os;
  os.precision(17);
  os << "line,t,x,y,G\n";
  for (int i = 1; i < samples; ++i) {
    const double t = static_cast<double>(i) / samples;
    const double d1[2] = {t, t};
    const double d2[2] = {0.5, t};
    os << "diagonal," << t << ',' << t << ',' << t << ',' << op.green_kernel(d1) << '\n';
    os << "half," << t << ",0.5," << t << ',' << op.green_kernel(d2) << '\n';
  }
  return os.str();
}

}  // namespace cyfam
