#include "cyfam/torus.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <sstream>

#include "cyfam/error.hpp"

namespace cyfam {

PeriodMatrix::PeriodMatrix(CMat omega, double symmetry_tol) : omega_(std::move(omega)) {
  if (omega_.rows() == 0 || omega_.rows() != omega_.cols())
    throw InvalidPeriod("period matrix must be square and nonempty");
  const double asym = (omega_ - omega_.transpose()).cwiseAbs().maxCoeff();
  if (asym > symmetry_tol) {
    std::ostringstream os;
    os << "period matrix is not symmetric (deviation " << asym << ")";
    throw InvalidPeriod(os.str());
  }
  Eigen::LLT<RMat> llt(omega_.imag());
  if (llt.info() != Eigen::Success || omega_.imag().diagonal().minCoeff() <= 0.0)
    throw InvalidPeriod("imaginary part of the period matrix is not positive definite");
}

PeriodFamily::PeriodFamily(std::string name, std::vector<CMat> coefficients, double domain_radius)
    : name_(std::move(name)), coefficients_(std::move(coefficients)), domain_radius_(domain_radius) {
  if (coefficients_.empty()) throw ConfigError("period family needs at least one coefficient");
  const auto n = coefficients_.front().rows();
  for (const auto& c : coefficients_)
    if (c.rows() != n || c.cols() != n) throw ConfigError("period family coefficients differ in shape");
  if (!(domain_radius_ > 0.0)) throw ConfigError("domain radius must be positive");
}

CMat PeriodFamily::omega_at(cplx s) const {
  // Horner
  CMat acc = coefficients_.back();
  for (auto k = coefficients_.size() - 1; k-- > 0;) acc = (acc * s + coefficients_[k]).eval();
  return acc;
}

CMat PeriodFamily::derivative_at(cplx s) const {
  const auto n = coefficients_.front().rows();
  CMat acc = CMat::Zero(n, n);
  cplx power = 1.0;
  for (std::size_t k = 1; k < coefficients_.size(); ++k) {
    acc += static_cast<double>(k) * power * coefficients_[k];
    power *= s;
  }
  return acc;
}

CMat PeriodFamily::second_derivative_at(cplx s) const {
  const auto n = coefficients_.front().rows();
  CMat acc = CMat::Zero(n, n);
  cplx power = 1.0;
  for (std::size_t k = 2; k < coefficients_.size(); ++k) {
    acc += static_cast<double>(k * (k - 1)) * power * coefficients_[k];
    power *= s;
  }
  return acc;
}

PeriodMatrix PeriodFamily::period(cplx s) const {
  if (!contains(s)) {
    std::ostringstream os;
    os << "base point " << format_complex(s) << " outside the domain |s| <= " << domain_radius_
       << " of family '" << name_ << "'";
    throw DomainError(os.str());
  }
  return PeriodMatrix(omega_at(s), 1e-12);
}

PeriodFamily PeriodFamily::recentered(cplx s0) const {
  // Taylor shift: coefficient j of Omega(s0 + t) is sum_k binom(k, j) s0^(k-j) c_k.
  const auto deg = coefficients_.size();
  const auto n = coefficients_.front().rows();
  std::vector<CMat> shifted(deg, CMat::Zero(n, n));
  for (std::size_t k = 0; k < deg; ++k) {
    double binom = 1.0;
    for (std::size_t j = 0; j <= k; ++j) {
      if (j > 0) binom = binom * static_cast<double>(k - j + 1) / static_cast<double>(j);
      cplx power = 1.0;  // complex pow(0, 0) is NaN
      for (std::size_t e = j; e < k; ++e) power *= s0;
      shifted[j] += binom * power * coefficients_[k];
    }
  }
  return PeriodFamily(name_, std::move(shifted), domain_radius_);
}

void PeriodFamily::validate_domain() const {
  constexpr int ring = 64;
  for (double frac : {0.0, 0.5, 1.0}) {
    const int count = frac == 0.0 ? 1 : ring;
    for (int k = 0; k < count; ++k) {
      const cplx s = frac * domain_radius_ * std::exp(I * (2.0 * pi * k / ring));
      try {
        PeriodMatrix(omega_at(s), 1e-12);
      } catch (const InvalidPeriod& e) {
        throw InvalidPeriod("family '" + name_ + "' degenerates at s = " + format_complex(s) + ": " +
                            e.what());
      }
    }
  }
}

cplx PeriodFamily::solve_for_period(cplx tau) const {
  if (n() != 1) throw ConfigError("solve_for_period requires one-dimensional fibers");
  cplx s = 0.0;
  for (int it = 0; it < 100; ++it) {
    const cplx f = omega_at(s)(0, 0) - tau;
    if (std::abs(f) < 1e-15 * (1.0 + std::abs(tau))) return s;
    const cplx df = derivative_at(s)(0, 0);
    if (std::abs(df) == 0.0) break;
    s -= f / df;
  }
  if (std::abs(omega_at(s)(0, 0) - tau) < 1e-12 * (1.0 + std::abs(tau))) return s;
  throw ConfigError("no base point of family '" + name_ + "' has period " + format_complex(tau));
}

namespace {

CMat scalar(cplx v) {
  CMat m(1, 1);
  m(0, 0) = v;
  return m;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> list = {
      {"elliptic", "elliptic curves, Omega(s) = i + s",
       [] { return PeriodFamily("elliptic", {scalar(I), scalar(1.0)}, 0.5); }},
      {"elliptic2i", "elliptic curves, Omega(s) = 2i + s",
       [] { return PeriodFamily("elliptic2i", {scalar(2.0 * I), scalar(1.0)}, 0.5); }},
      {"siegel-e", "abelian surfaces, Omega(s) = i I + s E with E = [[0,1],[1,0]]",
       [] {
         CMat e(2, 2);
         e << 0.0, 1.0, 1.0, 0.0;
         return PeriodFamily("siegel-e", {I * CMat::Identity(2, 2), e}, 0.5);
       }},
      {"constant", "isotrivial family, Omega(s) = i (no deformation)",
       [] { return PeriodFamily("constant", {scalar(I)}, 1.0); }},
      {"product", "product of elliptic families, Omega(s) = diag(i + s, 2i + s)",
       [] {
         CMat c0 = CMat::Zero(2, 2);
         c0(0, 0) = I;
         c0(1, 1) = 2.0 * I;
         return PeriodFamily("product", {c0, CMat::Identity(2, 2)}, 0.5);
       }},
  };
  return list;
}

PeriodFamily preset_family(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return p.make();
  throw ConfigError("unknown preset '" + name + "'");
}

CMat flat_metric(const PeriodMatrix& omega) {
  const RMat im = omega.imag();
  return (0.5 * im.inverse()).cast<cplx>();
}

double flat_volume(const PeriodMatrix& omega, const CMat& g) {
  const double n = omega.n();
  return g.determinant().real() * std::pow(2.0, n) * omega.imag().determinant();
}

namespace {

CMat m_matrix(const CMat& omega) { return (omega - omega.conjugate()).inverse(); }

}  // namespace

CMat ks_closed_form(const PeriodFamily& fam, cplx s) {
  const PeriodMatrix p = fam.period(s);
  return -fam.derivative_at(s) * m_matrix(p.omega());
}

KsDerivatives ks_closed_form_derivatives(const PeriodFamily& fam, cplx s) {
  const PeriodMatrix p = fam.period(s);
  const CMat m = m_matrix(p.omega());
  const CMat d1 = fam.derivative_at(s);
  const CMat d2 = fam.second_derivative_at(s);
  // d_s M = -M Omega' M,  d_sbar M = M conj(Omega') M
  const CMat dm_s = -m * d1 * m;
  const CMat dm_sbar = m * d1.conjugate() * m;
  return {-d2 * m - d1 * dm_s, -d1 * dm_sbar};
}

double wp_logdet(const PeriodFamily& fam, cplx s) {
  const PeriodMatrix p = fam.period(s);
  const CMat pinv = p.imag().inverse().cast<cplx>();
  const CMat d1 = fam.derivative_at(s);
  return 0.25 * (pinv * d1.conjugate() * pinv * d1).trace().real();
}

double wp_closed_form(const PeriodFamily& fam, cplx s) {
  const PeriodMatrix p = fam.period(s);
  const CMat a = ks_closed_form(fam, s);
  const CMat g = flat_metric(p);
  const CMat gi = g.inverse();  // gi(b, d) = g^{b-bar d}
  const double vol = flat_volume(p, g);
  const int n = p.n();
  cplx acc = 0.0;
  for (int al = 0; al < n; ++al)
    for (int be = 0; be < n; ++be)
      for (int ga = 0; ga < n; ++ga)
        for (int de = 0; de < n; ++de)
          acc += a(al, be) * std::conj(a(ga, de)) * g(al, ga) * gi(be, de);
  const double wp = acc.real() * vol;
  const double check = wp_logdet(fam, s);
  if (std::abs(wp - check) > 1e-10 * std::max(1.0, std::abs(check))) {
    std::ostringstream os;
    os << "Weil-Petersson closed form " << wp << " disagrees with log-det formula " << check;
    throw AccuracyError(os.str());
  }
  return wp;
}

}  // namespace cyfam
