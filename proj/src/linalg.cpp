#include "cyfam/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace cyfam {

bool hermitian_inverse_det(const cplx* g, int n, cplx* inv, double* det) {
  if (n == 1) {
    const double d = g[0].real();
    if (!(d > 0.0)) return false;
    inv[0] = 1.0 / d;
    *det = d;
    return true;
  }
  if (n == 2) {
    const double a = g[0].real();
    const double d = g[3].real();
    const cplx b = g[1];
    const cplx c = g[2];
    const double dt = (g[0] * g[3] - b * c).real();
    if (!(a > 0.0) || !(dt > 0.0)) return false;
    inv[0] = d / dt;
    inv[1] = -b / dt;
    inv[2] = -c / dt;
    inv[3] = a / dt;
    *det = dt;
    return true;
  }
  Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(g, n, n);
  Eigen::LLT<CMat> llt(m);
  if (llt.info() != Eigen::Success) return false;
  CMat mi = llt.solve(CMat::Identity(n, n));
  double dt = 1.0;
  for (int k = 0; k < n; ++k) dt *= std::norm(llt.matrixL()(k, k));
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) inv[r * n + c] = mi(r, c);
  *det = dt;
  return true;
}

double min_eigenvalue_hermitian(const CMat& m) {
  Eigen::SelfAdjointEigenSolver<CMat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

cplx parse_complex(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) throw std::invalid_argument("empty complex literal");

  // Split into signed terms; a sign that follows an exponent marker belongs to the number.
  double re = 0.0, im = 0.0;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t end = pos + 1;
    while (end < s.size()) {
      const char ch = s[end];
      if ((ch == '+' || ch == '-') && s[end - 1] != 'e' && s[end - 1] != 'E') break;
      ++end;
    }
    std::string term = s.substr(pos, end - pos);
    const bool imaginary = !term.empty() && (term.back() == 'i' || term.back() == 'j');
    if (imaginary) term.pop_back();
    double value = 1.0;
    if (term.empty() || term == "+") {
      value = 1.0;
    } else if (term == "-") {
      value = -1.0;
    } else {
      std::size_t used = 0;
      value = std::stod(term, &used);
      if (used != term.size()) throw std::invalid_argument("bad complex literal: " + text);
    }
    (imaginary ? im : re) += value;
    pos = end;
  }
  return {re, im};
}

std::string format_complex(cplx z) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
  return buf;
}

}  // namespace cyfam
