#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>

namespace cyfam {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr cplx I{0.0, 1.0};

/// Inverse and determinant of an n x n Hermitian matrix stored row-major.
/// Returns false when the matrix is not positive definite.
bool hermitian_inverse_det(const cplx* g, int n, cplx* inv, double* det);

/// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue_hermitian(const CMat& m);

/// Parses "1+2i", "-0.5i", "i", "3", "2.5e-1-i" into a complex number.
cplx parse_complex(const std::string& text);

std::string format_complex(cplx z);

}  // namespace cyfam
