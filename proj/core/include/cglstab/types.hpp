#pragma once

#include <complex>

#include <Eigen/Dense>

namespace cglstab {

using Complex = std::complex<double>;
using RealField = Eigen::VectorXd;
using ComplexField = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr Complex kImag{0.0, 1.0};

} // namespace cglstab
