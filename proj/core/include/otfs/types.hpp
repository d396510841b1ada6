#pragma once

#include <complex>

#include <Eigen/Dense>

namespace otfs {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace otfs
