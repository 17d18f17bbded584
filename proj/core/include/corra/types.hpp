#pragma once

#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace corra {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

// Sorted, duplicate-free list of 0-based device or pilot indices.
using IndexSet = std::vector<int>;

inline constexpr double kPi = std::numbers::pi;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }

}  // namespace corra
