#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <complex>

namespace wavecast {

using TimePoint = std::chrono::sys_seconds;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using VectorXd = Vector<double>;
using MatrixXd = Matrix<double>;

/// Column order of every multivariate series: wind speed, dominant period,
/// average period, significant wave height.
inline constexpr int kNumVariables = 4;
inline constexpr int kWindSpeed = 0;
inline constexpr int kDominantPeriod = 1;
inline constexpr int kAveragePeriod = 2;
inline constexpr int kWaveHeight = 3;

using SeriesMatrix = Eigen::Matrix<double, Eigen::Dynamic, kNumVariables>;
using VariableRow = Eigen::Matrix<double, 1, kNumVariables>;

}  // namespace wavecast
