#pragma once

#include <Eigen/Dense>

#include <functional>

namespace phdae {

using Index = Eigen::Index;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Coefficient functions of a model, evaluated at (t, x).
using MatrixFn = std::function<Mat(double t, const Vec& x)>;
using VectorFn = std::function<Vec(double t, const Vec& x)>;
using ScalarFn = std::function<double(double t, const Vec& x)>;

/// Input law u(t, x). May depend on the state for feedback.
using InputFn = std::function<Vec(double t, const Vec& x)>;

struct TimeInterval {
    double start = 0.0;
    double end = 1.0;
};

}  // namespace phdae
