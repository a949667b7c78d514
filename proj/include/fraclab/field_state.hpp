#pragma once

#include <Eigen/Dense>

namespace fraclab {

/// Complex solution u = w + i·v on a model grid at time t.
struct FieldState {
    Eigen::VectorXcd u;
    double t = 0.0;

    Eigen::VectorXd real() const { return u.real(); }
    Eigen::VectorXd imag() const { return u.imag(); }
    bool finite() const { return u.allFinite(); }
};

}  // namespace fraclab
