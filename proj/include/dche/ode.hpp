#pragma once

#include <functional>
#include <vector>

#include "dche/types.hpp"

namespace dche {

/// Point of a parametric integration path: position and derivative w.r.t.
/// the path parameter.
struct PathPoint {
    complex z;
    complex dz;
};

/// dW/dz = field(z, W); the path supplies z(theta) and z'(theta).
using FieldFn = std::function<void(const complex& z, const std::vector<complex>& w,
                                   std::vector<complex>& dw)>;
using PathFn = std::function<PathPoint(double theta)>;

/// Integrates dW/dtheta = z'(theta) * field(z(theta), W) from theta = 0 to
/// theta_end with an embedded Runge-Kutta 5(4) pair (Dormand-Prince tableau)
/// and PI step control. Deterministic for fixed inputs. Throws StepUnderflow
/// when the controller drives the step below 1e-13 * theta_end.
std::vector<complex> integrate_path(const FieldFn& field, const PathFn& path, double theta_end,
                                    std::vector<complex> state, const Tolerances& tol);

} // namespace dche
