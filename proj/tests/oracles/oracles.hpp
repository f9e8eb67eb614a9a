#pragma once

// Reference computations that share no code with the library: ODE shooting
// for one-dimensional steady states, adaptive quadrature, closed-form decay.

#include <functional>
#include <vector>

namespace oracle {

/// z(length) for z'' = z^3 - lambda z, z(0) = 0, z'(0) = s (classical RK4).
double shoot(double lambda, double s, double length, int steps = 4000);

/// Number of solutions of -z'' + z^3 - lambda z = 0 on (0, length) with zero
/// boundary values: sign changes of shoot() over all bounded orbits (peaks
/// below sqrt(lambda)), doubled for z -> -z, plus z = 0.
int chafee_infante_count(double lambda, double length);

/// Max of the positive one-hump solution (the largest shooting root).
double chafee_infante_amplitude(double lambda, double length);

/// Adaptive Simpson quadrature to absolute tolerance tol.
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-12);

/// Exact L2 norm of sum_k a_k e^{-(k^2 + c) t} sin(k x) on (0, pi).
double heat_l2(const std::vector<double>& coeffs, double c, double t);

}  // namespace oracle
