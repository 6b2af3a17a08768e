#pragma once

namespace occurlens {

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double gamma_p(double a, double x);
// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

// Regularized incomplete beta I_x(a, b), a, b > 0, x in [0, 1].
double beta_inc(double a, double b, double x);

// Survival probabilities used by the test modules.
double chi_squared_sf(double statistic, double dof);
double student_t_two_sided_p(double t, double dof);

} // namespace occurlens
