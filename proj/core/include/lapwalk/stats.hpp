#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace lw {

// Regularized upper incomplete gamma Q(a,x) = Γ(a,x)/Γ(a); series for
// x < a+1, Lentz continued fraction otherwise. Implemented here so the
// chi-square p-values carry no statistics-library dependency.
double gamma_q(double a, double x);

// Survival function of the chi-square distribution with `dof` degrees of
// freedom at `statistic`; dof 0 returns 1 (degenerate single-cell fit).
double chi_square_p_value(double statistic, int dof);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // RMS of fit residuals
};

// Least-squares line through (x_i, y_i).
LineFit fit_line(const std::vector<std::pair<double, double>>& points);

}  // namespace lw
