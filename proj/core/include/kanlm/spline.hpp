#pragma once

#include <vector>

namespace kanlm {

/// Uniform knot vector for B-splines of a fixed degree on
/// [domain_lo, domain_hi], extended `degree` equal steps past each end.
/// Immutable after construction; all free functions below are pure.
struct KnotGrid {
  int degree = 3;
  int intervals = 5;
  double domain_lo = -1.0;
  double domain_hi = 1.0;
  /// intervals + 2*degree + 1 non-decreasing values,
  /// knots[degree] == domain_lo, knots[degree + intervals] == domain_hi.
  std::vector<double> knots;

  int basis_count() const { return intervals + degree; }
};

KnotGrid make_grid(double domain_lo, double domain_hi, int intervals, int degree);

/// Cox-de Boor recursion value of basis function `index` at x.
/// Zero outside the local support [knots[index], knots[index + degree + 1]].
/// Intervals are half-open [t_j, t_{j+1}); the final knot closes the last
/// interval so evaluation at the right end of the extended range is defined.
double basis_value(const KnotGrid& grid, int index, double x);

/// Values of all basis functions at x (length basis_count()). Element i is
/// bit-identical to basis_value(grid, i, x).
std::vector<double> basis_row(const KnotGrid& grid, double x);

/// Values and first derivatives of all basis functions at x. At a knot the
/// derivative is the one-sided value from the right.
void basis_row(const KnotGrid& grid, double x, std::vector<double>& values,
               std::vector<double>& derivs);

double spline_eval(const KnotGrid& grid, const std::vector<double>& coeffs, double x);

/// Least-squares projection of the spline (old_grid, coeffs) onto new_grid,
/// matching values at sample_count uniform points over the new domain.
/// The new domain must cover the old one and sample_count must be at least
/// the new basis count.
std::vector<double> refit_grid(const KnotGrid& old_grid, const std::vector<double>& coeffs,
                               const KnotGrid& new_grid, int sample_count);

}  // namespace kanlm
