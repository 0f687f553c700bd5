#include "kanlm/spline.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "kanlm/errors.hpp"

namespace kanlm {

KnotGrid make_grid(double domain_lo, double domain_hi, int intervals, int degree) {
  if (!std::isfinite(domain_lo) || !std::isfinite(domain_hi) || domain_lo >= domain_hi) {
    throw InvalidInput("make_grid: invalid domain [" + std::to_string(domain_lo) + ", " +
                       std::to_string(domain_hi) + "]");
  }
  if (intervals < 1) throw InvalidInput("make_grid: intervals must be >= 1");
  if (degree < 0) throw InvalidInput("make_grid: degree must be >= 0");

  KnotGrid g;
  g.degree = degree;
  g.intervals = intervals;
  g.domain_lo = domain_lo;
  g.domain_hi = domain_hi;
  const double step = (domain_hi - domain_lo) / intervals;
  g.knots.resize(intervals + 2 * degree + 1);
  // Anchor the ends so knots[degree] and knots[degree+intervals] are exact.
  for (int idx = 0; idx < static_cast<int>(g.knots.size()); ++idx) {
    if (idx <= degree + intervals / 2)
      g.knots[idx] = domain_lo + (idx - degree) * step;
    else
      g.knots[idx] = domain_hi + (idx - degree - intervals) * step;
  }
  g.knots[degree] = domain_lo;
  g.knots[degree + intervals] = domain_hi;
  return g;
}

namespace {

// Degree-0 seed: indicator of [t_j, t_{j+1}), with the last interval closed.
double degree0(const std::vector<double>& t, int j, double x) {
  if (x == t.back() && j == static_cast<int>(t.size()) - 2) return 1.0;
  return (t[j] <= x && x < t[j + 1]) ? 1.0 : 0.0;
}

}  // namespace

double basis_value(const KnotGrid& grid, int index, double x) {
  if (index < 0 || index >= grid.basis_count()) {
    throw InvalidInput("basis_value: index " + std::to_string(index) + " out of range [0, " +
                       std::to_string(grid.basis_count()) + ")");
  }
  const std::vector<double>& t = grid.knots;
  // Direct Cox-de Boor recursion. Denominators never vanish: knots are
  // strictly increasing.
  struct Rec {
    const std::vector<double>& t;
    double x;
    double operator()(int i, int p) const {
      if (p == 0) return degree0(t, i, x);
      const double left = ((x - t[i]) / (t[i + p] - t[i])) * (*this)(i, p - 1);
      const double right = ((t[i + p + 1] - x) / (t[i + p + 1] - t[i + 1])) * (*this)(i + 1, p - 1);
      return left + right;
    }
  };
  return Rec{t, x}(index, grid.degree);
}

std::vector<double> basis_row(const KnotGrid& grid, double x) {
  std::vector<double> values, derivs;
  basis_row(grid, x, values, derivs);
  return values;
}

void basis_row(const KnotGrid& grid, double x, std::vector<double>& values,
               std::vector<double>& derivs) {
  if (!std::isfinite(x)) throw InvalidInput("basis_row: non-finite input");
  const std::vector<double>& t = grid.knots;
  const int k = grid.degree;
  const int n_cells = static_cast<int>(t.size()) - 1;

  // Triangular tableau over all spans; same arithmetic as the per-index
  // recursion, so the results agree bit for bit.
  std::vector<double> cur(n_cells), prev;
  for (int j = 0; j < n_cells; ++j) cur[j] = degree0(t, j, x);
  std::vector<double> deg_km1;  // degree k-1 row, kept for the derivative
  for (int p = 1; p <= k; ++p) {
    if (p == k) deg_km1 = cur;
    prev.swap(cur);
    cur.assign(n_cells - p, 0.0);
    for (int i = 0; i + p < n_cells; ++i) {
      const double left = ((x - t[i]) / (t[i + p] - t[i])) * prev[i];
      const double right = ((t[i + p + 1] - x) / (t[i + p + 1] - t[i + 1])) * prev[i + 1];
      cur[i] = left + right;
    }
  }

  const int nb = grid.basis_count();
  values.assign(cur.begin(), cur.begin() + nb);
  derivs.assign(nb, 0.0);
  if (k > 0) {
    for (int i = 0; i < nb; ++i) {
      derivs[i] = k * (deg_km1[i] / (t[i + k] - t[i]) - deg_km1[i + 1] / (t[i + k + 1] - t[i + 1]));
    }
  }
}

double spline_eval(const KnotGrid& grid, const std::vector<double>& coeffs, double x) {
  if (static_cast<int>(coeffs.size()) != grid.basis_count())
    throw InvalidInput("spline_eval: coefficient count mismatch");
  std::vector<double> row = basis_row(grid, x);
  double acc = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) acc += coeffs[i] * row[i];
  return acc;
}

std::vector<double> refit_grid(const KnotGrid& old_grid, const std::vector<double>& coeffs,
                               const KnotGrid& new_grid, int sample_count) {
  if (static_cast<int>(coeffs.size()) != old_grid.basis_count())
    throw InvalidInput("refit_grid: coefficient count mismatch");
  if (new_grid.domain_lo > old_grid.domain_lo || new_grid.domain_hi < old_grid.domain_hi)
    throw InvalidInput("refit_grid: new domain must cover the old domain");
  const int nb = new_grid.basis_count();
  if (sample_count < nb || sample_count < 2)
    throw InvalidInput("refit_grid: sample_count must be >= new basis count (and >= 2)");

  Eigen::MatrixXd a(sample_count, nb);
  Eigen::VectorXd y(sample_count);
  for (int s = 0; s < sample_count; ++s) {
    const double x = new_grid.domain_lo +
                     (new_grid.domain_hi - new_grid.domain_lo) * s / (sample_count - 1);
    const std::vector<double> row = basis_row(new_grid, x);
    for (int i = 0; i < nb; ++i) a(s, i) = row[i];
    y(s) = spline_eval(old_grid, coeffs, x);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < nb) throw NumericalFailure("refit_grid: rank-deficient least-squares system");
  Eigen::VectorXd c = qr.solve(y);
  return std::vector<double>(c.data(), c.data() + nb);
}

}  // namespace kanlm
