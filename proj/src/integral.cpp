#include "cbsforge/integral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cbsforge/summation.hpp"

namespace cbsforge {

GridSpec::GridSpec(double lo_, double hi_, std::size_t points_)
    : lo(lo_), hi(hi_), points(points_) {
  if (points < 1) fail(ErrorCode::domain_error, "grid needs at least one point");
  if (!(hi > lo)) fail(ErrorCode::domain_error, "grid interval requires hi > lo");
}

Hypermatrix discretize(const FunctionN& f, const std::vector<GridSpec>& grids,
                       std::size_t budget) {
  if (grids.empty()) fail(ErrorCode::domain_error, "discretize needs at least one axis");
  std::vector<std::size_t> dims;
  double scale = 1.0;
  std::size_t samples = 1;
  for (const auto& g : grids) {
    if (samples > budget / g.points)
      fail(ErrorCode::resource_exceeded, "sample count exceeds budget " + std::to_string(budget));
    samples *= g.points;
    dims.push_back(g.points);
    scale *= std::sqrt(g.delta());
  }
  const DimVector shape(std::move(dims));
  Hypermatrix out(shape);
  std::vector<double> s(grids.size());
  for (std::size_t a = 0; a < out.size(); ++a) {
    std::size_t rest = a;
    for (std::size_t k = grids.size(); k-- > 0;) {
      s[k] = grids[k].node(rest % grids[k].points);
      rest /= grids[k].points;
    }
    out[a] = f(s) * scale;
  }
  return out;
}

Hypermatrix discretize_indexed(const std::vector<Function1>& fs, const GridSpec& grid,
                               std::size_t budget) {
  if (fs.empty()) fail(ErrorCode::domain_error, "discretize_indexed needs at least one function");
  if (fs.size() > budget / grid.points)
    fail(ErrorCode::resource_exceeded, "sample count exceeds budget " + std::to_string(budget));
  const double scale = std::sqrt(grid.delta());
  Hypermatrix out(DimVector{fs.size(), grid.points});
  for (std::size_t i = 0; i < fs.size(); ++i)
    for (std::size_t t = 0; t < grid.points; ++t)
      out[i * grid.points + t] = fs[i](grid.node(t)) * scale;
  return out;
}

void ParamBlock::validate() const {
  for (const auto* m : {&a, &b})
    for (const auto& row : *m)
      for (double v : row)
        if (!(v > 0.0) || !std::isfinite(v))
          fail(ErrorCode::domain_error, "parameter block entries must be positive and finite");
}

ParamBlock ParamBlock::uniform(double value) {
  ParamBlock p;
  for (auto& row : p.a) row.fill(value);
  for (auto& row : p.b) row.fill(value);
  return p;
}

namespace {

double sorted_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end());
  CompensatedSum s;
  for (double t : terms) s.add(t);
  return s.value();
}

// 4 S1 - 2 S2 - 2 S3 + S4 with kernels g(alpha, beta) for the double terms and
// h(gamma) for the single ones.
template <class Pair, class Single>
double closed_form(const ParamBlock& p, Pair g, Single h) {
  p.validate();
  const auto& a = p.a;
  const auto& b = p.b;
  std::vector<double> s1, s2, s3, s4;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          s1.push_back(g(a[i][k] + a[i][l], b[j][k] + b[j][l]));
          s2.push_back(g(a[i][k] + a[j][l], b[i][k] + b[j][l]));
        }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double inner = h(a[i][0] + b[j][0]) + h(a[i][1] + b[j][1]);
      s3.push_back(inner * inner);
    }
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) s4.push_back(h(a[i][k] + b[i][k]));
  const double diag = sorted_sum(s4);
  return 4.0 * sorted_sum(s1) - 2.0 * sorted_sum(s2) - 2.0 * sorted_sum(s3) + diag * diag;
}

QuadratureValue family_quadrature(const ParamBlock& p, const GridSpec& grid,
                                  const std::function<double(double, double)>& profile) {
  p.validate();
  std::vector<Hypermatrix> xs, us;
  for (int k = 0; k < 2; ++k) {
    std::vector<Function1> xi, eta;
    for (int i = 0; i < 2; ++i) {
      const double ai = p.a[i][k];
      const double bi = p.b[i][k];
      xi.emplace_back([=](double t) { return Complex(profile(ai, t), 0.0); });
      eta.emplace_back([=](double t) { return Complex(profile(bi, t), 0.0); });
    }
    xs.push_back(discretize_indexed(xi, grid));
    us.push_back(discretize_indexed(eta, grid));
  }
  const PhiBreakdown br = phi(CbsInput(std::move(xs), std::move(us)));
  return {br.total, br.cancellation_mass};
}

}  // namespace

double power_inequality(const ParamBlock& p) {
  return closed_form(
      p, [](double x, double y) { return 1.0 / (x * y); }, [](double z) { return 1.0 / z; });
}

double gaussian_inequality(const ParamBlock& p) {
  return closed_form(
      p, [](double x, double y) { return 1.0 / std::sqrt(x * y); },
      [](double z) { return 1.0 / std::sqrt(z); });
}

QuadratureValue power_quadrature(const ParamBlock& p, std::size_t points) {
  // With t = s^2 the samples become xi(s^2) sqrt(2s) = sqrt(2) s^(a - 1/2); the
  // map is an isometry of L^2(0, 1), so the functional is unchanged.
  return family_quadrature(p, GridSpec(0.0, 1.0, points), [](double a, double s) {
    return std::sqrt(2.0) * std::pow(s, a - 0.5);
  });
}

QuadratureValue gaussian_quadrature(const ParamBlock& p, std::size_t points) {
  return family_quadrature(p, GridSpec(-8.0, 8.0, points),
                           [](double a, double t) { return std::exp(-a * t * t); });
}

PhiBreakdown integral_phi_m1(const std::vector<Function1>& xis,
                             const std::vector<Function1>& etas, const GridSpec& grid) {
  if (xis.empty() || xis.size() != etas.size())
    fail(ErrorCode::shape_mismatch, "integral_phi_m1 needs matching non-empty families");
  std::vector<Hypermatrix> xs, us;
  const auto lift = [](const Function1& f) {
    return [f](std::span<const double> s) { return f(s[0]); };
  };
  for (std::size_t k = 0; k < xis.size(); ++k) {
    xs.push_back(discretize(lift(xis[k]), {grid}));
    us.push_back(discretize(lift(etas[k]), {grid}));
  }
  return phi(CbsInput(std::move(xs), std::move(us)));
}

DualPathReport dual_path(Family family, const ParamBlock& p, std::size_t points) {
  DualPathReport r;
  double scale = 1.0;
  QuadratureValue coarse, fine;
  if (family == Family::power) {
    r.closed = power_inequality(p);
    coarse = power_quadrature(p, points);
    fine = power_quadrature(p, 2 * points);
  } else {
    r.closed = gaussian_inequality(p);
    scale = gaussian_closed_form_scale;
    coarse = gaussian_quadrature(p, points);
    fine = gaussian_quadrature(p, 2 * points);
  }
  r.coarse = scale * coarse.phi;
  r.fine = scale * fine.phi;
  r.envelope = 2.0 * std::fabs(r.coarse - r.fine) + 1e-10 * scale * fine.cancellation_mass;
  r.error = std::fabs(r.fine - r.closed);
  r.pass = r.error <= r.envelope;
  return r;
}

}  // namespace cbsforge
