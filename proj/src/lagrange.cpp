#include "cbsforge/lagrange.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "cbsforge/cbs_functional.hpp"
#include "cbsforge/summation.hpp"

namespace cbsforge {

namespace {

template <class T>
T sigma_literal(const MultiIndex& i, const MultiIndex& j, const BasicHypermatrix<T>& x,
                const BasicHypermatrix<T>& u) {
  require_same_shape(x.shape(), u.shape(), "sigma");
  const std::size_t m = x.shape().rank();
  T acc{};
  for (const IndexSubset& q : subsets_by_cardinality(m)) {
    const auto [iq, jq] = modified_indices(i, j, q);
    T term = x.at(iq) * u.at(jq);
    if (q.size() % 2 == 0)
      acc += term;
    else
      acc -= term;
  }
  return acc;
}

// Offsets of x_{i^{Q,j}} and u_{j^{Q,i}} for every mask Q, built incrementally
// from the mask with its lowest bit cleared.
class SigmaTable {
 public:
  explicit SigmaTable(const DimVector& shape)
      : shape_(shape),
        strides_(shape.strides()),
        count_(std::size_t{1} << shape.rank()),
        off_x_(count_),
        off_u_(count_) {}

  template <class Fn>
  void for_each_pair(Fn&& fn) {
    const std::size_t total = shape_.total();
    const std::size_t m = shape_.rank();
    std::vector<std::size_t> di(m), dj(m);
    for (std::size_t a = 0; a < total; ++a) {
      digits(a, di);
      for (std::size_t b = 0; b < total; ++b) {
        digits(b, dj);
        fill(a, b, di, dj);
        fn(di, dj);
      }
    }
  }

  template <class T>
  T sigma(const BasicHypermatrix<T>& x, const BasicHypermatrix<T>& u) const {
    T acc{};
    for (std::size_t mask = 0; mask < count_; ++mask) {
      const T term = x[off_x_[mask]] * u[off_u_[mask]];
      if (std::popcount(mask) % 2 == 0)
        acc += term;
      else
        acc -= term;
    }
    return acc;
  }

 private:
  void digits(std::size_t a, std::vector<std::size_t>& d) const {
    for (std::size_t k = shape_.rank(); k-- > 0;) {
      d[k] = a % shape_[k];
      a /= shape_[k];
    }
  }

  void fill(std::size_t a, std::size_t b, const std::vector<std::size_t>& di,
            const std::vector<std::size_t>& dj) {
    off_x_[0] = a;
    off_u_[0] = b;
    for (std::size_t mask = 1; mask < count_; ++mask) {
      const std::size_t low = static_cast<std::size_t>(std::countr_zero(mask));
      const std::size_t prev = mask & (mask - 1);
      off_x_[mask] = off_x_[prev] + dj[low] * strides_[low] - di[low] * strides_[low];
      off_u_[mask] = off_u_[prev] + di[low] * strides_[low] - dj[low] * strides_[low];
    }
  }

  DimVector shape_;
  std::vector<std::size_t> strides_;
  std::size_t count_;
  std::vector<std::size_t> off_x_;
  std::vector<std::size_t> off_u_;
};

// sigma_{i;j} = 0 whenever i_s = j_s for some s; skipping these pairs avoids
// summing rounding residue of terms that cancel in exact arithmetic.
bool shares_component(const std::vector<std::size_t>& di, const std::vector<std::size_t>& dj) {
  for (std::size_t k = 0; k < di.size(); ++k)
    if (di[k] == dj[k]) return true;
  return false;
}

bool strictly_less(const std::vector<std::size_t>& di, const std::vector<std::size_t>& dj) {
  for (std::size_t k = 0; k < di.size(); ++k)
    if (!(di[k] < dj[k])) return false;
  return true;
}

}  // namespace

Complex sigma(const MultiIndex& i, const MultiIndex& j, const Hypermatrix& x,
              const Hypermatrix& u) {
  const Complex value = sigma_literal(i, j, x, u);
  return shares_component(i.idx, j.idx) ? Complex{} : value;
}

BigInt sigma(const MultiIndex& i, const MultiIndex& j, const IntHypermatrix& x,
             const IntHypermatrix& u) {
  return sigma_literal(i, j, x, u);
}

bool sigma_sign_check(const MultiIndex& i, const MultiIndex& j, const IndexSubset& q,
                      const Hypermatrix& x, const Hypermatrix& u) {
  const auto [ip, jp] = modified_indices(i, j, q);
  const double sign = q.size() % 2 == 0 ? 1.0 : -1.0;
  return std::abs(sigma(ip, jp, x, u) - sign * sigma(i, j, x, u)) <= 1e-13;
}

bool sigma_sign_check(const MultiIndex& i, const MultiIndex& j, const IndexSubset& q,
                      const IntHypermatrix& x, const IntHypermatrix& u) {
  const auto [ip, jp] = modified_indices(i, j, q);
  const BigInt base = sigma(i, j, x, u);
  return sigma(ip, jp, x, u) == (q.size() % 2 == 0 ? base : BigInt(-base));
}

double lagrange_rhs_full(const Hypermatrix& x, const Hypermatrix& u) {
  require_same_shape(x.shape(), u.shape(), "lagrange_rhs_full");
  const Hypermatrix uc = conj(u);
  SigmaTable table(x.shape());
  CompensatedSum acc;
  table.for_each_pair([&](const auto& di, const auto& dj) {
    if (!shares_component(di, dj)) acc.add(std::norm(table.sigma(x, uc)));
  });
  return std::ldexp(acc.value(), -static_cast<int>(x.shape().rank()));
}

double lagrange_rhs_restricted(const Hypermatrix& x, const Hypermatrix& u) {
  require_same_shape(x.shape(), u.shape(), "lagrange_rhs_restricted");
  const Hypermatrix uc = conj(u);
  SigmaTable table(x.shape());
  CompensatedSum acc;
  table.for_each_pair([&](const auto& di, const auto& dj) {
    if (strictly_less(di, dj)) acc.add(std::norm(table.sigma(x, uc)));
  });
  return acc.value();
}

LagrangeReport verify_lagrange(const Hypermatrix& x, const Hypermatrix& u, double tol) {
  LagrangeReport r;
  const PhiBreakdown b = phi(CbsInput({x}, {u}));
  r.phi = b.total;
  r.cancellation_mass = b.cancellation_mass;
  r.rhs_full = lagrange_rhs_full(x, u);
  r.rhs_restricted = lagrange_rhs_restricted(x, u);
  const double scale = r.cancellation_mass;
  r.max_deviation = std::max({relative_deviation(r.phi, r.rhs_full, scale),
                              relative_deviation(r.phi, r.rhs_restricted, scale),
                              relative_deviation(r.rhs_full, r.rhs_restricted, scale)});
  r.pass = r.max_deviation <= tol;
  return r;
}

ExactLagrange lagrange_exact(const IntHypermatrix& x, const IntHypermatrix& u) {
  require_same_shape(x.shape(), u.shape(), "lagrange_exact");
  const DimVector& shape = x.shape();
  const std::size_t m = shape.rank();
  const std::size_t total = shape.total();

  std::vector<MultiIndex> all;
  all.reserve(total);
  for (std::size_t a = 0; a < total; ++a) all.push_back(multi_index(shape, a));

  // Left side, literally: for each Q, outer indices (i_p, j_p), p not in Q;
  // inner sum over i_q with j_q set to i_q; the bare product when Q is empty.
  ExactLagrange out;
  for (const IndexSubset& q : subsets_by_cardinality(m)) {
    std::vector<BigInt> cells(total * total);
    std::vector<bool> used(total * total, false);
    for (const MultiIndex& i : all) {
      for (const MultiIndex& j : all) {
        bool tied = true;
        for (std::size_t p = 1; p <= m && tied; ++p)
          if (q.contains(p) && i[p - 1] != j[p - 1]) tied = false;
        if (!tied) continue;
        const auto [iq, jq] = modified_indices(i, j, q);
        MultiIndex i_outer = i;
        MultiIndex j_outer = j;
        for (std::size_t p = 1; p <= m; ++p)
          if (q.contains(p)) i_outer[p - 1] = j_outer[p - 1] = 1;
        const std::size_t key = linear_offset(shape, i_outer) * total + linear_offset(shape, j_outer);
        cells[key] += x.at(iq) * u.at(jq);
        used[key] = true;
      }
    }
    BigInt part = 0;
    for (std::size_t key = 0; key < cells.size(); ++key)
      if (used[key]) part += cells[key] * cells[key];
    if (q.size() % 2 == 0)
      out.lhs += part;
    else
      out.lhs -= part;
  }

  SigmaTable table(shape);
  table.for_each_pair([&](const auto& di, const auto& dj) {
    if (!strictly_less(di, dj)) return;
    const BigInt s = table.sigma(x, u);
    out.rhs += s * s;
  });
  out.equal = out.lhs == out.rhs;
  return out;
}

}  // namespace cbsforge
