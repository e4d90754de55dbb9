#include "doctest.h"
#include "support.hpp"

#include "cbsforge/lagrange.hpp"

using namespace cbsforge;
using testing::vec;

namespace {

IntHypermatrix ivec(std::initializer_list<long long> v) {
  std::vector<BigInt> e;
  for (long long a : v) e.emplace_back(a);
  return IntHypermatrix(DimVector{v.size()}, std::move(e));
}

// Four signed terms written out for m = 2.
Complex sigma_m2(const MultiIndex& i, const MultiIndex& j, const Hypermatrix& x,
                 const Hypermatrix& u) {
  return x.at({i[0], i[1]}) * u.at({j[0], j[1]}) - x.at({i[0], j[1]}) * u.at({j[0], i[1]}) -
         x.at({j[0], i[1]}) * u.at({i[0], j[1]}) + x.at({j[0], j[1]}) * u.at({i[0], i[1]});
}

}  // namespace

TEST_CASE("sigma for vectors and its four-term m = 2 expansion") {
  CHECK(sigma({1}, {2}, vec({1.0, 2.0}), vec({3.0, 4.0})) == Complex(-2.0));
  CHECK(sigma({1}, {2}, ivec({1, 2}), ivec({3, 4})) == -2);

  const DimVector s{3, 2};
  const auto x = random_hypermatrix(s, 1, Distribution::complex_gaussian);
  const auto u = random_hypermatrix(s, 2, Distribution::complex_gaussian);
  for (std::size_t a = 0; a < s.total(); ++a)
    for (std::size_t b = 0; b < s.total(); ++b) {
      const auto i = multi_index(s, a), j = multi_index(s, b);
      CHECK(std::abs(sigma(i, j, x, u) - sigma_m2(i, j, x, u)) <= 1e-14);
      if (i[0] == j[0] || i[1] == j[1]) CHECK(std::abs(sigma(i, j, x, u)) <= 1e-15);
    }
  CHECK_CODE(sigma({1}, {2}, vec({1.0, 2.0}), vec({1.0, 2.0, 3.0})), ErrorCode::shape_mismatch);
}

TEST_CASE("sign lemma, exhaustive on (2,2) and (2,3) over the integers") {
  for (const DimVector& s : {DimVector{2, 2}, DimVector{2, 3}, DimVector{2, 2, 2}}) {
    const auto x = random_int_hypermatrix(s, 10, -9, 9);
    const auto u = random_int_hypermatrix(s, 11, -9, 9);
    const auto xc = random_hypermatrix(s, 10, Distribution::complex_gaussian);
    const auto uc = random_hypermatrix(s, 11, Distribution::complex_gaussian);
    for (std::size_t a = 0; a < s.total(); ++a)
      for (std::size_t b = 0; b < s.total(); ++b)
        for (const auto& q : subsets_by_cardinality(s.rank())) {
          const auto i = multi_index(s, a), j = multi_index(s, b);
          REQUIRE(sigma_sign_check(i, j, q, x, u));
          REQUIRE(sigma_sign_check(i, j, q, xc, uc));
          const auto [ip, jp] = modified_indices(i, j, q);
          const BigInt sign = q.size() % 2 ? -1 : 1;
          REQUIRE(sigma(ip, jp, x, u) == sign * sigma(i, j, x, u));
        }
  }
}

TEST_CASE("right-hand sides on the classical vector case") {
  const auto x = vec({1.0, 2.0}), u = vec({3.0, 4.0});
  CHECK(lagrange_rhs_full(x, u) == doctest::Approx(4.0));
  CHECK(lagrange_rhs_restricted(x, u) == doctest::Approx(4.0));
  const auto r = verify_lagrange(x, u);
  CHECK(r.pass);
  CHECK(r.phi == doctest::Approx(4.0));
  const auto e = lagrange_exact(ivec({1, 2}), ivec({3, 4}));
  CHECK(e.lhs == 4);
  CHECK(e.rhs == 4);
  CHECK(e.equal);
}

TEST_CASE("a unit axis forces every side to zero") {
  for (const DimVector& s : {DimVector{1, 3}, DimVector{3, 1}, DimVector{2, 1, 2}}) {
    const auto x = random_hypermatrix(s, 3, Distribution::complex_gaussian);
    const auto u = random_hypermatrix(s, 4, Distribution::complex_gaussian);
    CHECK(lagrange_rhs_full(x, u) == 0.0);
    CHECK(lagrange_rhs_restricted(x, u) == 0.0);
    const auto r = verify_lagrange(x, u);
    CHECK(r.pass);
    CHECK(std::fabs(r.phi) <= 1e-12 * r.cancellation_mass);
  }
}

TEST_CASE("constant 2x2 integer hypermatrices give zero on both sides") {
  const IntHypermatrix ones(DimVector{2, 2}, std::vector<BigInt>(4, BigInt(1)));
  const auto e = lagrange_exact(ones, ones);
  CHECK(e.lhs == 0);
  CHECK(e.rhs == 0);
  CHECK(e.equal);
}

TEST_CASE("three-way agreement over random complex inputs") {
  std::uint64_t seed = 100;
  for (const DimVector& s : {DimVector{4}, DimVector{3, 3}, DimVector{2, 4}, DimVector{2, 3, 2},
                             DimVector{3, 3, 2}}) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto x = random_hypermatrix(s, ++seed, Distribution::complex_gaussian);
      const auto u = random_hypermatrix(s, ++seed, Distribution::complex_gaussian);
      const auto r = verify_lagrange(x, u, 1e-10);
      CHECK(r.pass);
      CHECK(r.max_deviation <= 1e-10);
      const CbsInput in({x}, {u});
      CHECK(relative_deviation(r.phi, testing::brute_phi(in), r.cancellation_mass) <= 1e-12);
      CHECK(relative_deviation(r.rhs_full, r.rhs_restricted, r.cancellation_mass) <= 1e-12);
      CHECK(r.rhs_full >= 0.0);
    }
  }
}

TEST_CASE("real x = u: full and restricted forms coincide") {
  auto x = random_hypermatrix(DimVector{3, 2}, 7, Distribution::complex_gaussian);
  for (auto& z : x.entries()) z = z.real();
  CHECK(lagrange_rhs_full(x, x) == doctest::Approx(lagrange_rhs_restricted(x, x)).epsilon(1e-13));
}

TEST_CASE("exact identity over random integer hypermatrices") {
  std::uint64_t seed = 0;
  for (const DimVector& s : {DimVector{4}, DimVector{2, 2}, DimVector{3, 4}, DimVector{2, 3, 2},
                             DimVector{4, 4, 1}, DimVector{3, 3, 3}}) {
    for (int rep = 0; rep < 10; ++rep) {
      const auto x = random_int_hypermatrix(s, ++seed, -5, 5);
      const auto u = random_int_hypermatrix(s, ++seed, -5, 5);
      const auto e = lagrange_exact(x, u);
      REQUIRE(e.equal);
      REQUIRE(e.lhs == e.rhs);
      // Both sides are independent of the floating path; cross-check with it.
      Hypermatrix xf(s), uf(s);
      for (std::size_t a = 0; a < s.total(); ++a) {
        xf[a] = static_cast<double>(x[a]);
        uf[a] = static_cast<double>(u[a]);
      }
      CHECK(static_cast<double>(e.rhs) == doctest::Approx(lagrange_rhs_restricted(xf, uf)));
    }
  }
}

TEST_CASE("large integer entries stay exact") {
  const BigInt big = BigInt(1) << 70;
  const IntHypermatrix x(DimVector{2, 2}, {big, BigInt(3), BigInt(-7), big + 1});
  const IntHypermatrix u(DimVector{2, 2}, {BigInt(5), big, big - 11, BigInt(2)});
  const auto e = lagrange_exact(x, u);
  CHECK(e.equal);
  const BigInt s = sigma({1, 1}, {2, 2}, x, u);
  CHECK(e.rhs == s * s);
}
