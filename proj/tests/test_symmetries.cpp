#include "doctest.h"
#include "support.hpp"

#include <algorithm>

#include "cbsforge/symmetries.hpp"

using namespace cbsforge;
using testing::random_input;

namespace {

double worst(const PhiBreakdown& a, const PhiBreakdown& b) {
  return relative_deviation(a.total, b.total,
                            std::max(a.cancellation_mass, b.cancellation_mass));
}

}  // namespace

TEST_CASE("axis permutations") {
  const auto x = random_hypermatrix(DimVector{2, 3}, 1, Distribution::complex_gaussian);
  CHECK(permute_axes(x, AxisPermutation::identity(2)) == x);

  const auto t = permute_axes(x, AxisPermutation({2, 1}));
  REQUIRE(t.shape() == DimVector{3, 2});
  for (std::size_t r = 1; r <= 2; ++r)
    for (std::size_t c = 1; c <= 3; ++c) CHECK(t.at({c, r}) == x.at({r, c}));

  const AxisPermutation pi({3, 1, 2});
  const auto y = random_hypermatrix(DimVector{2, 3, 4}, 2, Distribution::complex_gaussian);
  CHECK(permute_axes(permute_axes(y, pi), pi.inverse()) == y);

  CHECK_CODE(AxisPermutation({1, 1}), ErrorCode::domain_error);
  CHECK_CODE(AxisPermutation({0, 1}), ErrorCode::domain_error);
  CHECK_CODE(permute_axes(x, AxisPermutation::identity(3)), ErrorCode::shape_mismatch);
}

TEST_CASE("permutation invariance of the functional") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const CbsInput in = random_input(DimVector{2, 3, 2}, 1 + seed % 3, seed);
    const auto pi = AxisPermutation::random(3, seed);
    CHECK(worst(phi(in), phi(permute_axes(in, pi))) <= 1e-12);
  }
}

TEST_CASE("dropping a unit axis") {
  const Hypermatrix x(DimVector{1, 3}, {1.0, 2.0, Complex(0, 3)});
  const auto v = drop_unit_axis(x, 1);
  CHECK(v.shape() == DimVector{3});
  CHECK(v[2] == Complex(0, 3));
  CHECK_CODE(drop_unit_axis(x, 2), ErrorCode::precondition_failed);
  CHECK_CODE(drop_unit_axis(x, 3), ErrorCode::index_error);
  CHECK_CODE(drop_unit_axis(Hypermatrix(DimVector{1}), 1), ErrorCode::precondition_failed);

  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t n = 1 + seed % 4;
    const CbsInput in = random_input(DimVector{2, 1, 3}, n, seed);
    const PhiBreakdown full = phi(in);
    const PhiBreakdown dropped = phi(drop_unit_axis(in, 2));
    const double factor = static_cast<double>(n - 1) / static_cast<double>(n);
    CHECK(relative_deviation(full.total, factor * dropped.total,
                             std::max(full.cancellation_mass, dropped.cancellation_mass)) <= 1e-12);
    if (n == 1) CHECK(std::fabs(full.total) <= 1e-12 * full.cancellation_mass);
  }
}

TEST_CASE("unitary matrices and single-axis action") {
  const auto id = UnitaryMatrix(Eigen::MatrixXcd::Identity(3, 3));
  const auto x = random_hypermatrix(DimVector{2, 3}, 4, Distribution::complex_gaussian);
  CHECK(apply_unitary(x, id, 2) == x);

  const auto one = random_unitary(1, 9).matrix();
  CHECK(std::fabs(std::abs(one(0, 0)) - 1.0) <= 1e-14);

  for (std::size_t d : {2u, 3u, 5u}) {
    const auto u = random_unitary(d, d).matrix();
    CHECK((u * u.adjoint() - Eigen::MatrixXcd::Identity(d, d)).norm() <= 1e-12);
  }
  CHECK((random_unitary(3, 1).matrix() - random_unitary(3, 2).matrix()).norm() > 1e-6);

  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Identity(2, 2);
  bad(0, 1) = 0.1;
  CHECK_CODE(UnitaryMatrix(bad), ErrorCode::domain_error);
  CHECK_CODE(apply_unitary(x, id, 1), ErrorCode::shape_mismatch);

  const auto u = random_unitary(3, 17);
  const auto ux = apply_unitary(x, u, 2);
  CHECK(frobenius_norm_sq(ux) == doctest::Approx(frobenius_norm_sq(x)).epsilon(1e-12));
  // Matrix case: acting on axis 2 is right multiplication by U^T.
  for (std::size_t r = 1; r <= 2; ++r)
    for (std::size_t c = 1; c <= 3; ++c) {
      Complex expect = 0.0;
      for (std::size_t k = 1; k <= 3; ++k) expect += u.matrix()(c - 1, k - 1) * x.at({r, k});
      CHECK(std::abs(ux.at({r, c}) - expect) <= 1e-14);
    }
}

TEST_CASE("unitary invariance on each axis and on all axes together") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const DimVector s{2, 3, 2};
    const CbsInput in = random_input(s, 1 + seed % 3, seed);
    const PhiBreakdown base = phi(in);
    CbsInput all = in;
    for (std::size_t axis = 1; axis <= 3; ++axis) {
      const auto u = random_unitary(s[axis - 1], seed * 7 + axis);
      CHECK(worst(base, phi(apply_unitary(in, u, axis))) <= 1e-10);
      all = apply_unitary(all, u, axis);
    }
    CHECK(worst(base, phi(all)) <= 1e-10);
  }
}

TEST_CASE("mixing the n pairs") {
  const CbsInput in = random_input(DimVector{2, 3}, 3, 5);
  const PhiBreakdown base = phi(in);

  const MixingMatrix id(Eigen::MatrixXcd::Identity(3, 3));
  const CbsInput same = apply_mixing(in, id);
  CHECK(same.xs() == in.xs());
  CHECK(same.us() == in.us());

  Eigen::MatrixXcd diag = Eigen::MatrixXcd::Zero(3, 3);
  diag(0, 0) = Complex(2.0, 1.0);
  diag(1, 1) = Complex(0.0, -0.5);
  diag(2, 2) = 3.0;
  CHECK(worst(base, phi(apply_mixing(in, MixingMatrix(diag)))) <= 1e-10);

  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto mix = MixingMatrix::random(3, seed);
    CHECK(mix.condition_number() <= 1e3);
    CHECK((mix.beta() * mix.lambda().transpose() - Eigen::MatrixXcd::Identity(3, 3)).norm() <= 1e-10);
    const double tol = std::min(1e-8, mix.invariance_tolerance());
    CHECK(worst(base, phi(apply_mixing(in, mix))) <= tol);
  }

  Eigen::MatrixXcd ill = Eigen::MatrixXcd::Identity(2, 2);
  ill(1, 1) = 1e-7;
  CHECK_CODE(MixingMatrix{ill}, ErrorCode::domain_error);
  CHECK_CODE(apply_mixing(in, MixingMatrix(Eigen::MatrixXcd::Identity(2, 2))),
             ErrorCode::shape_mismatch);
}
