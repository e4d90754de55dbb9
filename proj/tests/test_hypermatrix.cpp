#include "doctest.h"
#include "support.hpp"

#include <limits>

#include "cbsforge/json_io.hpp"

using namespace cbsforge;
using testing::vec;

TEST_CASE("dimension vectors reject empty, zero and overflowing shapes") {
  CHECK_CODE(DimVector(std::vector<std::size_t>{}), ErrorCode::domain_error);
  CHECK_CODE((DimVector{2, 0, 3}), ErrorCode::domain_error);
  const std::size_t big = std::numeric_limits<std::size_t>::max() / 2;
  CHECK_CODE((DimVector{big, 3}), ErrorCode::resource_exceeded);
  const DimVector s{2, 3, 4};
  CHECK(s.total() == 24);
  CHECK(s.strides() == std::vector<std::size_t>{12, 4, 1});
  CHECK(s.to_string() == "(2,3,4)");
}

TEST_CASE("row-major offsets") {
  const DimVector s{2, 3};
  CHECK(linear_offset(s, {1, 1}) == 0);
  CHECK(linear_offset(s, {2, 3}) == 5);
  CHECK(linear_offset(s, {1, 3}) == 2);
  CHECK_CODE(linear_offset(s, {3, 1}), ErrorCode::index_error);
  CHECK_CODE(linear_offset(s, {0, 1}), ErrorCode::index_error);
  CHECK_CODE(linear_offset(s, {1}), ErrorCode::index_error);
  CHECK_CODE(multi_index(s, 6), ErrorCode::index_error);
}

TEST_CASE("offset round trip is exhaustive and bijective") {
  for (const DimVector& s : {DimVector{7}, DimVector{3, 4}, DimVector{2, 3, 5}, DimVector{10, 10, 10},
                             DimVector{1, 4, 1, 3}}) {
    for (std::size_t a = 0; a < s.total(); ++a) {
      const MultiIndex i = multi_index(s, a);
      REQUIRE(linear_offset(s, i) == a);
      std::size_t expect = 0;
      for (std::size_t k = 0; k < s.rank(); ++k) expect = expect * s[k] + (i[k] - 1);
      REQUIRE(expect == a);
    }
  }
}

TEST_CASE("subsets enumerate by cardinality") {
  const auto qs = subsets_by_cardinality(3);
  REQUIRE(qs.size() == 8);
  for (std::size_t k = 1; k < qs.size(); ++k) CHECK(qs[k - 1].size() <= qs[k].size());
  CHECK(qs.front() == IndexSubset::empty(3));
  CHECK(qs.back() == IndexSubset::full(3));
  const auto q = IndexSubset::of(4, {1, 3});
  CHECK(q.contains(1));
  CHECK_FALSE(q.contains(2));
  CHECK(q.complement() == IndexSubset::of(4, {2, 4}));
  CHECK(q.symmetric_difference(IndexSubset::of(4, {3, 4})) == IndexSubset::of(4, {1, 4}));
  CHECK_CODE(IndexSubset::of(3, {4}), ErrorCode::index_error);
  CHECK_CODE(IndexSubset(2, 0b100), ErrorCode::index_error);
}

TEST_CASE("modified indices") {
  const MultiIndex i{1, 2}, j{3, 4};
  CHECK(modified_indices(i, j, IndexSubset::empty(2)) == std::pair{i, j});
  CHECK(modified_indices(i, j, IndexSubset::full(2)) == std::pair{j, i});
  CHECK(modified_indices(i, j, IndexSubset::of(2, {2})) ==
        std::pair{MultiIndex{1, 4}, MultiIndex{3, 2}});
  CHECK_CODE(modified_indices(i, MultiIndex{1}, IndexSubset::empty(2)), ErrorCode::shape_mismatch);
}

TEST_CASE("modified indices: involution and composition over m <= 4") {
  for (std::size_t m = 1; m <= 4; ++m) {
    MultiIndex i{std::vector<std::size_t>(m)}, j{std::vector<std::size_t>(m)};
    for (std::size_t p = 0; p < m; ++p) {
      i[p] = p + 1;
      j[p] = p + 11;
    }
    for (const auto& q : subsets_by_cardinality(m)) {
      const auto [a, b] = modified_indices(i, j, q);
      CHECK(modified_indices(a, b, q) == std::pair{i, j});
      for (const auto& r : subsets_by_cardinality(m)) {
        CHECK(modified_indices(a, b, r) == modified_indices(i, j, q.symmetric_difference(r)));
      }
    }
  }
}

TEST_CASE("Frobenius norm") {
  CHECK(frobenius_norm_sq(Hypermatrix(DimVector{2, 3})) == 0.0);
  CHECK(frobenius_norm_sq(vec({3.0, Complex(0, 4)})) == 25.0);
  CHECK(frobenius_norm_sq(testing::mat(2, 2, {1.0, 1.0, 1.0, 1.0})) == 4.0);
  const auto x = random_hypermatrix(DimVector{3, 2}, 5, Distribution::complex_gaussian);
  CHECK(conj(conj(x)) == x);
  CHECK(frobenius_norm_sq(scaled(x, Complex(0, 2))) == doctest::Approx(4 * frobenius_norm_sq(x)));
  CHECK(frobenius_norm_sq(normalized(Hypermatrix(DimVector{2}))) == 0.0);
}

TEST_CASE("random hypermatrices are deterministic and honour their contracts") {
  const DimVector s{3, 4, 2};
  for (auto dist : {Distribution::complex_gaussian, Distribution::unit_sphere}) {
    CHECK(random_hypermatrix(s, 17, dist) == random_hypermatrix(s, 17, dist));
    CHECK_FALSE(random_hypermatrix(s, 17, dist) == random_hypermatrix(s, 18, dist));
  }
  for (std::uint64_t seed = 0; seed < 50; ++seed)
    CHECK(std::fabs(frobenius_norm_sq(random_hypermatrix(s, seed, Distribution::unit_sphere)) - 1.0) <=
          1e-14);
  const auto z = random_int_hypermatrix(DimVector{10, 10}, 3, -5, 5);
  CHECK(z == random_int_hypermatrix(DimVector{10, 10}, 3, -5, 5));
  bool lo = false, hi = false;
  for (const auto& v : z.entries()) {
    CHECK(v >= -5);
    CHECK(v <= 5);
    lo = lo || v == -5;
    hi = hi || v == 5;
  }
  CHECK((lo && hi));
  CHECK_CODE(random_int_hypermatrix(s, 1, 2, 1), ErrorCode::domain_error);
}

TEST_CASE("hypermatrix construction rejects a length mismatch") {
  CHECK_CODE(Hypermatrix(DimVector{2, 2}, std::vector<Complex>(3)), ErrorCode::shape_mismatch);
}

TEST_CASE("JSON formats round trip and reject malformed input") {
  const auto x = random_hypermatrix(DimVector{2, 3}, 9, Distribution::complex_gaussian);
  CHECK(hypermatrix_from_json(to_json(x)) == x);
  const auto z = random_int_hypermatrix(DimVector{2, 2}, 4, -1000, 1000);
  CHECK(int_hypermatrix_from_json(to_json(z)) == z);

  const CbsInput in = testing::random_input(DimVector{2, 2}, 2, 3);
  const CbsInput back = cbs_input_from_json(to_json(in));
  CHECK(back.n() == 2);
  CHECK(back.xs() == in.xs());
  CHECK(back.us() == in.us());

  CHECK_CODE(hypermatrix_from_json(Json::parse(R"({"shape":[2],"re":[1],"im":[0]})")),
             ErrorCode::parse_error);
  CHECK_CODE(hypermatrix_from_json(Json::parse(R"({"shape":[0],"re":[],"im":[]})")),
             ErrorCode::parse_error);
  CHECK_CODE(int_hypermatrix_from_json(Json::parse(R"({"shape":[1],"int":["1x"]})")),
             ErrorCode::parse_error);
  CHECK_CODE(cbs_input_from_json(Json::parse(R"({"n":2,"xs":[],"us":[]})")), ErrorCode::parse_error);
  CHECK_CODE(read_json_file("/nonexistent/input.json"), ErrorCode::io_error);
}

TEST_CASE("SHA-256 digest") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
