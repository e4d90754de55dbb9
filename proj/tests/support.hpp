#pragma once

// Helpers shared by the unit tests: error-code assertions and a brute-force
// evaluator of the functional written directly from its subset definition.

#include <cmath>
#include <map>
#include <vector>

#include "cbsforge/cbs_functional.hpp"
#include "cbsforge/errors.hpp"
#include "cbsforge/hypermatrix.hpp"

#define CHECK_CODE(expr, expected)                                   \
  do {                                                               \
    bool caught_ = false;                                            \
    try {                                                            \
      (void)(expr);                                                  \
    } catch (const cbsforge::Error& e_) {                            \
      caught_ = true;                                                \
      CHECK(e_.code() == (expected));                                \
    }                                                                \
    CHECK_MESSAGE(caught_, "expected cbsforge::Error from " #expr); \
  } while (0)

namespace testing {

using namespace cbsforge;

inline Hypermatrix vec(std::initializer_list<Complex> v) {
  return Hypermatrix(DimVector{v.size()}, std::vector<Complex>(v));
}

inline Hypermatrix mat(std::size_t r, std::size_t c, std::vector<Complex> v) {
  return Hypermatrix(DimVector{r, c}, std::move(v));
}

// Groups every pair (i, j) with i_q = j_q on Q by its outer coordinates and
// sums |group|^2.
inline double brute_subset(const CbsInput& in, std::uint64_t mask) {
  const DimVector& s = in.shape();
  const std::size_t m = s.rank();
  std::map<std::vector<std::size_t>, Complex> groups;
  for (std::size_t a = 0; a < s.total(); ++a) {
    const MultiIndex i = multi_index(s, a);
    for (std::size_t b = 0; b < s.total(); ++b) {
      const MultiIndex j = multi_index(s, b);
      bool tied = true;
      std::vector<std::size_t> key;
      for (std::size_t p = 0; p < m; ++p) {
        if ((mask >> p) & 1U) {
          tied = tied && i[p] == j[p];
        } else {
          key.push_back(i[p]);
          key.push_back(j[p]);
        }
      }
      if (!tied) continue;
      Complex term = 0.0;
      for (std::size_t k = 0; k < in.n(); ++k) term += in.x(k)[a] * in.u(k)[b];
      groups[key] += term;
    }
  }
  double sum = 0.0;
  for (const auto& [key, v] : groups) sum += std::norm(v);
  return sum;
}

inline double brute_phi(const CbsInput& in) {
  const std::size_t m = in.shape().rank();
  const double w = -1.0 / static_cast<double>(in.n());
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    const int card = __builtin_popcountll(mask);
    total += std::pow(w, card) * brute_subset(in, mask);
  }
  return total;
}

inline CbsInput random_input(const DimVector& s, std::size_t n, std::uint64_t seed,
                             Distribution dist = Distribution::complex_gaussian) {
  std::vector<Hypermatrix> xs, us;
  for (std::size_t k = 0; k < n; ++k) {
    xs.push_back(random_hypermatrix(s, seed * 1000 + 2 * k, dist));
    us.push_back(random_hypermatrix(s, seed * 1000 + 2 * k + 1, dist));
  }
  return CbsInput(std::move(xs), std::move(us));
}

}  // namespace testing
