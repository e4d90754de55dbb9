#pragma once

// Dense hypermatrices of type d1 x ... x dm and the multi-index machinery
// every functional in this library contracts over.
//
// Conventions:
//   * element indices (MultiIndex values) are 1-based, i_k in {1..d_k};
//   * axis positions (subset members, permutation entries, the `s` of
//     single-axis actions) are 1-based, p in {1..m};
//   * storage is row-major with the first axis slowest, 0-based offsets.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cbsforge/errors.hpp"

namespace cbsforge {

using Complex = std::complex<double>;
using BigInt = boost::multiprecision::cpp_int;

class DimVector {
 public:
  DimVector() = default;
  explicit DimVector(std::vector<std::size_t> dims);
  DimVector(std::initializer_list<std::size_t> dims)
      : DimVector(std::vector<std::size_t>(dims)) {}

  std::size_t rank() const { return dims_.size(); }
  /// 0-based storage access; d_k is `(*this)[k - 1]`.
  std::size_t operator[](std::size_t k) const { return dims_[k]; }
  std::size_t total() const { return total_; }
  const std::vector<std::size_t>& dims() const { return dims_; }
  /// Row-major strides, first axis slowest.
  std::vector<std::size_t> strides() const;

  std::string to_string() const;

  friend bool operator==(const DimVector&, const DimVector&) = default;

 private:
  std::vector<std::size_t> dims_;
  std::size_t total_ = 0;
};

struct MultiIndex {
  std::vector<std::size_t> idx;

  MultiIndex() = default;
  explicit MultiIndex(std::vector<std::size_t> v) : idx(std::move(v)) {}
  MultiIndex(std::initializer_list<std::size_t> v) : idx(v) {}

  std::size_t size() const { return idx.size(); }
  std::size_t operator[](std::size_t k) const { return idx[k]; }
  std::size_t& operator[](std::size_t k) { return idx[k]; }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

/// Subset Q of I_m = {1..m}, stored as a bit mask (bit p-1 <-> position p).
class IndexSubset {
 public:
  static constexpr std::size_t max_rank = 62;

  IndexSubset() = default;
  IndexSubset(std::size_t m, std::uint64_t mask);
  static IndexSubset empty(std::size_t m) { return {m, 0}; }
  static IndexSubset full(std::size_t m);
  static IndexSubset of(std::size_t m, std::initializer_list<std::size_t> positions);

  std::size_t rank() const { return m_; }
  std::uint64_t mask() const { return mask_; }
  bool contains(std::size_t p) const { return (mask_ >> (p - 1)) & 1U; }
  std::size_t size() const;

  IndexSubset symmetric_difference(const IndexSubset& other) const;
  IndexSubset complement() const;

  std::string to_string() const;

  friend bool operator==(const IndexSubset&, const IndexSubset&) = default;

 private:
  std::size_t m_ = 0;
  std::uint64_t mask_ = 0;
};

/// All 2^m subsets of I_m ordered by increasing cardinality, ties by mask.
std::vector<IndexSubset> subsets_by_cardinality(std::size_t m);

std::size_t linear_offset(const DimVector& shape, const MultiIndex& idx);
MultiIndex multi_index(const DimVector& shape, std::size_t offset);

/// (i^{Q,j}, j^{Q,i}): positions in Q exchange their components.
std::pair<MultiIndex, MultiIndex> modified_indices(const MultiIndex& i,
                                                   const MultiIndex& j,
                                                   const IndexSubset& q);

template <class T>
class BasicHypermatrix {
 public:
  using value_type = T;

  BasicHypermatrix() = default;
  explicit BasicHypermatrix(DimVector shape)
      : shape_(std::move(shape)), entries_(shape_.total()) {}
  BasicHypermatrix(DimVector shape, std::vector<T> entries)
      : shape_(std::move(shape)), entries_(std::move(entries)) {
    if (entries_.size() != shape_.total())
      fail(ErrorCode::shape_mismatch,
           "hypermatrix: " + std::to_string(entries_.size()) +
               " entries for shape " + shape_.to_string());
  }

  const DimVector& shape() const { return shape_; }
  std::size_t size() const { return entries_.size(); }

  const T& operator[](std::size_t offset) const { return entries_[offset]; }
  T& operator[](std::size_t offset) { return entries_[offset]; }
  const T& at(const MultiIndex& i) const { return entries_[linear_offset(shape_, i)]; }
  T& at(const MultiIndex& i) { return entries_[linear_offset(shape_, i)]; }

  std::span<const T> entries() const { return entries_; }
  std::span<T> entries() { return entries_; }

  friend bool operator==(const BasicHypermatrix&, const BasicHypermatrix&) = default;

 private:
  DimVector shape_;
  std::vector<T> entries_;
};

using Hypermatrix = BasicHypermatrix<Complex>;
using IntHypermatrix = BasicHypermatrix<BigInt>;

Hypermatrix conj(const Hypermatrix& x);
Hypermatrix scaled(const Hypermatrix& x, Complex c);
double frobenius_norm_sq(const Hypermatrix& x);
/// Returns x / ||x||; the zero hypermatrix is returned unchanged.
Hypermatrix normalized(const Hypermatrix& x);

enum class Distribution { complex_gaussian, unit_sphere };

/// Deterministic in (shape, seed, dist). Complex Gaussian entries have
/// independent standard normal real and imaginary parts.
Hypermatrix random_hypermatrix(const DimVector& shape, std::uint64_t seed,
                               Distribution dist);
/// Entries uniform on the integer range [lo, hi].
IntHypermatrix random_int_hypermatrix(const DimVector& shape, std::uint64_t seed,
                                      long long lo, long long hi);

inline void require_same_shape(const DimVector& a, const DimVector& b,
                               const char* where) {
  if (!(a == b))
    fail(ErrorCode::shape_mismatch, std::string(where) + ": shapes " +
                                        a.to_string() + " and " + b.to_string() +
                                        " differ");
}

}  // namespace cbsforge
