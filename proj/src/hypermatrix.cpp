#include "cbsforge/hypermatrix.hpp"

#include <bit>
#include <cmath>
#include <limits>

#include "cbsforge/rng.hpp"

namespace cbsforge {

DimVector::DimVector(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) fail(ErrorCode::domain_error, "dimension vector must have m >= 1");
  if (dims_.size() > IndexSubset::max_rank)
    fail(ErrorCode::domain_error, "dimension vector rank exceeds 62");
  std::size_t total = 1;
  for (std::size_t d : dims_) {
    if (d == 0) fail(ErrorCode::domain_error, "dimension vector entries must be >= 1");
    if (total > std::numeric_limits<std::size_t>::max() / d)
      fail(ErrorCode::resource_exceeded, "hypermatrix size overflows the address range");
    total *= d;
  }
  total_ = total;
}

std::vector<std::size_t> DimVector::strides() const {
  std::vector<std::size_t> s(dims_.size());
  std::size_t acc = 1;
  for (std::size_t k = dims_.size(); k-- > 0;) {
    s[k] = acc;
    acc *= dims_[k];
  }
  return s;
}

std::string DimVector::to_string() const {
  std::string out = "(";
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (k) out += ",";
    out += std::to_string(dims_[k]);
  }
  return out + ")";
}

IndexSubset::IndexSubset(std::size_t m, std::uint64_t mask) : m_(m), mask_(mask) {
  if (m > max_rank) fail(ErrorCode::domain_error, "subset rank exceeds 62");
  if (m < 64 && (mask >> m) != 0)
    fail(ErrorCode::index_error, "subset mask has bits beyond position m");
}

IndexSubset IndexSubset::full(std::size_t m) {
  return {m, m == 0 ? 0 : (~std::uint64_t{0} >> (64 - m))};
}

IndexSubset IndexSubset::of(std::size_t m, std::initializer_list<std::size_t> positions) {
  std::uint64_t mask = 0;
  for (std::size_t p : positions) {
    if (p < 1 || p > m)
      fail(ErrorCode::index_error, "subset position " + std::to_string(p) +
                                       " outside I_" + std::to_string(m));
    mask |= std::uint64_t{1} << (p - 1);
  }
  return {m, mask};
}

std::size_t IndexSubset::size() const { return static_cast<std::size_t>(std::popcount(mask_)); }

IndexSubset IndexSubset::symmetric_difference(const IndexSubset& other) const {
  if (m_ != other.m_) fail(ErrorCode::shape_mismatch, "subsets over different I_m");
  return {m_, mask_ ^ other.mask_};
}

IndexSubset IndexSubset::complement() const { return {m_, mask_ ^ full(m_).mask_}; }

std::string IndexSubset::to_string() const {
  std::string out = "{";
  bool first = true;
  for (std::size_t p = 1; p <= m_; ++p) {
    if (!contains(p)) continue;
    if (!first) out += ",";
    out += std::to_string(p);
    first = false;
  }
  return out + "}";
}

std::vector<IndexSubset> subsets_by_cardinality(std::size_t m) {
  if (m > 30) fail(ErrorCode::resource_exceeded, "2^m subsets for m > 30");
  const std::uint64_t count = std::uint64_t{1} << m;
  std::vector<IndexSubset> out;
  out.reserve(count);
  for (std::size_t card = 0; card <= m; ++card)
    for (std::uint64_t mask = 0; mask < count; ++mask)
      if (static_cast<std::size_t>(std::popcount(mask)) == card) out.emplace_back(m, mask);
  return out;
}

std::size_t linear_offset(const DimVector& shape, const MultiIndex& idx) {
  if (idx.size() != shape.rank())
    fail(ErrorCode::index_error, "multi-index length " + std::to_string(idx.size()) +
                                     " != rank " + std::to_string(shape.rank()));
  std::size_t off = 0;
  for (std::size_t k = 0; k < shape.rank(); ++k) {
    if (idx[k] < 1 || idx[k] > shape[k])
      fail(ErrorCode::index_error, "index component " + std::to_string(idx[k]) +
                                       " outside 1.." + std::to_string(shape[k]));
    off = off * shape[k] + (idx[k] - 1);
  }
  return off;
}

MultiIndex multi_index(const DimVector& shape, std::size_t offset) {
  if (offset >= shape.total())
    fail(ErrorCode::index_error, "offset " + std::to_string(offset) + " out of range");
  MultiIndex out(std::vector<std::size_t>(shape.rank()));
  for (std::size_t k = shape.rank(); k-- > 0;) {
    out[k] = offset % shape[k] + 1;
    offset /= shape[k];
  }
  return out;
}

std::pair<MultiIndex, MultiIndex> modified_indices(const MultiIndex& i,
                                                   const MultiIndex& j,
                                                   const IndexSubset& q) {
  if (i.size() != j.size() || i.size() != q.rank())
    fail(ErrorCode::shape_mismatch, "modified_indices: length mismatch");
  MultiIndex iq = i;
  MultiIndex jq = j;
  for (std::size_t p = 1; p <= q.rank(); ++p) {
    if (q.contains(p)) {
      iq[p - 1] = j[p - 1];
      jq[p - 1] = i[p - 1];
    }
  }
  return {std::move(iq), std::move(jq)};
}

Hypermatrix conj(const Hypermatrix& x) {
  Hypermatrix out(x.shape());
  for (std::size_t a = 0; a < x.size(); ++a) out[a] = std::conj(x[a]);
  return out;
}

Hypermatrix scaled(const Hypermatrix& x, Complex c) {
  Hypermatrix out(x.shape());
  for (std::size_t a = 0; a < x.size(); ++a) out[a] = c * x[a];
  return out;
}

double frobenius_norm_sq(const Hypermatrix& x) {
  double s = 0.0;
  for (const Complex& z : x.entries()) s += std::norm(z);
  return s;
}

Hypermatrix normalized(const Hypermatrix& x) {
  const double n = std::sqrt(frobenius_norm_sq(x));
  if (n == 0.0) return x;
  return scaled(x, Complex(1.0 / n, 0.0));
}

Hypermatrix random_hypermatrix(const DimVector& shape, std::uint64_t seed,
                               Distribution dist) {
  Rng rng(seed);
  Hypermatrix out(shape);
  for (std::size_t a = 0; a < out.size(); ++a) out[a] = rng.complex_normal();
  if (dist == Distribution::unit_sphere) {
    out = normalized(out);
  }
  return out;
}

IntHypermatrix random_int_hypermatrix(const DimVector& shape, std::uint64_t seed,
                                      long long lo, long long hi) {
  if (lo > hi) fail(ErrorCode::domain_error, "integer range requires lo <= hi");
  Rng rng(seed);
  IntHypermatrix out(shape);
  for (std::size_t a = 0; a < out.size(); ++a) out[a] = rng.uniform_int(lo, hi);
  return out;
}

}  // namespace cbsforge
