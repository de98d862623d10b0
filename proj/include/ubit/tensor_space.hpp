#pragma once

#include <Eigen/Dense>
#include <initializer_list>
#include <span>
#include <vector>

#include "ubit/errors.hpp"

namespace ubit {

using Index = Eigen::Index;

// Ordered tensor factorization of a flat index range, e.g. {N, 2, d} for an
// environment x ubit x local-system space.  Flat indices are row-major: the
// last factor varies fastest.
class TensorSpace {
 public:
  TensorSpace() = default;
  explicit TensorSpace(std::vector<Index> dims);
  TensorSpace(std::initializer_list<Index> dims)
      : TensorSpace(std::vector<Index>(dims)) {}

  Index total() const { return total_; }
  Index factors() const { return static_cast<Index>(dims_.size()); }
  Index dim(Index k) const { return dims_.at(static_cast<size_t>(k)); }
  const std::vector<Index>& dims() const { return dims_; }

  Index flat(std::span<const Index> multi) const;
  std::vector<Index> unflat(Index flat) const;

  // Space spanned by a subset of factors (original order preserved).
  TensorSpace subspace(std::span<const Index> keep) const;

 private:
  std::vector<Index> dims_;
  std::vector<Index> strides_;
  Index total_ = 1;
};

}  // namespace ubit
