#include "ubit/tensor_space.hpp"

#include <string>

namespace ubit {

TensorSpace::TensorSpace(std::vector<Index> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw DimMismatch("TensorSpace: no factors");
  for (Index d : dims_) {
    if (d < 1) throw DimMismatch("TensorSpace: factor dimension < 1");
  }
  strides_.assign(dims_.size(), 1);
  for (size_t k = dims_.size(); k-- > 0;) {
    strides_[k] = total_;
    total_ *= dims_[k];
  }
  // strides_ currently hold suffix products in reverse fill order; redo as
  // row-major strides (last factor fastest).
  Index acc = 1;
  for (size_t k = dims_.size(); k-- > 0;) {
    strides_[k] = acc;
    acc *= dims_[k];
  }
}

Index TensorSpace::flat(std::span<const Index> multi) const {
  if (static_cast<Index>(multi.size()) != factors())
    throw DimMismatch("TensorSpace::flat: wrong multi-index length");
  Index f = 0;
  for (size_t k = 0; k < multi.size(); ++k) {
    if (multi[k] < 0 || multi[k] >= dims_[k])
      throw DimMismatch("TensorSpace::flat: index out of range");
    f += multi[k] * strides_[k];
  }
  return f;
}

std::vector<Index> TensorSpace::unflat(Index flat) const {
  if (flat < 0 || flat >= total_)
    throw DimMismatch("TensorSpace::unflat: index out of range");
  std::vector<Index> multi(dims_.size());
  for (size_t k = 0; k < dims_.size(); ++k) {
    multi[k] = flat / strides_[k];
    flat -= multi[k] * strides_[k];
  }
  return multi;
}

TensorSpace TensorSpace::subspace(std::span<const Index> keep) const {
  if (keep.empty()) throw DimMismatch("TensorSpace::subspace: empty keep set");
  std::vector<Index> sub;
  Index prev = -1;
  for (Index k : keep) {
    if (k <= prev || k >= factors())
      throw DimMismatch("TensorSpace::subspace: keep must be strictly "
                        "increasing factor indices");
    prev = k;
    sub.push_back(dims_[static_cast<size_t>(k)]);
  }
  return TensorSpace(sub);
}

}  // namespace ubit
