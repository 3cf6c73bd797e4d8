#pragma once

#include <span>
#include <vector>

namespace threatcrawl {

// Fixed-length real vector with finite entries.
class Embedding {
 public:
  // Throws DimensionMismatch on an empty vector and std::invalid_argument on
  // non-finite entries.
  explicit Embedding(std::vector<double> values);

  std::size_t dimension() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  double norm() const noexcept;
  // Throws ZeroVector for the zero vector.
  Embedding normalized() const;
  Embedding scaled(double factor) const;

  bool operator==(const Embedding&) const = default;

 private:
  std::vector<double> values_;
};

// dot(a, b) / (|a| |b|), clamped to [-1, 1].
// Throws DimensionMismatch or ZeroVector.
double cosine_similarity(const Embedding& a, const Embedding& b);

}  // namespace threatcrawl
