#ifndef VINESHAP_COALITION_H_
#define VINESHAP_COALITION_H_

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace vineshap {

inline constexpr int kMaxFeatures = 25;

// Subset of the feature indices {0, ..., dim-1} as a bitmask.
class Coalition {
 public:
  Coalition() = default;
  Coalition(std::uint32_t mask, int dim) : mask_(mask), dim_(dim) {}

  static Coalition Empty(int dim) { return {0u, dim}; }
  static Coalition Full(int dim) { return {FullMask(dim), dim}; }
  static Coalition Of(const std::vector<int>& members, int dim) {
    std::uint32_t m = 0;
    for (int j : members) m |= 1u << j;
    return {m, dim};
  }
  static std::uint32_t FullMask(int dim) {
    return dim >= 32 ? ~0u : ((1u << dim) - 1u);
  }

  std::uint32_t mask() const { return mask_; }
  int dim() const { return dim_; }
  int size() const { return std::popcount(mask_); }
  bool empty() const { return mask_ == 0; }
  bool contains(int j) const { return (mask_ >> j) & 1u; }
  Coalition complement() const { return {~mask_ & FullMask(dim_), dim_}; }
  Coalition with(int j) const { return {mask_ | (1u << j), dim_}; }

  std::vector<int> members() const {
    std::vector<int> out;
    for (int j = 0; j < dim_; ++j) {
      if (contains(j)) out.push_back(j);
    }
    return out;
  }

  std::string ToString() const {
    std::string s = "{";
    for (int j : members()) {
      if (s.size() > 1) s += ",";
      s += std::to_string(j + 1);
    }
    return s + "}";
  }

  friend bool operator==(const Coalition&, const Coalition&) = default;
  friend auto operator<=>(const Coalition&, const Coalition&) = default;

 private:
  std::uint32_t mask_ = 0;
  int dim_ = 0;
};

}  // namespace vineshap

#endif  // VINESHAP_COALITION_H_
