#pragma once
#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>

namespace qmsn {

/// Fixed-capacity vector for small component lists on the hot path.
/// Trivially copyable when T is; throws on overflow instead of growing.
template <class T, std::size_t N>
class InlineVec {
 public:
  void push_back(const T& value) {
    if (count_ == N) throw std::length_error("InlineVec: capacity exceeded");
    items_[count_++] = value;
  }

  void clear() noexcept { count_ = 0; }

  [[nodiscard]] std::size_t size() const noexcept { return count_; }
  [[nodiscard]] bool empty() const noexcept { return count_ == 0; }

  T& operator[](std::size_t i) { return items_[i]; }
  const T& operator[](std::size_t i) const { return items_[i]; }

  T* begin() noexcept { return items_.data(); }
  T* end() noexcept { return items_.data() + count_; }
  const T* begin() const noexcept { return items_.data(); }
  const T* end() const noexcept { return items_.data() + count_; }
  const T* data() const noexcept { return items_.data(); }

  operator std::span<const T>() const noexcept {
    return std::span<const T>(items_.data(), count_);
  }

 private:
  std::array<T, N> items_{};
  std::size_t count_ = 0;
};

}  // namespace qmsn
