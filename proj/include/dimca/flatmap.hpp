#pragma once

#include <cstdint>
#include <vector>

namespace dimca {

inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Insert-only open-addressing map from u64 keys to u32 values.
// Keys must leave the top bit clear (the empty sentinel uses it).
class FlatMap64 {
 public:
  static constexpr uint64_t kEmpty = ~0ull;

  explicit FlatMap64(int initial_pow2 = 16) { reset(initial_pow2); }

  void reset(int pow2) {
    mask_ = (size_t(1) << pow2) - 1;
    keys_.assign(mask_ + 1, kEmpty);
    vals_.assign(mask_ + 1, 0);
    size_ = 0;
  }

  size_t size() const { return size_; }

  // Returns (value, inserted). When absent, inserts with `fresh`.
  std::pair<uint32_t, bool> insert_or_get(uint64_t key, uint32_t fresh) {
    if (size_ * 10 >= (mask_ + 1) * 7) grow();
    size_t i = mix64(key) & mask_;
    while (true) {
      if (keys_[i] == kEmpty) {
        keys_[i] = key;
        vals_[i] = fresh;
        ++size_;
        return {fresh, true};
      }
      if (keys_[i] == key) return {vals_[i], false};
      i = (i + 1) & mask_;
    }
  }

  // Returns value or UINT32_MAX.
  uint32_t find(uint64_t key) const {
    size_t i = mix64(key) & mask_;
    while (true) {
      if (keys_[i] == kEmpty) return UINT32_MAX;
      if (keys_[i] == key) return vals_[i];
      i = (i + 1) & mask_;
    }
  }

  void clear_and_free() {
    keys_.clear();
    keys_.shrink_to_fit();
    vals_.clear();
    vals_.shrink_to_fit();
    size_ = 0;
    mask_ = 0;
  }

 private:
  void grow() {
    std::vector<uint64_t> ok = std::move(keys_);
    std::vector<uint32_t> ov = std::move(vals_);
    mask_ = mask_ * 2 + 1;
    keys_.assign(mask_ + 1, kEmpty);
    vals_.assign(mask_ + 1, 0);
    for (size_t j = 0; j < ok.size(); ++j) {
      if (ok[j] == kEmpty) continue;
      size_t i = mix64(ok[j]) & mask_;
      while (keys_[i] != kEmpty) i = (i + 1) & mask_;
      keys_[i] = ok[j];
      vals_[i] = ov[j];
    }
  }

  std::vector<uint64_t> keys_;
  std::vector<uint32_t> vals_;
  size_t mask_ = 0;
  size_t size_ = 0;
};

}  // namespace dimca
