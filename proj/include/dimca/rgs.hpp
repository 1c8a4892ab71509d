#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace dimca {

// Restricted growth strings: the canonical labelings of set partitions.
// r[0] = 0 and r[i] <= 1 + max(r[0..i-1]); blocks are numbered in order
// of least member. Ranking is lexicographic.
class RgsCoder {
 public:
  explicit RgsCoder(int n) : n_(n) {
    if (n < 0 || n > 25) throw std::invalid_argument("partition size out of range");
    // T[i][m]: completions of positions i..n-1 when m+1 blocks exist.
    T_.assign(n + 1, std::vector<uint64_t>(n + 2, 0));
    for (int m = 0; m <= n + 1; ++m) T_[n][m] = 1;
    for (int i = n - 1; i >= 0; --i)
      for (int m = n; m >= 0; --m) T_[i][m] = uint64_t(m + 1) * T_[i + 1][m] + T_[i + 1][m + 1];
  }

  uint64_t count() const { return n_ == 0 ? 1 : T_[1][0]; }  // Bell(n)

  uint64_t rank(const std::vector<int>& r) const {
    uint64_t acc = 0;
    int m = 0;
    for (int i = 1; i < n_; ++i) {
      int v = r[i];
      if (v <= m) {
        acc += uint64_t(v) * T_[i + 1][m];
      } else {
        acc += uint64_t(m + 1) * T_[i + 1][m];
        m = v;
      }
    }
    return acc;
  }

  std::vector<int> unrank(uint64_t rank) const {
    std::vector<int> r(n_, 0);
    int m = 0;
    for (int i = 1; i < n_; ++i) {
      uint64_t per = T_[i + 1][m];
      uint64_t block = rank / per;
      if (block <= uint64_t(m)) {
        r[i] = int(block);
        rank -= block * per;
      } else {
        r[i] = m + 1;
        rank -= uint64_t(m + 1) * per;
        m += 1;
      }
    }
    return r;
  }

 private:
  int n_;
  std::vector<std::vector<uint64_t>> T_;
};

// All restricted growth strings of length n, lexicographically.
template <class F>
void for_each_rgs(int n, F&& f) {
  std::vector<int> r(n, 0);
  if (n == 0) {
    f(r);
    return;
  }
  auto rec = [&](auto&& self, int i, int m) -> void {
    if (i == n) {
      f(r);
      return;
    }
    for (int v = 0; v <= m + 1; ++v) {
      r[i] = v;
      self(self, i + 1, std::max(m, v));
    }
  };
  rec(rec, 1, 0);
}

// Renames arbitrary labels into restricted-growth form.
inline void to_rgs(std::vector<int>& labels) {
  std::vector<int> map;
  for (int& v : labels) {
    int id = -1;
    for (size_t i = 0; i < map.size(); ++i)
      if (map[i] == v) {
        id = int(i);
        break;
      }
    if (id < 0) {
      id = int(map.size());
      map.push_back(v);
    }
    v = id;
  }
}

}  // namespace dimca
