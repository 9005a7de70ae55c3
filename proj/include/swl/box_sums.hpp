#pragma once

// Summed-volume tables and separable sliding-window maxima on the lattice.

#include <cstddef>
#include <deque>
#include <span>
#include <vector>

#include "swl/grid.hpp"

namespace swl {

/// n-dimensional summed-volume table. Entries are accumulated in long double
/// so small boxes inside large tables keep ~1e-16 relative accuracy.
class BoxSums {
 public:
  BoxSums(const GridSpec& spec, std::span<const double> values) : spec_(spec) {
    require(values.size() == spec.size(), "box sums: size mismatch");
    const int n = spec.dim();
    const int N = spec.points();
    ext_ = N + 1;
    std::size_t total = 1;
    for (int a = n - 1; a >= 0; --a) {
      strides_[a] = total;
      total *= static_cast<std::size_t>(ext_);
    }
    table_.assign(total, 0.0L);
    for (std::size_t i = 0; i < values.size(); ++i) {
      Index idx = spec.unflatten(i);
      std::size_t t = 0;
      for (int a = 0; a < n; ++a) t += static_cast<std::size_t>(idx[a] + 1) * strides_[a];
      table_[t] = values[i];
    }
    for (int a = 0; a < n; ++a) {
      const std::size_t s = strides_[a];
      for (std::size_t t = 0; t < total; ++t) {
        const int coord = static_cast<int>((t / s) % static_cast<std::size_t>(ext_));
        if (coord > 0) table_[t] += table_[t - s];
      }
    }
  }

  BoxSums(const GridFunction& f) : BoxSums(f.spec(), f.values()) {}

  /// Sum over the half-open cell box [lo, hi); ranges must already be clipped.
  long double sum(const Index& lo, const Index& hi) const {
    const int n = spec_.dim();
    for (int a = 0; a < n; ++a)
      if (hi[a] <= lo[a]) return 0.0L;
    long double s = 0.0L;
    const unsigned corners = 1u << n;
    for (unsigned mask = 0; mask < corners; ++mask) {
      std::size_t t = 0;
      int parity = 0;
      for (int a = 0; a < n; ++a) {
        if (mask & (1u << a)) {
          t += static_cast<std::size_t>(lo[a]) * strides_[a];
          ++parity;
        } else {
          t += static_cast<std::size_t>(hi[a]) * strides_[a];
        }
      }
      if (parity % 2) s -= table_[t];
      else s += table_[t];
    }
    return s;
  }

  long double sum(const Cube& q) const { return sum(q.lo, q.hi); }

  const GridSpec& spec() const { return spec_; }

 private:
  GridSpec spec_;
  int ext_ = 0;
  std::array<std::size_t, kMaxDim> strides_{};
  std::vector<long double> table_;
};

/// In place: data[x] <- max of data over the clipped window |y - x|_inf <= radius.
inline void sliding_max(const GridSpec& spec, std::vector<double>& data, int radius) {
  if (radius <= 0) return;
  const int n = spec.dim();
  const int N = spec.points();
  std::vector<double> line(static_cast<std::size_t>(N));
  std::vector<double> out(static_cast<std::size_t>(N));
  std::deque<int> window;
  for (int a = 0; a < n; ++a) {
    const std::size_t s = spec.stride(a);
    for (std::size_t base = 0; base < data.size(); ++base) {
      // visit each line once, from the cell whose axis-a coordinate is 0
      if ((base / s) % static_cast<std::size_t>(N) != 0) continue;
      for (int i = 0; i < N; ++i) line[i] = data[base + i * s];
      window.clear();
      int next = 0;
      for (int i = 0; i < N; ++i) {
        const int right = std::min(N - 1, i + radius);
        while (next <= right) {
          while (!window.empty() && line[window.back()] <= line[next]) window.pop_back();
          window.push_back(next++);
        }
        while (window.front() < i - radius) window.pop_front();
        out[i] = line[window.front()];
      }
      for (int i = 0; i < N; ++i) data[base + i * s] = out[i];
    }
  }
}

}  // namespace swl
