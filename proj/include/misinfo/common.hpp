// Copyright 2026 The Misinfo Dropout Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MISINFO_COMMON_HPP_
#define MISINFO_COMMON_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace misinfo {

using NodeId = std::uint32_t;
using ClassIndex = std::uint32_t;
using Rng = std::mt19937_64;

// Error hierarchy. Everything thrown by the library derives from Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// The per-step optimization problem has no feasible point.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

namespace detail {

template <typename... Args>
std::string concat(const Args&... args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

}  // namespace detail

// splitmix64 finalizer; used to derive independent stream seeds from a
// master seed and a tuple of indices.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master) { return mix64(master); }

template <typename... Rest>
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t first,
                                    Rest... rest) {
  return derive_seed(mix64(master ^ mix64(first + 0x632be59bd9b4e019ULL)),
                     static_cast<std::uint64_t>(rest)...);
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

// Dense k x k matrix of reals, row-major. Rows index the sending class and
// columns the receiving class.
class BlockMatrix {
 public:
  BlockMatrix() = default;
  explicit BlockMatrix(std::size_t k, double fill = 0.0)
      : k_(k), values_(k * k, fill) {}

  static BlockMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    BlockMatrix m(rows.size());
    for (std::size_t u = 0; u < rows.size(); ++u) {
      if (rows[u].size() != rows.size()) {
        throw InvalidArgument(detail::concat("block matrix row ", u, " has ",
                                             rows[u].size(), " entries, expected ",
                                             rows.size()));
      }
      for (std::size_t v = 0; v < rows.size(); ++v) m(u, v) = rows[u][v];
    }
    return m;
  }

  static BlockMatrix identity(std::size_t k) {
    BlockMatrix m(k);
    for (std::size_t u = 0; u < k; ++u) m(u, u) = 1.0;
    return m;
  }

  std::size_t size() const { return k_; }

  double& operator()(std::size_t u, std::size_t v) { return values_[u * k_ + v]; }
  double operator()(std::size_t u, std::size_t v) const {
    return values_[u * k_ + v];
  }

  std::span<const double> values() const { return values_; }

  std::vector<std::vector<double>> rows() const {
    std::vector<std::vector<double>> out(k_, std::vector<double>(k_));
    for (std::size_t u = 0; u < k_; ++u)
      for (std::size_t v = 0; v < k_; ++v) out[u][v] = (*this)(u, v);
    return out;
  }

  bool all_within(double lo, double hi) const {
    return std::all_of(values_.begin(), values_.end(), [&](double x) {
      return std::isfinite(x) && x >= lo && x <= hi;
    });
  }

  friend bool operator==(const BlockMatrix&, const BlockMatrix&) = default;

 private:
  std::size_t k_ = 0;
  std::vector<double> values_;
};

inline void require_probabilities(const BlockMatrix& m, const char* what) {
  if (!m.all_within(0.0, 1.0)) {
    throw InvalidArgument(detail::concat(what, " entries must lie in [0,1]"));
  }
}

// Runs body(i) for i in [0, count) on up to `threads` workers. Callers write
// into slot i of a preallocated output, so results do not depend on
// scheduling.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                         unsigned threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += threads) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  pool.clear();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace misinfo

#endif  // MISINFO_COMMON_HPP_
