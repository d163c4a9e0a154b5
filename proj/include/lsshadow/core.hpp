// Copyright 2026 The lsshadow Authors
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

#pragma once

#include <bit>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace lsshadow {

using Complex = std::complex<double>;
using Mask = std::uint32_t;

/// Largest system size accepted anywhere in the library. Dense 2^N x 2^N
/// solves and 4^N objects stay desk-scale below this bound.
inline constexpr int kMaxSites = 14;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument (out-of-range dimension, probability, sizes...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A state violates its normalization or Hermiticity contract.
class StateError : public Error {
 public:
  using Error::Error;
};

/// Operation requires a Clifford circuit but got something else.
class TypeError : public Error {
 public:
  using Error::Error;
};

/// Malformed, mismatched or corrupted persisted data.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// The reconstruction system is singular or too ill-conditioned, i.e. the
/// ensemble is not tomographically complete at working precision.
class SingularEnsembleError : public Error {
 public:
  SingularEnsembleError(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ParameterError(message);
}

inline void require_sites(int n_sites) {
  require(n_sites >= 1 && n_sites <= kMaxSites,
          "n_sites must lie in [1, " + std::to_string(kMaxSites) + "], got " +
              std::to_string(n_sites));
}

inline int popcount(Mask m) noexcept { return std::popcount(m); }

inline Mask full_mask(int n_sites) noexcept {
  return n_sites >= 32 ? ~Mask{0} : ((Mask{1} << n_sites) - 1);
}

/// Integer power for small non-negative exponents (exact for moderate sizes).
inline double ipow(double base, int exponent) noexcept {
  double out = 1.0;
  for (int i = 0; i < exponent; ++i) out *= base;
  return out;
}

}  // namespace lsshadow
