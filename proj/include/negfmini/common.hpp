/**
 * Copyright (c) 2026 The negfmini developers.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace negfmini {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kBoltzmannEV = 8.617333262e-5;  // eV/K

enum class ErrorKind {
  InvalidArgument,
  Partition,
  Format,
  Dimension,
  Hermiticity,
  NonConvergence,
  SingularBlock,
  Divergence,
  Io,
};

const char* to_string(ErrorKind kind);

/// Every failure in the library is reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Complex multiply-add counter. A dense m×k by k×n product counts m·k·n.
/// Real flops follow the usual 8-per-complex-madd convention.
struct OpCount {
  std::uint64_t matmul_madds = 0;
  std::uint64_t inverse_madds = 0;
  std::uint64_t other_madds = 0;
  std::uint64_t matmuls = 0;
  std::uint64_t inverses = 0;
  std::uint64_t padded_madds = 0;  // what a 16-padded batched execution would perform

  std::uint64_t madds() const { return matmul_madds + inverse_madds + other_madds; }
  double flops() const { return 8.0 * static_cast<double>(madds()); }

  OpCount& operator+=(const OpCount& o) {
    matmul_madds += o.matmul_madds;
    inverse_madds += o.inverse_madds;
    other_madds += o.other_madds;
    matmuls += o.matmuls;
    inverses += o.inverses;
    padded_madds += o.padded_madds;
    return *this;
  }
};

}  // namespace negfmini
