// Copyright 2026 The SRPO Lab Authors. All rights reserved.
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

#ifndef SRPOLAB_RNG_HPP_
#define SRPOLAB_RNG_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace srpo {

std::uint64_t Fnv1a64(std::string_view bytes);
std::uint64_t SplitMix64(std::uint64_t x);

// Seed for an independent stream identified by (seed, purpose). Every
// consumer of randomness asks for its own stream; there is no global
// generator.
std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view purpose);

// Thin wrapper over mt19937_64. The raw engine sequence is fixed by the
// standard; the helpers below avoid the implementation-defined
// std::*_distribution types so streams are identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::string_view purpose)
      : engine_(DeriveSeed(seed, purpose)) {}

  std::uint64_t NextU64() { return engine_(); }
  // Uniform in [0, 1).
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  // Uniform integer in [0, n). n must be positive.
  int UniformInt(int n);
  // Index drawn from an unnormalized nonnegative weight vector.
  int Categorical(std::span<const double> weights);
  double Normal();

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace srpo

#endif  // SRPOLAB_RNG_HPP_
