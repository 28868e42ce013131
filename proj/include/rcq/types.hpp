// Copyright 2026 The rcq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace rcq {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Random engine used everywhere. Every stochastic routine takes one explicitly.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer; mixes a master seed with task keys into an independent stream seed.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master) { return mix_seed(master); }

template <typename... Keys>
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t key, Keys... rest) {
    return derive_seed(mix_seed(master ^ mix_seed(key + 0x632be59bd9b4e019ULL)), rest...);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

constexpr int dim_of(int n_qubits) { return 1 << n_qubits; }

}  // namespace rcq
