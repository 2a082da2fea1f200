// SPDX-License-Identifier: Apache-2.0
//
// cfmimo - uplink cell-free massive MIMO simulation library
// Copyright (C) 2026 The cfmimo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "linalg.hpp"

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace cfmimo
{

using Rng = std::mt19937_64;

// Independent stream keyed by (master seed, path). Same key, same stream.
inline Rng make_stream(std::uint64_t master, std::initializer_list<std::uint64_t> path)
{
    std::vector<std::uint32_t> words;
    words.reserve(2 * (path.size() + 1));
    auto push = [&](std::uint64_t v)
    {
        words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
        words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push(master);
    for (auto p : path)
        push(p);
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
}

// Length-n vector of i.i.d. CN(0, variance) entries.
inline CVector complex_gaussian(Eigen::Index n, Rng &rng, double variance = 1.0)
{
    std::normal_distribution<double> g(0.0, std::sqrt(variance / 2.0));
    CVector w(n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        const double re = g(rng);
        const double im = g(rng);
        w(i) = cplx(re, im);
    }
    return w;
}

} // namespace cfmimo
