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

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace cfmimo
{

struct CdfPoint
{
    double value = 0.0;
    double probability = 0.0;
};

/// Empirical CDF, F(x) = #{v <= x} / n, one point per distinct value.
inline std::vector<CdfPoint> compute_cdf(std::vector<double> values)
{
    if (values.empty())
        throw ParameterError("compute_cdf: empty input");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    std::vector<CdfPoint> cdf;
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        if (i + 1 < values.size() && values[i + 1] == values[i])
            continue;
        cdf.push_back({values[i], static_cast<double>(i + 1) / n});
    }
    return cdf;
}

/// p-th percentile (p in [0, 100]) with linear interpolation between order
/// statistics at rank p/100 * (n - 1).
inline double percentile(std::vector<double> values, double p)
{
    if (values.empty())
        throw ParameterError("percentile: empty input");
    if (p < 0.0 || p > 100.0)
        throw ParameterError("percentile: p must lie in [0, 100]");
    std::sort(values.begin(), values.end());
    const double rank = p / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = rank - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

inline double median(std::vector<double> values) { return percentile(std::move(values), 50.0); }

inline double mean(const std::vector<double> &values)
{
    if (values.empty())
        throw ParameterError("mean: empty input");
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

} // namespace cfmimo
