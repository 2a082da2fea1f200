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

#include <limits>
#include <stdexcept>
#include <string>

namespace cfmimo
{

// Invalid configuration value. field() names the offending key.
class ConfigError : public std::invalid_argument
{
public:
    ConfigError(std::string field, const std::string &what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

    const std::string &field() const noexcept { return field_; }

private:
    std::string field_;
};

// Out-of-domain argument to an operation (alpha <= 0, epsilon <= 0, ...).
class ParameterError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// Matrix input violating a structural requirement (non-Hermitian, singular).
class NumericDomainError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

// ZF-type combiner requested on a rank-deficient or ill-conditioned channel matrix.
class DegenerateCombinerError : public std::runtime_error
{
public:
    DegenerateCombinerError(const std::string &what, double condition_number)
        : std::runtime_error(what), condition_number_(condition_number) {}

    double condition_number() const noexcept { return condition_number_; }

private:
    double condition_number_ = std::numeric_limits<double>::infinity();
};

// Distributed SINR denominator came out non-positive.
class MomentInconsistencyError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Result sets that do not line up (missing users, duplicate keys).
class ConsistencyError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace cfmimo
