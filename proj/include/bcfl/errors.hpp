#pragma once
//------------------------------------------------------------------------------
//
//   Copyright 2026 The bcfl-incentive Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace bcfl {

/// Input outside the mathematical domain of a formula (zero or non-finite CPU
/// frequency, zero price, ...).
class DomainError : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

/// Malformed call: mismatched list lengths, unknown client ids, bad counts.
class ArgumentError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid or unparseable configuration.
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// A closed-form strategy does not exist for the given inputs. `minimum()` is
/// the smallest value of the offending quantity for which it would exist.
class InfeasibleError : public std::runtime_error
{
public:
  InfeasibleError(std::string const &message, double minimum)
    : std::runtime_error(message)
    , message_(message)
    , minimum_(minimum)
  {}

  double minimum() const noexcept
  {
    return minimum_;
  }

  std::optional<std::size_t> client_id() const noexcept
  {
    return client_id_;
  }

  void set_client(std::size_t id)
  {
    client_id_ = id;
    full_      = "client " + std::to_string(id) + ": " + message_;
  }

  char const *what() const noexcept override
  {
    return client_id_ ? full_.c_str() : message_.c_str();
  }

private:
  std::string                message_;
  std::string                full_;
  double                     minimum_;
  std::optional<std::size_t> client_id_;
};

/// Training price too low for the time budget to admit a mining frequency.
class InfeasiblePriceError : public InfeasibleError
{
public:
  using InfeasibleError::InfeasibleError;
};

/// Training reward bound too low (or non-positive) for the budget-binding
/// prices to exist.
class InfeasibleBudgetError : public InfeasibleError
{
public:
  using InfeasibleError::InfeasibleError;
};

/// Grand-coalition value is zero, so reward shares are undefined.
class DegenerateValueError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// The incomplete-information mechanism refused a client whose expected
/// utility is negative.
class MechanismRejectError : public std::runtime_error
{
public:
  MechanismRejectError(std::size_t client, double expected_utility)
    : std::runtime_error("client " + std::to_string(client) +
                         ": expected utility " + std::to_string(expected_utility) +
                         " is negative; mechanism rejects the prices")
    , client_(client)
    , expected_utility_(expected_utility)
  {}

  std::size_t client() const noexcept
  {
    return client_;
  }
  double expected_utility() const noexcept
  {
    return expected_utility_;
  }

private:
  std::size_t client_;
  double      expected_utility_;
};

/// Exact Shapley enumeration requested above its size limit.
class EnumerationLimitError : public std::length_error
{
public:
  using std::length_error::length_error;
};

/// A file could not be read or written. The message names the path.
class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

}  // namespace bcfl
