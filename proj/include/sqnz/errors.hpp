// Copyright (c) 2026 The sqnz authors
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

#include <stdexcept>
#include <string>

namespace sqnz {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Invalid user configuration (bad band, Nyquist violation, malformed file).
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Oscillator coupling too strong for the weak-coupling resonance expansion.
class StrongCouplingError : public ConfigError {
public:
  using ConfigError::ConfigError;
};

/// Asymptotic formula requested outside its time window or parameter ordering.
class RegimeMismatch : public Error {
public:
  using Error::Error;
};

/// Internal self-check failed (e.g. a closed-form integrand that is not real).
class ConsistencyError : public Error {
public:
  using Error::Error;
};

/// Quadrature did not reach its tolerance within the panel budget.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, double st, double ns, double achieved)
      : Error(what), st_(st), ns_(ns), achieved_(achieved) {}

  double st_estimate() const { return st_; }
  double ns_estimate() const { return ns_; }
  double achieved_rel_error() const { return achieved_; }

private:
  double st_, ns_, achieved_;
};

} // namespace sqnz
