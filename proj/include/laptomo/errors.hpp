// Copyright (c) the laptomo authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace laptomo {

/// A direct factorization (sparse or dense) could not be completed.
class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solve reached its iteration cap with unconverged systems.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<int> unconverged)
      : std::runtime_error(what), unconverged_shifts(std::move(unconverged)) {}

  std::vector<int> unconverged_shifts;
};

/// A configuration file failed to parse or validate.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace laptomo
