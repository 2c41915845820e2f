// Copyright 2026 The fermix Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace fermix {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters, mismatched dimensions, malformed input files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// 1D coupling denominator vanishes (confinement-induced resonance).
class ResonanceError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Solver failed to converge or a conserved quantity drifted out of bounds.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what, double residual = 0.0)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Rejection sampling exhausted its proposal budget.
class SamplingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Annihilation at a position where the state has (numerically) no weight.
class InvalidPositionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Post-processing could not extract the requested quantity.
class AnalysisError : public Error {
 public:
  using Error::Error;
};

}  // namespace fermix
