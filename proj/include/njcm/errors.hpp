// Copyright 2026 The njcm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NJCM_ERRORS_HPP
#define NJCM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace njcm {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid or inconsistent user configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Filesystem failures: unreadable config, unwritable output (CLI exit code 4).
class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

// A numerical routine could not meet its contract (CLI exit code 3).
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& msg) : Error(msg) {}
};

// Coherent-state probability mass beyond the Fock cutoff exceeds budget.
class CutoffInsufficient : public NumericalError {
 public:
  explicit CutoffInsufficient(const std::string& msg) : NumericalError(msg) {}
};

// Adaptive integrator step size fell below representable resolution.
class StepSizeUnderflow : public NumericalError {
 public:
  explicit StepSizeUnderflow(const std::string& msg) : NumericalError(msg) {}
};

// Adaptive quadrature hit its depth limit before reaching tolerance.
class QuadratureNotConverged : public NumericalError {
 public:
  explicit QuadratureNotConverged(const std::string& msg)
      : NumericalError(msg) {}
};

// Least-squares design matrix is rank deficient or too ill-conditioned.
class SingularDesign : public NumericalError {
 public:
  explicit SingularDesign(const std::string& msg) : NumericalError(msg) {}
};

// Every record sits at p_hat = 0 or 1, so the weighted fit is meaningless.
class DegenerateWeights : public NumericalError {
 public:
  explicit DegenerateWeights(const std::string& msg) : NumericalError(msg) {}
};

// An operation divided by the detuning, which is zero.
class ZeroDetuning : public NumericalError {
 public:
  explicit ZeroDetuning(const std::string& msg) : NumericalError(msg) {}
};

// Operation requires the carrier (k = 0) but a sideband was configured.
class WrongSideband : public NumericalError {
 public:
  explicit WrongSideband(const std::string& msg) : NumericalError(msg) {}
};

// Operation requires a specific input-state family (Fock, coherent, ...).
class WrongBasis : public NumericalError {
 public:
  explicit WrongBasis(const std::string& msg) : NumericalError(msg) {}
};

}  // namespace njcm

#endif  // NJCM_ERRORS_HPP
