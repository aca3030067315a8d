// Copyright 2026 The bsadd Authors
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

#ifndef BSADD_ERRORS_HPP
#define BSADD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bsadd {

/// Base class for all bsadd errors. `code()` is a stable machine-readable
/// identifier (also used by the CLI's JSON error output).
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string &message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string &code() const noexcept { return code_; }

 private:
  std::string code_;
};

// Input validation failures (CLI exit code 2).

struct NegativeMassError : Error {
  explicit NegativeMassError(const std::string &msg) : Error("negative_mass", msg) {}
};

struct MassDeficitError : Error {
  explicit MassDeficitError(const std::string &msg) : Error("mass_deficit", msg) {}
};

struct DomainError : Error {
  explicit DomainError(const std::string &msg) : Error("domain_error", msg) {}
};

struct ZeroMeanError : Error {
  explicit ZeroMeanError(const std::string &msg) : Error("zero_mean", msg) {}
};

// Numerical failures (CLI exit code 3).

struct NotAPmfError : Error {
  explicit NotAPmfError(const std::string &msg) : Error("not_a_pmf", msg) {}
};

struct PrecisionExhaustedError : Error {
  explicit PrecisionExhaustedError(const std::string &msg)
      : Error("precision_exhausted", msg) {}
};

struct OverflowError : Error {
  explicit OverflowError(const std::string &msg) : Error("overflow", msg) {}
};

struct DivergentSeriesError : Error {
  explicit DivergentSeriesError(const std::string &msg) : Error("divergent_series", msg) {}
};

struct ConvergenceFailureError : Error {
  explicit ConvergenceFailureError(const std::string &msg)
      : Error("convergence_failure", msg) {}
};

struct EtaZeroError : Error {
  explicit EtaZeroError(const std::string &msg) : Error("eta_zero", msg) {}
};

struct StepFailureError : Error {
  StepFailureError(const std::string &msg, double last_good_eta)
      : Error("step_failure", msg), last_good_eta(last_good_eta) {}
  double last_good_eta;
};

struct NonIntegrableError : Error {
  explicit NonIntegrableError(const std::string &msg) : Error("non_integrable", msg) {}
};

}  // namespace bsadd

#endif
