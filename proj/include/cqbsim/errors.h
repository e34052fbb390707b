// Copyright 2026 The cqbsim Authors
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

#ifndef CQBSIM_ERRORS_H
#define CQBSIM_ERRORS_H

#include <stdexcept>
#include <string>

namespace cqbsim {

/// Error classes surfaced to the CLI as distinct exit codes.
enum class ErrorKind {
    Config = 2,
    Numeric = 3,
    Convergence = 4,
};

const char *error_kind_name(ErrorKind kind);

class CqbError : public std::runtime_error {
   public:
    CqbError(ErrorKind kind, const std::string &message, std::string field = "")
        : std::runtime_error(message), kind_(kind), field_(std::move(field)) {
    }
    ErrorKind kind() const {
        return kind_;
    }
    /// Name of the offending input field, empty when not applicable.
    const std::string &field() const {
        return field_;
    }

   private:
    ErrorKind kind_;
    std::string field_;
};

struct ConfigError : CqbError {
    explicit ConfigError(const std::string &message, std::string field = "")
        : CqbError(ErrorKind::Config, message, std::move(field)) {
    }
};

struct NumericError : CqbError {
    explicit NumericError(const std::string &message, std::string field = "")
        : CqbError(ErrorKind::Numeric, message, std::move(field)) {
    }
};

struct ConvergenceError : CqbError {
    explicit ConvergenceError(const std::string &message, std::string field = "")
        : CqbError(ErrorKind::Convergence, message, std::move(field)) {
    }
};

}  // namespace cqbsim

#endif
