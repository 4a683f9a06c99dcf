// Copyright 2026 The qswlab Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qswlab {

/// Malformed or inconsistent input (bad file, bad argument, broken precondition).
class InputError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Graph document that could not be parsed. Carries the byte offset when known.
class ParseError : public InputError {
  public:
    ParseError(const std::string &message, std::size_t position)
        : InputError(message + " (at byte " + std::to_string(position) + ")"), position_(position) {
    }
    explicit ParseError(const std::string &message) : InputError(message), position_(npos) {
    }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::size_t position() const {
        return position_;
    }

  private:
    std::size_t position_;
};

/// The graph does not satisfy the admissibility condition required by an operation.
class AdmissibilityError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A numerical procedure could not deliver a meaningful result.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace qswlab
