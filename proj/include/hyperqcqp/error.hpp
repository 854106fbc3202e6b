// Copyright 2026 The hyperqcqp Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace hyperqcqp {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
    using std::runtime_error::runtime_error;
};

/// A document or instance violates the schema. `path()` names the offending
/// field, e.g. `constraints[2].quadratic[0]`.
class SchemaError : public Error {
 public:
    SchemaError(std::string path, const std::string& what)
            : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

 private:
    std::string path_;
};

class InvalidArgument : public Error {
 public:
    using Error::Error;
};

/// Numerical breakdown inside a solver (non-positive curvature, stalled step).
class NumericalError : public Error {
 public:
    using Error::Error;
};

}  // namespace hyperqcqp
