/*
 * Copyright 2026 The crowdiq Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CROWDIQ_ERROR_HPP_
#define CROWDIQ_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace crowdiq {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent user data. The message always starts with the
// location of the offending value ("line 4, column q2: ...", "raw 17: ...").
class ValidationError : public Error {
 public:
  ValidationError(const std::string& location, const std::string& what)
      : Error(location + ": " + what), location_(location) {}

  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

// Bad parameters passed by the caller (counts, probabilities, caps).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Numerical breakdown inside an algorithm. Indicates a bug, not bad input.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace crowdiq

#endif  // CROWDIQ_ERROR_HPP_
