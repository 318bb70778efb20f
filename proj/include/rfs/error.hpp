/* Copyright 2026 The rfspec Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */

#pragma once

#include <stdexcept>
#include <string>

namespace rfs {

// Base of everything this library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: unknown activation, malformed config, invalid dimensions.
class UsageError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

// The continuation left the physical (Herglotz) sheet of the quartic.
class BranchError : public Error {
 public:
  BranchError(const std::string& what, long index = -1)
      : Error(what), index_(index) {}
  long index() const noexcept { return index_; }

 private:
  long index_;
};

// Total spectral mass outside its admissible window (grid too narrow).
class MassError : public Error {
 public:
  using Error::Error;
};

class NoOutlierError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, int layer)
      : Error(what), layer_(layer) {}
  int layer() const noexcept { return layer_; }

 private:
  int layer_;
};

}  // namespace rfs
