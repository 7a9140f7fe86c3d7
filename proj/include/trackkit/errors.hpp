/*
 * Copyright 2026 The trackkit Authors. All rights reserved.
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
 */

#pragma once

#include <stdexcept>
#include <string>

namespace trackkit {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A matrix or vector holds NaN or infinite entries.
class InvalidMatrix : public Error {
 public:
  using Error::Error;
};

/// Operand shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A system violates m <= n or l <= n.
class DimensionPolicyError : public Error {
 public:
  using Error::Error;
};

/// A system or trajectory file could not be parsed.
class FormatError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Every Markov parameter C A^{k-1} B, k = 1..n, vanishes, so the delay L is
/// not defined.
class NoInputOutputCoupling : public Error {
 public:
  NoInputOutputCoupling()
      : Error("L is not defined: the system has no input-output coupling") {}
};

class HorizonTooShort : public Error {
 public:
  using Error::Error;
};

/// An index is undefined for the given data (e.g. theta of a zero reference).
class UndefinedIndex : public Error {
 public:
  using Error::Error;
};

class NoTrackableSubset : public Error {
 public:
  using Error::Error;
};

}  // namespace trackkit
