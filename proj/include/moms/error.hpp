// Copyright 2026 The momsnet Authors.
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

namespace moms {

// Base of every error raised by the library. Each subclass corresponds to one
// failure condition named by an operation contract.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MOMS_DEFINE_ERROR(Name)            \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

// chem
MOMS_DEFINE_ERROR(SyntaxError);
MOMS_DEFINE_ERROR(ValenceError);
MOMS_DEFINE_ERROR(DisconnectedFragment);

// spectra
MOMS_DEFINE_ERROR(OutOfRange);
MOMS_DEFINE_ERROR(ZeroSpectrum);

// motif mining
MOMS_DEFINE_ERROR(EmptyCorpus);
MOMS_DEFINE_ERROR(NoAdjacentPairs);

// hetero graph
MOMS_DEFINE_ERROR(DomainError);
MOMS_DEFINE_ERROR(EmptyVocabulary);
MOMS_DEFINE_ERROR(InvalidSeed);

// neural
MOMS_DEFINE_ERROR(ShapeMismatch);
MOMS_DEFINE_ERROR(GraphCycle);

// training / evaluation
MOMS_DEFINE_ERROR(ConfigError);
MOMS_DEFINE_ERROR(DataMismatch);
MOMS_DEFINE_ERROR(LengthMismatch);
MOMS_DEFINE_ERROR(MissingTrueMatch);

#undef MOMS_DEFINE_ERROR

// Text-format error carrying the 1-based line number where parsing failed.
class FormatError : public Error {
 public:
  FormatError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace moms
