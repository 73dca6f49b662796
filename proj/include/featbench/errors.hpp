// Copyright 2026 The Featbench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace featbench {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A program spec violates a family invariant (range, leaf bound, ...).
class InvalidSpec : public Error {
 public:
  using Error::Error;
};

// A program name does not follow the naming convention.
class MalformedName : public InvalidSpec {
 public:
  using InvalidSpec::InvalidSpec;
};

// Branch-tree leaf count (or selector space) exceeds the generation guard.
class OverflowError : public InvalidSpec {
 public:
  using InvalidSpec::InvalidSpec;
};

class CompilerMissing : public Error {
 public:
  using Error::Error;
};

class TargetMissing : public Error {
 public:
  using Error::Error;
};

class ExecFailure : public Error {
 public:
  using Error::Error;
};

class SpawnFailure : public Error {
 public:
  using Error::Error;
};

// An external fuzzer exited before the timeout without producing a crash.
class AdapterMisbehavior : public Error {
 public:
  using Error::Error;
};

// No input of the spec's length can trigger the bug (length-infeasible loops).
class NoWitness : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

// All xs equal or all ys equal: a rank correlation is undefined.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class UnknownSweep : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace featbench
