// Copyright 2026 The Exposure Rollout Authors.
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

#include <stdexcept>
#include <string>

namespace rollout {

// Bad arguments to any public operation (sizes, ranges, ids).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A customer whose best achievable utility is negative.
class DegenerateCustomer : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A time window with no arrivals where a distribution is required.
class EmptyWindow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The rollout plan has no target or floor for the requested step.
class PlanError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Exhaustive enumeration requested on an instance that is too large.
class SizeLimit : public std::length_error {
 public:
  using std::length_error::length_error;
};

// File ingestion failures: parse errors, dimension mismatches, bad values.
class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rollout
