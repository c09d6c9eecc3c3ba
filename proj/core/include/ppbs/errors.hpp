// Copyright 2026 The ppbs Authors
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

namespace ppbs {

/// Raised when an argument or state violates a documented precondition or
/// type invariant (out-of-range reflectivity, non-physical matrix, unmapped
/// optical mode, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Every amplitude was absorbed by lossy elements, so no output state exists.
/// Gate-level code turns this into a null post-selection.
class PhotonsLost : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Raised when a post-selection pattern keeps no amplitude at all. Callers
/// that can handle this case should use the non-throwing `postselect`, which
/// reports it as a null result instead.
class NullPostselection : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ppbs
