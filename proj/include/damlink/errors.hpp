// SPDX-License-Identifier: Apache-2.0
//
// damlink: link-level simulator for delay-aligned single-carrier and
// cyclic-prefix OFDM transmission over sparse multipath MIMO channels.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// -------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>

namespace damlink {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// A matrix that must have full column rank does not.
class RankDeficientError : public Error {
  public:
    using Error::Error;
};

// A configuration value is outside its admissible set.
class ConfigError : public Error {
  public:
    using Error::Error;
};

// A runtime argument is outside the domain of the requested operation.
class DomainError : public Error {
  public:
    using Error::Error;
};

// Fewer dictionary atoms than RF chains to select.
class DictionaryTooSmallError : public Error {
  public:
    using Error::Error;
};

// A channel realization carries no usable energy.
class DegenerateChannelError : public Error {
  public:
    using Error::Error;
};

// A signal block carries no energy where a ratio of powers is required.
class DegenerateSignalError : public Error {
  public:
    using Error::Error;
};

// Cyclic prefix shorter than the channel memory.
class CpTooShortError : public Error {
  public:
    using Error::Error;
};

// A buffer length does not match what the operation requires.
class LengthError : public Error {
  public:
    using Error::Error;
};

}  // namespace damlink
