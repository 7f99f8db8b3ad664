// Copyright 2026 The cardrank Authors. All Rights Reserved.
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

#ifndef CARDRANK_ERROR_HPP
#define CARDRANK_ERROR_HPP

#include <stdexcept>
#include <string>

namespace cardrank {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data. The CLI maps this to exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid parameters or arguments. The CLI maps this to exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace cardrank

#endif  // CARDRANK_ERROR_HPP
