// SPDX-License-Identifier: Apache-2.0
//
// cbfsched - coordinated beamforming and user selection for multicell MISO
// Copyright (C) 2026 The cbfsched authors
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
// ------------------------------------------------------------------------


#ifndef CBF_ERROR_HPP
#define CBF_ERROR_HPP

#include <stdexcept>
#include <string>

namespace cbf
{

// Runtime failure inside a numerical routine or a simulation step.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// Invalid experiment or network configuration, detected before any work.
class ConfigError : public Error
{
  public:
    using Error::Error;
};

} // namespace cbf

#endif // CBF_ERROR_HPP
