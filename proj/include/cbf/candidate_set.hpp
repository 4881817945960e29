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


#ifndef CBF_CANDIDATE_SET_HPP
#define CBF_CANDIDATE_SET_HPP

#include <cstddef>
#include <vector>

namespace cbf
{

using UserIndex = std::size_t;

// One user per BS, members[b] drawn from the pool of BS b. `index` is the
// position of the set in the catalogue it was enumerated from.
struct CandidateSet
{
    std::vector<UserIndex> members;
    std::size_t index = 0;

    std::size_t size() const { return members.size(); }
    UserIndex operator[](std::size_t b) const { return members[b]; }
    bool operator==(const CandidateSet &) const = default;
};

} // namespace cbf

#endif // CBF_CANDIDATE_SET_HPP
