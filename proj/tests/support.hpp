// SPDX-License-Identifier: Apache-2.0
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


// Test-side names for the instance generator and finite-difference oracle.

#pragma once

#include "rismimo/gradcheck.hpp"

namespace rismimo::testing {

using rismimo::fd_gradient;
using rismimo::random_hermitian;
using rismimo::random_instance;
using rismimo::random_psd;
using rismimo::rel_error;
using rismimo::SmallInstance;

}  // namespace rismimo::testing
