// Copyright 2026 The Misinfo Dropout Authors.
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

#ifndef MISINFO_MISINFO_HPP_
#define MISINFO_MISINFO_HPP_

#include "misinfo/common.hpp"
#include "misinfo/graph_core.hpp"
#include "misinfo/cascade_sim.hpp"
#include "misinfo/propagation_fit.hpp"
#include "misinfo/dropout_opt.hpp"
#include "misinfo/controller.hpp"
#include "misinfo/harness.hpp"

#endif  // MISINFO_MISINFO_HPP_
