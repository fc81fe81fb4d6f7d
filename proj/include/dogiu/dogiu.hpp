// Copyright 2026 The dogiu Authors
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

#include "dogiu/asynchrony.hpp"
#include "dogiu/bandit.hpp"
#include "dogiu/csv.hpp"
#include "dogiu/envs.hpp"
#include "dogiu/harness/acceptance.hpp"
#include "dogiu/harness/config.hpp"
#include "dogiu/harness/simulator.hpp"
#include "dogiu/harness/stats.hpp"
#include "dogiu/harness/tabular.hpp"
#include "dogiu/network.hpp"
#include "dogiu/rng.hpp"
#include "dogiu/submodular.hpp"
