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

#ifndef CARDRANK_CARDRANK_HPP
#define CARDRANK_CARDRANK_HPP

#include "cardrank/controls.hpp"
#include "cardrank/engine.hpp"
#include "cardrank/error.hpp"
#include "cardrank/evaluation.hpp"
#include "cardrank/hashing.hpp"
#include "cardrank/ingest.hpp"
#include "cardrank/interactions.hpp"
#include "cardrank/mutual_information.hpp"
#include "cardrank/profiling.hpp"
#include "cardrank/ranking.hpp"
#include "cardrank/recode.hpp"
#include "cardrank/synthgen.hpp"
#include "cardrank/worker_pool.hpp"

#endif  // CARDRANK_CARDRANK_HPP
