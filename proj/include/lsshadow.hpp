// Copyright 2026 The lsshadow Authors
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


// Umbrella header.

#pragma once

#include "lsshadow/clifford.hpp"
#include "lsshadow/core.hpp"
#include "lsshadow/dense.hpp"
#include "lsshadow/ensemble.hpp"
#include "lsshadow/entanglement.hpp"
#include "lsshadow/estimators.hpp"
#include "lsshadow/experiments.hpp"
#include "lsshadow/frame_potential.hpp"
#include "lsshadow/io.hpp"
#include "lsshadow/pauli.hpp"
#include "lsshadow/reconstruction.hpp"
#include "lsshadow/region.hpp"
#include "lsshadow/rng.hpp"
#include "lsshadow/snapshot_io.hpp"
