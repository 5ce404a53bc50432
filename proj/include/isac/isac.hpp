// SPDX-License-Identifier: Apache-2.0
//
// isac-uav: beam-pattern synthesis and learned beamforming for sensing/communication UAVs
// Copyright (C) 2026 The isac-uav authors
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

#ifndef ISAC_ISAC_HPP
#define ISAC_ISAC_HPP

#include "beam_metrics.hpp"
#include "channel.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "neuralnet.hpp"
#include "nulling.hpp"
#include "pattern.hpp"
#include "pipeline.hpp"
#include "scenario.hpp"
#include "synthesis.hpp"
#include "taper.hpp"
#include "weights.hpp"

#endif
