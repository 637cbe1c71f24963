// Copyright 2026 The SpikeForge Authors.
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

#include "spikeforge/camera_sim.hpp"
#include "spikeforge/compress.hpp"
#include "spikeforge/dataset.hpp"
#include "spikeforge/encodings.hpp"
#include "spikeforge/entropy.hpp"
#include "spikeforge/error.hpp"
#include "spikeforge/pgm.hpp"
#include "spikeforge/rational.hpp"
#include "spikeforge/spike_stream.hpp"
#include "spikeforge/storage.hpp"
