/*
 * Copyright 2026 The shep-xai Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "shep/common.hpp"
#include "shep/fft.hpp"
#include "shep/simgen.hpp"
#include "shep/transforms.hpp"
#include "shep/patching.hpp"
#include "shep/predictor.hpp"
#include "shep/attribution.hpp"
#include "shep/evaluation.hpp"
#include "shep/io.hpp"
#include "shep/config.hpp"
#include "shep/pipeline.hpp"
