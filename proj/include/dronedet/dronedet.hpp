// Copyright 2026 The dronedet Authors.
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

#ifndef DRONEDET_DRONEDET_HPP
#define DRONEDET_DRONEDET_HPP

#include "dronedet/box.hpp"
#include "dronedet/config.hpp"
#include "dronedet/dataset.hpp"
#include "dronedet/detector.hpp"
#include "dronedet/error.hpp"
#include "dronedet/eval.hpp"
#include "dronedet/image.hpp"
#include "dronedet/network.hpp"
#include "dronedet/nms.hpp"
#include "dronedet/tensor.hpp"
#include "dronedet/weights.hpp"
#include "dronedet/yolo.hpp"

#endif  // DRONEDET_DRONEDET_HPP
