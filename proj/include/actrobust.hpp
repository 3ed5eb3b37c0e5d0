// Copyright 2026 The actrobust Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Umbrella header.

#pragma once

#include "actrobust/dpg_grad.hpp"
#include "actrobust/errors.hpp"
#include "actrobust/matrix_game.hpp"
#include "actrobust/mdp_model.hpp"
#include "actrobust/mixture_game.hpp"
#include "actrobust/model_io.hpp"
#include "actrobust/robust_eval.hpp"
#include "actrobust/solvers.hpp"
