// Copyright 2026 The chist Authors
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

#pragma once

#include "chist/dynamics.hpp"
#include "chist/errors.hpp"
#include "chist/famspec.hpp"
#include "chist/framework.hpp"
#include "chist/hilbert.hpp"
#include "chist/histories.hpp"
#include "chist/model.hpp"
#include "chist/relativistic.hpp"
#include "chist/report.hpp"
#include "chist/scenarios.hpp"
#include "chist/spacetime.hpp"
#include "chist/version.hpp"
