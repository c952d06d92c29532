// Copyright 2026 The qnc Authors
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

#include "qnc/adversary.hpp"
#include "qnc/classical_code.hpp"
#include "qnc/density.hpp"
#include "qnc/ffield.hpp"
#include "qnc/protocol.hpp"
#include "qnc/qudit_engine.hpp"
#include "qnc/security.hpp"
#include "qnc/serialize.hpp"
