// Copyright 2026 The medeq Authors
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

#include "medeq/augment.hpp"
#include "medeq/frontier.hpp"
#include "medeq/game.hpp"
#include "medeq/game_io.hpp"
#include "medeq/generators.hpp"
#include "medeq/notion.hpp"
#include "medeq/oracle.hpp"
#include "medeq/program.hpp"
#include "medeq/sequence_form.hpp"
#include "medeq/simplex.hpp"
