// Copyright 2026 The Authors.
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

#ifndef PSEUDOSYNC_SRC_PRESETS_H_
#define PSEUDOSYNC_SRC_PRESETS_H_

#include <cstddef>

namespace pseudosync::internal {

struct Preset {
  const char* name;
  const char* text;
};

extern const Preset kPresets[];
extern const size_t kPresetCount;

}  // namespace pseudosync::internal

#endif  // PSEUDOSYNC_SRC_PRESETS_H_
