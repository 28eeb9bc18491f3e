// Copyright 2026 The BoxBoost Authors. All Rights Reserved.
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

// boxboost command-line front end.
//
//   boxboost synth    --out DIR
//   boxboost pretrain --manifest M --out DIR [--arch A|B]
//   boxboost predict  --checkpoint C --manifest M --out DIR [--split train_box]
//   boxboost ffs      --manifest M --predictions DIR --out DIR
//   boxboost boost    --manifest M --ffs DIR --out DIR [--no-ic]
//   boxboost eval     --checkpoint C --manifest M --out DIR
//   boxboost curve    --checkpoint C --manifest M --out FILE.csv
//   boxboost ablate   --out DIR [--manifest M] [--seeds 1,2,3]
//
// Exit codes: 0 ok, 2 usage, 3 config, 4 data/IO, 5 numerical. Failures
// print a single JSON object on stderr.

#ifndef BOXBOOST_TOOLS_CLI_HPP_
#define BOXBOOST_TOOLS_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace boxboost::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitData = 4;
inline constexpr int kExitNumerical = 5;

/// args[0] is the program name. BOXBOOST_SEED is read from the environment
/// when --seed is absent.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace boxboost::cli

#endif  // BOXBOOST_TOOLS_CLI_HPP_
