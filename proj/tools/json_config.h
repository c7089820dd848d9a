// Copyright 2026 The sfoa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SFOA_TOOLS_JSON_CONFIG_H_
#define SFOA_TOOLS_JSON_CONFIG_H_

#include <istream>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace sfoa::cli {

// JSON config files for CLI11. Top-level keys are option long names; an
// object value names a subcommand and holds that subcommand's options:
//
//   {"seed": 7, "scloss": {"eps": 0.0}, "vq": {"train": {"size": 8}}}
//
// Values from the command line always win over values from the file.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool write_description,
                        std::string prefix) const override;
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;
};

}  // namespace sfoa::cli

#endif  // SFOA_TOOLS_JSON_CONFIG_H_
