#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace cuboidkit::cli {

/// JSON reader for CLI11's --config. Top-level scalars configure global
/// options; an object keyed by a subcommand name configures that subcommand:
///   {"seed": 3, "abstract": {"n": 32, "tau-max": 1.4}}
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool write_description,
                        std::string prefix) const override;
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;
};

}  // namespace cuboidkit::cli
