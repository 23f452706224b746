#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cuboidkit/scene.hpp"

namespace cuboidkit::cli {

struct Globals {
  std::uint64_t seed = 0;
  std::string vocab_path;
  std::optional<ClassVocabulary> loaded;

  const ClassVocabulary& vocab();
};

struct Command {
  CLI::App* app = nullptr;
  std::function<int()> run;
};

/// Registers every subcommand on `app`; the caller runs whichever parsed.
std::vector<Command> register_commands(CLI::App& app, Globals& globals);

}  // namespace cuboidkit::cli
