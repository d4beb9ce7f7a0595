#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "dpipac/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::optional<std::string> seed;
  if (const char* env = std::getenv("DPIPAC_SEED"); env != nullptr && *env != '\0') seed = env;
  return dpipac::cli::run(args, {std::cout, std::cerr}, seed);
}
