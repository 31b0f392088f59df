#include <cstdlib>
#include <iostream>

#include "hac_cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::optional<std::string> env_seed;
  if (const char* s = std::getenv("HAC_SEED")) env_seed = s;
  return hac::cli::run_cli(std::move(args), std::cin, std::cout, std::cerr, env_seed);
}
