#include <string>
#include <vector>

#include "brthcli/run.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return brth::cli::run_main(args);
}
