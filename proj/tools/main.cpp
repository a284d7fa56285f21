#include <string>
#include <vector>

#include "moprox/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return moprox::run_cli(args);
}
