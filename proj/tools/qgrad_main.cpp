#include <vector>

#include "qgrad/experiment.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return qgrad::run_command(args);
}
