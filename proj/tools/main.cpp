#include <dgavg/run.hpp>

#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty()) {
    std::cerr << dgavg::usage();
    return dgavg::kExitConfig;
  }
  return dgavg::run_command_line(args, std::cout, std::cerr);
}
