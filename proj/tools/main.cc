#include <iostream>
#include <string>
#include <vector>

#include "cli.h"
#include "opms/allocator.h"

int main(int argc, char** argv) {
  opms::configure_allocator();
  std::vector<std::string> args(argv + 1, argv + argc);
  return opms::cli::run_command(args, std::cout, std::cerr);
}
