#include <iostream>
#include <string>
#include <vector>

#include "camext/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return camext::RunCli(args, std::cout, std::cerr);
}
