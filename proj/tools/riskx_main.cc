#include <iostream>
#include <string>
#include <vector>

#include "riskx/cli/cli.h"

int main(int argc, char** argv) {
  return riskx::cli::Run(std::vector<std::string>(argv + 1, argv + argc),
                         std::cout, std::cerr);
}
