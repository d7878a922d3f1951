#include "ncmixed/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
  return ncmixed::cli_main(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
