#include <iostream>

#include "synmpst/cli.hpp"

int main(int argc, char ** argv)
{
  return synmpst::run_cli(argc, argv, std::cout, std::cerr);
}
