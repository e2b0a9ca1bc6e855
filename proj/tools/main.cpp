#include <iostream>

#include "sphkep/cli.hpp"

int main(int argc, char** argv)
{
    return sphkep::cli::run(argc, argv, std::cout, std::cerr);
}
