#include <iostream>

#include "cascadex/cli/app.hpp"

int main(int argc, char** argv) { return cascadex::cli::run(argc, argv, std::cout, std::cerr); }
