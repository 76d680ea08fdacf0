#include <iostream>

#include "textaug/cli/commands.hpp"

int main(int argc, char** argv) { return textaug::cli::run_cli(argc, argv, std::cout, std::cerr); }
