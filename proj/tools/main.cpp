#include "cli.hpp"

int main(int argc, char** argv) { return tfcert::cli::run_cli(argc, argv, std::cout, std::cerr); }
