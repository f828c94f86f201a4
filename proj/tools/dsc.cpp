#include "dsc/cli.hpp"

int main(int argc, char** argv) { return dsc::cli_main(argc, argv); }
