#include "cramsnn/cli.hpp"

int main(int argc, char** argv) { return cramsnn::cli_main(argc, argv); }
