#include "cli.hpp"

int main(int argc, char** argv) { return stc::cli_main(argc, argv); }
