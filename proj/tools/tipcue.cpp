#include "tipcue/cli.hpp"

int main(int argc, char** argv) { return tipcue::run_cli(argc, argv); }
