#include "multicup/cli.hpp"

int main(int argc, char** argv) { return multicup::run_cli(argc, argv); }
