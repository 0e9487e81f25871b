#include "dbrd/cli.hpp"

int main(int argc, char** argv) { return dbrd::run_cli(argc, argv); }
