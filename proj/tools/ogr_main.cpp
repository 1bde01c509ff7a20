#include "ogr/cli.hpp"

int main(int argc, char** argv) { return ogr::run_cli(argc, argv); }
