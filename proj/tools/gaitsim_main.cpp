#include "gaitsim/run_config.hpp"

int main(int argc, char** argv) { return gaitsim::run_cli(argc, argv); }
