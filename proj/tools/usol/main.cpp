#include "usol/harness.hpp"

int main(int argc, char** argv) { return usol::harness::cli_main(argc, argv); }
