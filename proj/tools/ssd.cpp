#include "ssd/cli.hpp"

int main(int argc, char** argv) { return ssd::cli(argc, argv); }
