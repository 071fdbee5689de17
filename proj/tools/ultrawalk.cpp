#include "ultrawalk/cli.hpp"

int main(int argc, char** argv) { return ultrawalk::cli::run(argc, argv); }
