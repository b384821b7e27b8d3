#include "mvtc/cli.hpp"

int main(int argc, char** argv) { return mvtc::cli::run(argc, argv); }
