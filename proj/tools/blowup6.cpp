#include "blowup6/cli.hpp"

int main(int argc, char** argv) { return blowup::cli::run(argc, argv); }
