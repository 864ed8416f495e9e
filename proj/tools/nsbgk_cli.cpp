#include "nsbgk/cli.hpp"

int main(int argc, char** argv) { return nsbgk::cli::dispatch(argc, argv); }
