#include "fptc/cli.hpp"

int main(int argc, char** argv) { return fptc::cli::dispatch(argc, argv); }
