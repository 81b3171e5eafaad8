#include "hgr/cli.hpp"

int main(int argc, char** argv) { return hgr::cli::run(argc, argv); }
