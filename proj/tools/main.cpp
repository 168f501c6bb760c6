#include "trimer/cli.hpp"

int main(int argc, char** argv) { return trimer::cli::run(argc, argv); }
