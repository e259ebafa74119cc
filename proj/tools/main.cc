#include "cli.h"

int main(int argc, char** argv) { return kfuse::cli::run(argc, argv); }
