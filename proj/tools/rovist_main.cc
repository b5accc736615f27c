#include "rovist/cli.h"

int main(int argc, char** argv) { return rovist::cli::RunMain(argc, argv); }
