#include "wavesearch/cli/commands.hpp"

int main(int argc, char** argv) { return wavesearch::cli::main_entry(argc, argv); }
