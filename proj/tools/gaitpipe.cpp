#include "gaitpipe/commands.hpp"

int main(int argc, char** argv) { return gaitpipe::run_cli(argc, argv); }
