#include "commands.hpp"

int main(int argc, char** argv) { return agcas::cli::run(argc, argv); }
