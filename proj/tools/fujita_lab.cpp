#include "fujita/cli.hpp"

int main(int argc, char** argv) { return fujita::run(argc, argv); }
