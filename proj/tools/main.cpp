#include "chartag/cli.hpp"

int main(int argc, char** argv) { return chartag::run(argc, argv); }
