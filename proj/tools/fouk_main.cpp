#include "fouk/cli.hpp"

int main(int argc, char** argv) { return fouk::run(argc, argv); }
