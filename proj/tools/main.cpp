#include "harmrep/cli.hpp"

int main(int argc, char** argv) { return harmrep::dispatch(argc, argv); }
