#include "orhc/cli.hpp"

int main(int argc, char** argv) { return orhc::run(argc, argv); }
