#include "coco/cli.hpp"

int main(int argc, char** argv) { return coco::cli::run(argc, argv); }
