#include "lvar/io.hpp"

int main(int argc, char** argv) { return lvar::cli_main(argc, argv); }
