#include "commands.hpp"

int main(int argc, char** argv) { return axnn::cli::run(argc, argv); }
