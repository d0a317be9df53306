#include "facies_qc/cli.hpp"

int main(int argc, char** argv) { return facies_qc::cli::run(argc, argv); }
