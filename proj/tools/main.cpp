#include "genflow/report.hpp"

int main(int argc, char** argv) { return genflow::run_cli(argc, argv); }
