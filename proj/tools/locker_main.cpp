#include "locker/cli.hpp"

int main(int argc, char** argv) { return locker::run_cli(argc, argv); }
