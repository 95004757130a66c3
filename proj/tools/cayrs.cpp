#include "cayrs/cli.hpp"

int main(int argc, char** argv) { return cayrs::runCli(argc, argv); }
