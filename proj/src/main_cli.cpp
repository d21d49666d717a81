#include "rankone/commands.hpp"

int main(int argc, char** argv) { return rankone::cli_main(argc, argv); }
