#include "cli_app.hpp"

int main(int argc, char** argv) { return lppl::cli::run(argc, argv); }
