#include "rsmalink/cli.hpp"

int main(int argc, char** argv) { return rsmalink::cli_main(argc, argv); }
