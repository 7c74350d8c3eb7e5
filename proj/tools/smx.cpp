#include "smx/cli.hpp"

int main(int argc, char** argv)
{
    return smx::cli::main(argc, argv);
}
