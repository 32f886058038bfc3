#include "anchorlife/cli.hpp"

int main(int argc, char** argv)
{
    return anchorlife::run_cli(argc, argv);
}
