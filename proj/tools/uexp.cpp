#include <uexp/cli.hpp>

#include <iostream>

int main(int argc, char ** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    auto r = uexp::cli::run(args);
    std::cout << r.payload;
    std::cerr << r.diagnostics;
    return r.exit_code;
}
