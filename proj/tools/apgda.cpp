#include <commands.hpp>

int main(int argc, char** argv)
{
    return apgda::cli::dispatch(argc, argv);
}
