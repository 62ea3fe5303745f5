#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include "mgt/log.hpp"

int main(int argc, char** argv) {
    mgt::set_warnings_enabled(false);
    doctest::Context context;
    context.applyCommandLine(argc, argv);
    return context.run();
}
