#include <cstdio>

#include "sskel/geom.hpp"
#include "sskel/polygon.hpp"

int main() {
    std::puts("sskel: command-line interface under construction");
    return 0;
}
