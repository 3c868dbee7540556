#include <cstdio>

int main() {
    std::puts("gerbecalc: command-line interface under construction");
    return 0;
}
