#include <cstdio>

int main() {
    std::puts("herzlab: CLI under construction");
    return 0;
}
