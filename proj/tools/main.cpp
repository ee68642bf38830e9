#include <cstdio>

int main() {
    std::puts("cpmm: subcommands not wired up yet");
    return 0;
}
