#include <cstdio>
int main() { std::puts("collar: placeholder"); return 0; }
