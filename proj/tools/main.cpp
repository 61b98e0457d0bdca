#include <iostream>
int main() { std::cout << "kreinsl: work in progress\n"; return 0; }
