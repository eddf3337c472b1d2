#include <iostream>

int main() {
  std::cout << "musyn placeholder\n";
  return 0;
}
