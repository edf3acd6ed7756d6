#include <cstdio>

int main() {
  std::puts("hrs: command-line interface not wired up yet");
  return 2;
}
