// Command-line driver; subcommands are wired up in stages.
#include <cstdio>

int main() {
  std::puts("pdlab: experiment driver (subcommands pending)");
  return 0;
}
