// Command line entry point. Subcommands land here as the library grows.
#include <cstdio>

int main(int argc, char** argv) {
  (void)argc;
  (void)argv;
  std::puts("jkolab: no subcommands wired up yet");
  return 2;
}
