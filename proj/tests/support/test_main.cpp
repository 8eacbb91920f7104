#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include "starkdisk/eigensolver.hpp"

int main(int argc, char** argv) {
  // Every solve in the test binaries verifies its residual and orthonormality.
  starkdisk::set_solution_checks(true);
  doctest::Context context(argc, argv);
  return context.run();
}
