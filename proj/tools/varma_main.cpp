#include "varma/cli.hpp"

int main(int argc, char** argv) {
  return varma::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
