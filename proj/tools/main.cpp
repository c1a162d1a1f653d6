#include "cli.hpp"

int main(int argc, char** argv) {
  return volboot::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
