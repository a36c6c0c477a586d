#include <iostream>

#include <CLI11.hpp>

#include "synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Writes the synthetic corpus bundle", "make_synthetic"};
  std::string out = "data/synthetic";
  bechdel::synth::StreamOptions options;
  app.add_option("--out", out, "output directory")->capture_default_str();
  app.add_option("--seed", options.seed, "random seed")->capture_default_str();
  app.add_option("--messages", options.target_messages, "approximate message count")->capture_default_str();
  app.add_option("--users", options.users, "number of users")->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  try {
    bechdel::synth::write_bundle(out, options);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
