#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rasgd/parallel.hpp"
#include "rasgd/scenarios.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Communication-efficient distributed SGD experiment harness.\n"
      "Writes one CSV per run; identical (config, seed) pairs give identical bytes."};

  std::string scenario;
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  std::vector<std::string> overrides;
  unsigned threads = 0;

  app.add_option("scenario", scenario,
                 "one of: mse-vs-minibatch, mse-vs-devices, mse-vs-sublength, train, "
                 "quantizer-check")
      ->required();
  auto* config_opt = app.add_option("--config", config_path, "key = value config file");
  auto* seed_opt = app.add_option("--seed", seed, "master seed (u64)");
  auto* out_opt = app.add_option("--out", out_path, "output CSV path");
  app.add_option("--set", overrides, "single-key override, e.g. --set K=200 (repeatable)");
  app.add_option("--threads", threads, "worker threads for Monte Carlo trials (0 = hardware)");

  CLI11_PARSE(app, argc, argv);

  try {
    rasgd::SpecBuilder builder(rasgd::parse_scenario(scenario));
    if (*config_opt) builder.load_file(config_path);
    for (const std::string& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
      }
      builder.assign(kv.substr(0, eq), kv.substr(eq + 1), "--set " + kv);
    }
    if (*seed_opt) builder.set_seed(seed);
    if (*out_opt) builder.set_out(out_path);
    const rasgd::ExperimentSpec spec = builder.resolve();
    if (threads > 0) rasgd::set_thread_count(threads);
    rasgd::run_scenario(spec);
    std::printf("%s -> %s  [%s]\n", scenario.c_str(), spec.out.c_str(),
                spec.canonical_echo().c_str());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
