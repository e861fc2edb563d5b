#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace rasgd {

enum class ScenarioKind {
  MseVsMinibatch,
  MseVsDevices,
  MseVsSublength,
  Train,
  QuantizerCheck,
};

const char* scenario_name(ScenarioKind kind);

/// Throws std::invalid_argument listing the known names on a miss.
ScenarioKind parse_scenario(std::string_view name);

/// Fully resolved description of one harness run.  P is fixed at 1, so the
/// SNR knob alone sets the noise level: N0 = 10^(-snr_db / 10).
struct ExperimentSpec {
  ScenarioKind scenario = ScenarioKind::MseVsMinibatch;
  std::uint64_t seed = 1;
  int devices = 500;      // K
  int minibatch = 10;     // K_bar
  int dim = 80;           // L
  int sub_dim = 8;        // L_bar
  int parts = 10;         // D
  int antennas = 100;     // N
  double snr_db = 4.0;
  double v_max = 1.0;     // <= 0: derive from the data (train only)
  double mu = 0.1;
  double lambda = 1e-3;
  int rounds = 2000;      // T
  long trials = 600;
  std::string out;

  double total_p() const { return 1.0; }
  double n0() const;

  /// Canonical key=value listing of every parameter that shapes the numbers.
  std::string canonical_echo() const;
  /// FNV-1a hash of canonical_echo, stamped on every output row.
  std::uint64_t param_hash() const;
};

/* Layered spec assembly: scenario defaults first, then a config file, then
 * individual overrides, each layer winning over the previous.  Cross-field
 * consistency (L = L_bar * D, K_bar <= K) is checked once at resolve(). */
class SpecBuilder {
 public:
  explicit SpecBuilder(ScenarioKind kind);

  /// `where` names the origin for diagnostics ("line 4", "--set").
  void assign(std::string_view key, std::string_view value, const std::string& where);

  /// Line-oriented `key = value`; '#' starts a comment; blanks ignored.
  void load_file(const std::string& path);

  void set_seed(std::uint64_t seed);
  void set_out(std::string path);

  ExperimentSpec resolve() const;

 private:
  ExperimentSpec spec_;
  bool set_dim_ = false;
  bool set_sub_dim_ = false;
  bool set_parts_ = false;
};

}  // namespace rasgd
