#include "rasgd/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace rasgd {

namespace {

constexpr const char* kNames[] = {
    "mse-vs-minibatch", "mse-vs-devices", "mse-vs-sublength", "train", "quantizer-check",
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value,
                            const std::string& where) {
  throw std::invalid_argument("config: invalid value '" + std::string(value) + "' for " +
                              std::string(key) + " (" + where + ")");
}

template <typename T>
T parse_number(std::string_view key, std::string_view value, const std::string& where) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [p, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || p != last) bad_value(key, value, where);
  return out;
}

void append_number(std::string& s, double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  s.append(buf, p);
}

void append_number(std::string& s, std::uint64_t v) {
  char buf[24];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  s.append(buf, p);
}

void append_number(std::string& s, long v) {
  char buf[24];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  s.append(buf, p);
}

void append_number(std::string& s, int v) {
  char buf[16];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  s.append(buf, p);
}

}  // namespace

const char* scenario_name(ScenarioKind kind) {
  return kNames[static_cast<int>(kind)];
}

ScenarioKind parse_scenario(std::string_view name) {
  for (int i = 0; i < 5; ++i) {
    if (name == kNames[i]) return static_cast<ScenarioKind>(i);
  }
  std::string msg = "unknown scenario '" + std::string(name) + "' (known:";
  for (const char* n : kNames) {
    msg += ' ';
    msg += n;
  }
  msg += ')';
  throw std::invalid_argument(msg);
}

double ExperimentSpec::n0() const { return std::pow(10.0, -snr_db / 10.0); }

std::string ExperimentSpec::canonical_echo() const {
  std::string s;
  s += "scenario=";
  s += scenario_name(scenario);
  s += ",seed=";
  append_number(s, seed);
  s += ",K=";
  append_number(s, devices);
  s += ",K_bar=";
  append_number(s, minibatch);
  s += ",L=";
  append_number(s, dim);
  s += ",L_bar=";
  append_number(s, sub_dim);
  s += ",D=";
  append_number(s, parts);
  s += ",N=";
  append_number(s, antennas);
  s += ",snr_db=";
  append_number(s, snr_db);
  s += ",V_max=";
  append_number(s, v_max);
  s += ",mu=";
  append_number(s, mu);
  s += ",lambda=";
  append_number(s, lambda);
  s += ",T=";
  append_number(s, rounds);
  s += ",trials=";
  append_number(s, trials);
  return s;
}

std::uint64_t ExperimentSpec::param_hash() const {
  const std::string echo = canonical_echo();
  std::uint64_t h = 14695981039346656037ull;
  for (const char c : echo) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

SpecBuilder::SpecBuilder(ScenarioKind kind) {
  spec_.scenario = kind;
  spec_.out = std::string(scenario_name(kind)) + ".csv";
  switch (kind) {
    case ScenarioKind::MseVsMinibatch:
      spec_.trials = 600;
      break;
    case ScenarioKind::MseVsDevices:
      spec_.trials = 800;
      break;
    case ScenarioKind::MseVsSublength:
      spec_.trials = 300;
      spec_.devices = 200;
      spec_.dim = 1024;
      spec_.sub_dim = 8;
      spec_.parts = 128;
      break;
    case ScenarioKind::Train:
      spec_.devices = 200;
      spec_.dim = 32;
      spec_.sub_dim = 4;
      spec_.parts = 8;
      spec_.snr_db = 10.0;
      spec_.v_max = 0.0;
      spec_.trials = 1;
      break;
    case ScenarioKind::QuantizerCheck:
      spec_.trials = 1000000;
      break;
  }
}

void SpecBuilder::assign(std::string_view key, std::string_view value, const std::string& where) {
  key = trim(key);
  value = trim(value);
  if (key == "scenario") {
    const ScenarioKind named = parse_scenario(value);
    if (named != spec_.scenario) {
      throw std::invalid_argument("config: scenario '" + std::string(value) +
                                  "' conflicts with the requested scenario '" +
                                  scenario_name(spec_.scenario) + "' (" + where + ")");
    }
  } else if (key == "seed") {
    spec_.seed = parse_number<std::uint64_t>(key, value, where);
  } else if (key == "K") {
    spec_.devices = parse_number<int>(key, value, where);
  } else if (key == "K_bar") {
    spec_.minibatch = parse_number<int>(key, value, where);
  } else if (key == "L") {
    spec_.dim = parse_number<int>(key, value, where);
    set_dim_ = true;
  } else if (key == "L_bar") {
    spec_.sub_dim = parse_number<int>(key, value, where);
    set_sub_dim_ = true;
  } else if (key == "D") {
    spec_.parts = parse_number<int>(key, value, where);
    set_parts_ = true;
  } else if (key == "N") {
    spec_.antennas = parse_number<int>(key, value, where);
  } else if (key == "snr_db") {
    spec_.snr_db = parse_number<double>(key, value, where);
  } else if (key == "V_max") {
    spec_.v_max = parse_number<double>(key, value, where);
  } else if (key == "mu") {
    spec_.mu = parse_number<double>(key, value, where);
  } else if (key == "lambda") {
    spec_.lambda = parse_number<double>(key, value, where);
  } else if (key == "T") {
    spec_.rounds = parse_number<int>(key, value, where);
  } else if (key == "trials") {
    spec_.trials = parse_number<long>(key, value, where);
  } else if (key == "out") {
    spec_.out = std::string(value);
  } else {
    throw std::invalid_argument("config: unknown key '" + std::string(key) + "' (" + where + ")");
  }
}

void SpecBuilder::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot read file '" + path + "'");
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view body(line);
    if (const auto hash = body.find('#'); hash != std::string_view::npos) {
      body = body.substr(0, hash);
    }
    body = trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = "line " + std::to_string(number) + " of " + path;
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config: expected key = value (" + where + ")");
    }
    assign(body.substr(0, eq), body.substr(eq + 1), where);
  }
}

void SpecBuilder::set_seed(std::uint64_t seed) { spec_.seed = seed; }

void SpecBuilder::set_out(std::string path) { spec_.out = std::move(path); }

ExperimentSpec SpecBuilder::resolve() const {
  ExperimentSpec spec = spec_;
  // Any two of L, L_bar, D pin the third; explicit settings win over the
  // scenario defaults they displace.
  if (set_dim_ && set_sub_dim_ && set_parts_) {
    if (spec.dim != spec.sub_dim * spec.parts) {
      throw std::invalid_argument("config: L = " + std::to_string(spec.dim) +
                                  " but L_bar * D = " + std::to_string(spec.sub_dim * spec.parts) +
                                  " (set L, L_bar, D so that L = L_bar * D)");
    }
  } else if (set_sub_dim_ && set_parts_) {
    spec.dim = spec.sub_dim * spec.parts;
  } else if (set_dim_ && set_parts_) {
    if (spec.parts < 1 || spec.dim % spec.parts != 0) {
      throw std::invalid_argument("config: D = " + std::to_string(spec.parts) +
                                  " does not divide L = " + std::to_string(spec.dim));
    }
    spec.sub_dim = spec.dim / spec.parts;
  } else if (set_parts_) {
    if (spec.parts < 1 || spec.dim % spec.parts != 0) {
      throw std::invalid_argument("config: D = " + std::to_string(spec.parts) +
                                  " does not divide L = " + std::to_string(spec.dim));
    }
    spec.sub_dim = spec.dim / spec.parts;
  } else {
    // L alone, L_bar alone, or nothing: hold the sub-length and derive D.
    if (spec.sub_dim < 1 || spec.dim % spec.sub_dim != 0) {
      throw std::invalid_argument("config: L_bar = " + std::to_string(spec.sub_dim) +
                                  " does not divide L = " + std::to_string(spec.dim));
    }
    spec.parts = spec.dim / spec.sub_dim;
  }
  if (spec.dim < 1) throw std::invalid_argument("config: L must be >= 1");
  if (spec.devices < 1) throw std::invalid_argument("config: K must be >= 1");
  if (spec.minibatch < 1 || spec.minibatch > spec.devices) {
    throw std::invalid_argument("config: K_bar = " + std::to_string(spec.minibatch) +
                                " must satisfy 1 <= K_bar <= K = " + std::to_string(spec.devices));
  }
  if (spec.antennas < 1) throw std::invalid_argument("config: N must be >= 1");
  if (spec.rounds < 1) throw std::invalid_argument("config: T must be >= 1");
  if (spec.trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (spec.mu <= 0.0) throw std::invalid_argument("config: mu must be positive");
  if (spec.lambda < 0.0) throw std::invalid_argument("config: lambda must be >= 0");
  if (spec.scenario != ScenarioKind::Train && spec.v_max <= 0.0) {
    throw std::invalid_argument("config: V_max must be positive");
  }
  if (spec.out.empty()) throw std::invalid_argument("config: out must not be empty");
  return spec;
}

}  // namespace rasgd
