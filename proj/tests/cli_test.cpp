#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"
#include "rasgd/config.hpp"
#include "rasgd/parallel.hpp"
#include "rasgd/scenarios.hpp"

using namespace rasgd;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& content)
      : path("cli_test_" + name + ".tmp") {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

int count_lines(const std::string& s) {
  int n = 0;
  for (const char c : s)
    if (c == '\n') ++n;
  return n;
}

std::string thrown_message(SpecBuilder& b, const std::string& path) {
  try {
    b.load_file(path);
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("scenario names parse both ways") {
  CHECK(parse_scenario("mse-vs-minibatch") == ScenarioKind::MseVsMinibatch);
  CHECK(parse_scenario("mse-vs-devices") == ScenarioKind::MseVsDevices);
  CHECK(parse_scenario("mse-vs-sublength") == ScenarioKind::MseVsSublength);
  CHECK(parse_scenario("train") == ScenarioKind::Train);
  CHECK(parse_scenario("quantizer-check") == ScenarioKind::QuantizerCheck);
  CHECK_THROWS_AS(parse_scenario("frobnicate"), std::invalid_argument);
}

TEST_CASE("per-scenario defaults") {
  const auto mini = SpecBuilder(ScenarioKind::MseVsMinibatch).resolve();
  CHECK(mini.devices == 500);
  CHECK(mini.minibatch == 10);
  CHECK(mini.dim == 80);
  CHECK(mini.sub_dim == 8);
  CHECK(mini.parts == 10);
  CHECK(mini.antennas == 100);
  CHECK(mini.snr_db == 4.0);
  CHECK(mini.v_max == 1.0);
  CHECK(mini.trials == 600);
  CHECK(mini.out == "mse-vs-minibatch.csv");

  const auto devices = SpecBuilder(ScenarioKind::MseVsDevices).resolve();
  CHECK(devices.trials == 800);

  const auto sub = SpecBuilder(ScenarioKind::MseVsSublength).resolve();
  CHECK(sub.devices == 200);
  CHECK(sub.dim == 1024);
  CHECK(sub.sub_dim == 8);
  CHECK(sub.parts == 128);
  CHECK(sub.trials == 300);

  const auto train = SpecBuilder(ScenarioKind::Train).resolve();
  CHECK(train.devices == 200);
  CHECK(train.dim == 32);
  CHECK(train.sub_dim == 4);
  CHECK(train.parts == 8);
  CHECK(train.snr_db == 10.0);
  CHECK(train.v_max == 0.0);  // derived from the data at run time
  CHECK(train.rounds == 2000);

  const auto qc = SpecBuilder(ScenarioKind::QuantizerCheck).resolve();
  CHECK(qc.trials == 1000000);
  CHECK(qc.out == "quantizer-check.csv");
}

TEST_CASE("noise level follows the SNR knob at unit power") {
  const auto spec = SpecBuilder(ScenarioKind::MseVsMinibatch).resolve();
  CHECK(spec.total_p() == 1.0);
  CHECK(spec.n0() == doctest::Approx(0.3981071705534972).epsilon(1e-14));
  CHECK(spec.total_p() / spec.n0() == doctest::Approx(2.51189).epsilon(1e-5));
}

TEST_CASE("config files layer over the defaults") {
  TempFile file("layering",
                "# comment line\n"
                "K = 120   # trailing comment\n"
                "\n"
                "snr_db = 8\n"
                "seed = 99\n"
                "out = custom.csv\n");
  SpecBuilder b(ScenarioKind::MseVsMinibatch);
  b.load_file(file.path);
  const auto spec = b.resolve();
  CHECK(spec.devices == 120);
  CHECK(spec.snr_db == 8.0);
  CHECK(spec.seed == 99);
  CHECK(spec.out == "custom.csv");
  CHECK(spec.dim == 80);  // untouched default
}

TEST_CASE("config diagnostics name the key and the line") {
  {
    TempFile file("unknown", "K = 10\n\nfrobnicate = 3\n");
    SpecBuilder b(ScenarioKind::MseVsMinibatch);
    const auto msg = thrown_message(b, file.path);
    CHECK(msg.find("unknown key 'frobnicate'") != std::string::npos);
    CHECK(msg.find("line 3") != std::string::npos);
  }
  {
    TempFile file("badvalue", "K = ten\n");
    SpecBuilder b(ScenarioKind::MseVsMinibatch);
    const auto msg = thrown_message(b, file.path);
    CHECK(msg.find("invalid value 'ten' for K") != std::string::npos);
    CHECK(msg.find("line 1") != std::string::npos);
  }
  {
    TempFile file("noequals", "K 10\n");
    SpecBuilder b(ScenarioKind::MseVsMinibatch);
    const auto msg = thrown_message(b, file.path);
    CHECK(msg.find("expected key = value") != std::string::npos);
  }
  {
    TempFile file("mismatch", "scenario = train\n");
    SpecBuilder b(ScenarioKind::MseVsMinibatch);
    const auto msg = thrown_message(b, file.path);
    CHECK(msg.find("conflicts with the requested scenario") != std::string::npos);
  }
  {
    SpecBuilder b(ScenarioKind::MseVsMinibatch);
    b.assign("D", "7", "--set D=7");
    CHECK_THROWS_WITH_AS(b.resolve(), "config: D = 7 does not divide L = 80",
                         std::invalid_argument);
  }
}

TEST_CASE("any two of L, L_bar, D pin the third") {
  {
    SpecBuilder b(ScenarioKind::MseVsMinibatch);
    b.assign("L", "1024", "test");
    const auto spec = b.resolve();  // holds the default L_bar = 8
    CHECK(spec.sub_dim == 8);
    CHECK(spec.parts == 128);
  }
  {
    SpecBuilder b(ScenarioKind::MseVsMinibatch);
    b.assign("L_bar", "16", "test");
    const auto spec = b.resolve();  // holds the default L = 80
    CHECK(spec.dim == 80);
    CHECK(spec.parts == 5);
  }
  {
    SpecBuilder b(ScenarioKind::MseVsMinibatch);
    b.assign("D", "20", "test");
    const auto spec = b.resolve();
    CHECK(spec.sub_dim == 4);
  }
  {
    SpecBuilder b(ScenarioKind::MseVsMinibatch);
    b.assign("L_bar", "32", "test");
    b.assign("D", "4", "test");
    const auto spec = b.resolve();
    CHECK(spec.dim == 128);
  }
  {
    SpecBuilder b(ScenarioKind::MseVsMinibatch);
    b.assign("L", "64", "test");
    b.assign("L_bar", "8", "test");
    b.assign("D", "4", "test");
    CHECK_THROWS_AS(b.resolve(), std::invalid_argument);  // 8 * 4 != 64
  }
}

TEST_CASE("range checks reject inconsistent specs") {
  {
    SpecBuilder b(ScenarioKind::MseVsMinibatch);
    b.assign("K_bar", "600", "test");
    CHECK_THROWS_AS(b.resolve(), std::invalid_argument);
  }
  {
    SpecBuilder b(ScenarioKind::MseVsMinibatch);
    b.assign("V_max", "0", "test");
    CHECK_THROWS_AS(b.resolve(), std::invalid_argument);
  }
  {
    SpecBuilder b(ScenarioKind::Train);
    b.assign("V_max", "0", "test");
    CHECK_NOTHROW(b.resolve());  // the trainer derives its own bound
  }
}

TEST_CASE("the canonical echo and its hash react to every parameter") {
  const auto base = SpecBuilder(ScenarioKind::MseVsMinibatch).resolve();
  CHECK(base.canonical_echo().find("K=500") != std::string::npos);
  CHECK(base.canonical_echo().find("snr_db=4") != std::string::npos);
  CHECK(base.param_hash() == SpecBuilder(ScenarioKind::MseVsMinibatch).resolve().param_hash());

  SpecBuilder seeded(ScenarioKind::MseVsMinibatch);
  seeded.set_seed(2);
  CHECK(seeded.resolve().param_hash() != base.param_hash());

  SpecBuilder snr(ScenarioKind::MseVsMinibatch);
  snr.assign("snr_db", "5", "test");
  CHECK(snr.resolve().param_hash() != base.param_hash());

  // the output path is presentation, not substance
  SpecBuilder outp(ScenarioKind::MseVsMinibatch);
  outp.set_out("elsewhere.csv");
  CHECK(outp.resolve().param_hash() == base.param_hash());
}

TEST_CASE("quantizer-check renders deterministically with the expected shape") {
  SpecBuilder b(ScenarioKind::QuantizerCheck);
  b.assign("trials", "2000", "test");
  b.set_seed(5);
  const auto spec = b.resolve();
  const auto csv = scenario_csv(spec);
  CHECK(csv == scenario_csv(spec));
  CHECK(count_lines(csv) == 3);
  CHECK(csv.rfind("check,L_bar,draws,observed,expected,tolerance,pass,seed,param_hash\n", 0) == 0);
  CHECK(csv.find("component_bias_max") != std::string::npos);
  CHECK(csv.find("\nmse,") != std::string::npos);
  CHECK(csv.find(",5,") != std::string::npos);  // seed column
}

TEST_CASE("train renders one block per arm") {
  SpecBuilder b(ScenarioKind::Train);
  b.assign("T", "3", "test");
  b.assign("K", "20", "test");
  b.assign("L", "8", "test");
  b.assign("N", "4", "test");
  const auto spec = b.resolve();
  const auto csv = scenario_csv(spec);
  CHECK(csv == scenario_csv(spec));
  CHECK(count_lines(csv) == 1 + 2 * 3);
  CHECK(csv.rfind("round,scheme,cost,cumulative_symbols,seed,param_hash\n", 0) == 0);
  CHECK(csv.find("raus_noncoherent") != std::string::npos);
  CHECK(csv.find("yang") != std::string::npos);
}

TEST_CASE("sweep output is byte-identical across worker counts") {
  SpecBuilder b(ScenarioKind::MseVsMinibatch);
  b.assign("trials", "50", "test");
  b.assign("K", "60", "test");  // the sweep schedules up to K_bar = 50
  b.assign("K_bar", "5", "test");
  b.assign("L", "8", "test");
  b.assign("D", "2", "test");
  b.assign("N", "5", "test");
  const auto spec = b.resolve();

  set_thread_count(1);
  const auto serial = scenario_csv(spec);
  set_thread_count(3);
  const auto threaded = scenario_csv(spec);
  set_thread_count(0);
  CHECK(serial == threaded);
  CHECK(count_lines(serial) == 1 + 2 * 10);
  CHECK(serial.rfind("K_bar,scheme,mse_empirical,", 0) == 0);

  // every data row ends with the same 16-digit parameter hash
  std::string tail;
  std::size_t pos = serial.find('\n') + 1;
  int rows = 0;
  while (pos < serial.size()) {
    const auto end = serial.find('\n', pos);
    const std::string line = serial.substr(pos, end - pos);
    const auto comma = line.rfind(',');
    const std::string hash = line.substr(comma + 1);
    CHECK(hash.size() == 16);
    if (tail.empty()) tail = hash;
    CHECK(hash == tail);
    ++rows;
    pos = end + 1;
  }
  CHECK(rows == 20);
}

TEST_CASE("sublength sweep rejects a non-divisible dimension") {
  SpecBuilder b(ScenarioKind::MseVsSublength);
  b.assign("L", "96", "test");  // 64 does not divide 96
  b.assign("L_bar", "8", "test");
  b.assign("trials", "2", "test");
  b.assign("K", "10", "test");
  b.assign("N", "2", "test");
  const auto spec = b.resolve();
  try {
    scenario_csv(spec);
    FAIL("expected a divisibility complaint");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("L = 96") != std::string::npos);
  }
}
