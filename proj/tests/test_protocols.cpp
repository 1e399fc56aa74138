// Protocol state machines over the optical chain: sifting soundness, the
// dark-count error floor, retransmission behavior and the XOR recovery rule.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "qmsn/protocols.hpp"

using namespace qmsn;

namespace {

ProtocolConfig ideal_config(Service service) {
  ProtocolConfig cfg;
  cfg.service = service;
  cfg.mu = 0.1;
  cfg.channel = {0.0, 0.2};  // zero-length fiber: T = 1
  cfg.detectors = DetectorSet(DetectorParams{1.0, 0.0});
  cfg.monitor = {5.0, 10000, false};
  return cfg;
}

ProtocolConfig realistic_config(Service service) {
  ProtocolConfig cfg;
  cfg.service = service;
  cfg.mu = 0.1;
  cfg.channel = {1.0, 0.2};
  cfg.detectors = DetectorSet(DetectorParams{0.1, 1e-5});
  cfg.monitor = {5.0, 10000, false};
  return cfg;
}

/// Closed-form two-port click model of the honest link.
struct TwoPortModel {
  double correct;   // click probability at the encoded port
  double wrong;     // click probability at the opposite port
  double detect_one() const {
    return correct * (1.0 - wrong) + wrong * (1.0 - correct);
  }
  double qber() const {
    return wrong * (1.0 - correct) / detect_one();
  }
};

TwoPortModel honest_two_port(const ProtocolConfig& cfg) {
  const double m = cfg.expected_arrival_mean();
  const DetectorParams& det = cfg.detectors.port0;
  TwoPortModel model;
  model.correct =
      1.0 - (1.0 - det.dark_count_prob) * std::exp(-det.efficiency * m);
  model.wrong = det.dark_count_prob;
  return model;
}

/// Brute-force oracle for the retransmission process: per-slot detection is
/// a Bernoulli(p) trial, undetected slots repeat next round.
double mean_rounds_oracle(std::uint64_t message_len, double p,
                          std::uint64_t max_rounds, std::uint64_t reps,
                          Rng& rng) {
  double total = 0.0;
  for (std::uint64_t rep = 0; rep < reps; ++rep) {
    std::uint64_t pending = message_len;
    std::uint64_t rounds = 0;
    while (pending > 0 && rounds < max_rounds) {
      ++rounds;
      std::uint64_t still = 0;
      for (std::uint64_t s = 0; s < pending; ++s)
        if (!rng.bernoulli(p)) ++still;
      pending = still;
    }
    total += static_cast<double>(rounds);
  }
  return total / static_cast<double>(reps);
}

std::string xor_strings(const std::vector<std::string>& secrets) {
  std::string out(secrets.front().size(), '0');
  for (std::size_t i = 0; i < out.size(); ++i) {
    int x = 0;
    for (const auto& s : secrets) x ^= s[i] == '1' ? 1 : 0;
    out[i] = x ? '1' : '0';
  }
  return out;
}

std::string random_bits(std::size_t n, Rng& rng) {
  std::string s(n, '0');
  for (auto& c : s) c = rng.bernoulli(0.5) ? '1' : '0';
  return s;
}

}  // namespace

TEST_CASE("ideal qkd sifts an error-free key") {
  ProtocolConfig cfg = ideal_config(Service::qkd);
  cfg.n_pulses = 20000;
  Rng rng(100);
  const auto t = run_qkd(cfg, rng);

  CHECK(t.qber == 0.0);
  CHECK(t.sent_bits == t.recovered_bits);
  CHECK(t.detected_slots.size() == t.recovered_bits.size());
  CHECK(t.recovered_bits.size() > 0);
  CHECK(t.monitor_stats.gates == cfg.n_pulses);
  CHECK_FALSE(t.monitor_alarm);
}

TEST_CASE("qkd with realistic defaults sits at the dark-count error floor") {
  ProtocolConfig cfg = realistic_config(Service::qkd);
  cfg.n_pulses = 1000000;
  Rng rng(101);
  const auto t = run_qkd(cfg, rng);

  const auto model = honest_two_port(cfg);
  const double oracle = model.qber();
  const double n = static_cast<double>(t.recovered_bits.size());
  REQUIRE(n > 100.0);
  CHECK(std::abs(t.qber - oracle) <
        3.0 * std::sqrt(oracle * (1.0 - oracle) / n));

  // detection rate agrees with the one-click model too
  const double detected_rate = n / static_cast<double>(cfg.n_pulses - 1);
  const double p = model.detect_one();
  CHECK(std::abs(detected_rate - p) <
        3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(cfg.n_pulses - 1)));
  CHECK_FALSE(t.monitor_alarm);
}

TEST_CASE("intercept-resend raises the error rate and trips the monitor") {
  ProtocolConfig cfg = ideal_config(Service::qkd);
  cfg.mu = 0.15;
  cfg.detectors = DetectorSet(DetectorParams{1.0, 1e-5});
  cfg.n_pulses = 1000000;
  cfg.attack = AttackKind::intercept_resend(0.5);
  Rng rng(102);
  const auto t = run_qkd(cfg, rng);

  const double honest = honest_two_port(cfg).qber();
  const double n = static_cast<double>(t.recovered_bits.size());
  REQUIRE(n > 1000.0);
  CHECK(t.qber - honest > 3.0 * std::sqrt(t.qber * (1.0 - t.qber) / n));
  CHECK(t.monitor_alarm);
  CHECK(t.monitor_verdict.z_score > 5.0);
}

TEST_CASE("alice's key is a pure function of the announced clicks") {
  ProtocolConfig cfg = realistic_config(Service::qkd);
  cfg.n_pulses = 50000;
  Rng rng(103);
  const auto t = run_qkd(cfg, rng);

  REQUIRE(t.log.size() == 1);
  const auto& report = t.log.front();
  CHECK(report.kind == ClassicalMessage::Kind::detection_report);
  CHECK(report.positions == t.detected_slots);
  REQUIRE(report.ports.size() == t.recovered_bits.size());
  std::string from_log;
  for (std::uint8_t port : report.ports) from_log.push_back(port ? '1' : '0');
  CHECK(from_log == t.recovered_bits);
}

TEST_CASE("ideal qsdc delivers the message in one round") {
  ProtocolConfig cfg = ideal_config(Service::qsdc);
  cfg.mu = 5.0;  // bright pulses: a click on every slot
  cfg.monitor.min_gates = 10;
  Rng rng(104);
  const auto t = run_qsdc(cfg, "10110", rng);

  CHECK(t.recovered_bits == "10110");
  CHECK(t.rounds_used == 1);
  CHECK(t.delivery_complete);
  CHECK(t.qber == 0.0);
  CHECK(t.detected_slots == std::vector<std::uint64_t>{0, 1, 2, 3, 4});
  CHECK(t.monitor_stats.gates == 10);  // two gates per slot
}

TEST_CASE("qsdc rejects an empty or non-binary message") {
  ProtocolConfig cfg = ideal_config(Service::qsdc);
  Rng rng(105);
  CHECK_THROWS_AS((void)run_qsdc(cfg, "", rng), std::invalid_argument);
  CHECK_THROWS_AS((void)run_qsdc(cfg, "10x1", rng), std::invalid_argument);
}

TEST_CASE("qsdc retransmission count matches the geometric-rounds oracle") {
  ProtocolConfig cfg = ideal_config(Service::qsdc);
  cfg.mu = 0.2;
  cfg.detectors = DetectorSet(DetectorParams{1.0, 1e-5});
  cfg.max_rounds = 200;
  cfg.monitor.min_gates = 10;

  const double p = honest_two_port(cfg).detect_one();
  Rng oracle_rng(999);
  const std::uint64_t reps = 20000;
  const double oracle =
      mean_rounds_oracle(16, p, cfg.max_rounds, reps, oracle_rng);

  Rng rng(106);
  const int runs = 300;
  double mean = 0.0;
  double mean_sq = 0.0;
  std::string message = random_bits(16, rng);
  for (int r = 0; r < runs; ++r) {
    const auto t = run_qsdc(cfg, message, rng);
    CHECK(t.delivery_complete);
    CHECK(t.recovered_bits == message);
    mean += static_cast<double>(t.rounds_used);
    mean_sq += static_cast<double>(t.rounds_used) *
               static_cast<double>(t.rounds_used);
  }
  mean /= runs;
  mean_sq /= runs;
  const double var = mean_sq - mean * mean;
  const double sigma = std::sqrt(var / runs);
  CHECK(std::abs(mean - oracle) < 3.0 * sigma + 0.1);
}

TEST_CASE("qsdc flags partial delivery when rounds run out") {
  ProtocolConfig cfg = realistic_config(Service::qsdc);
  cfg.max_rounds = 1;  // detection probability ~1%: most slots stay pending
  cfg.monitor.min_gates = 10;
  Rng rng(107);
  const auto t = run_qsdc(cfg, random_bits(64, rng), rng);
  CHECK_FALSE(t.delivery_complete);
  CHECK(t.rounds_used == 1);
  CHECK(t.recovered_bits.size() < 64);
  CHECK(t.recovered_bits.size() == t.detected_slots.size());
  // the retransmission request lists exactly the missing positions
  REQUIRE(t.log.size() == 1);
  CHECK(t.log.front().kind == ClassicalMessage::Kind::retransmit_request);
  CHECK(t.log.front().positions.size() + t.detected_slots.size() == 64);
}

TEST_CASE("qss recovers the xor of the secrets") {
  ProtocolConfig cfg = ideal_config(Service::qss);
  cfg.mu = 5.0;
  cfg.n_bobs = 2;
  cfg.monitor.min_gates = 10;
  Rng rng(108);
  const auto t = run_qss(cfg, {"101", "011"}, rng);
  CHECK(t.sent_bits == "110");
  CHECK(t.recovered_bits == "110");
  CHECK(t.delivery_complete);
}

TEST_CASE("qss with three honest parties always recovers the xor") {
  ProtocolConfig cfg = ideal_config(Service::qss);
  cfg.mu = 0.5;
  cfg.n_bobs = 3;
  cfg.max_rounds = 500;
  cfg.monitor.min_gates = 10;
  Rng rng(109);
  const std::vector<std::string> secrets = {random_bits(400, rng),
                                            random_bits(400, rng),
                                            random_bits(400, rng)};
  const auto t = run_qss(cfg, secrets, rng);
  CHECK(t.sent_bits == xor_strings(secrets));
  CHECK(t.delivery_complete);
  CHECK(t.recovered_bits == t.sent_bits);
  CHECK(t.qber == 0.0);
}

TEST_CASE("qss recovery is invariant under honest-party reordering") {
  ProtocolConfig cfg = ideal_config(Service::qss);
  cfg.mu = 0.5;
  cfg.n_bobs = 3;
  cfg.max_rounds = 500;
  cfg.monitor.min_gates = 10;
  Rng seed_rng(110);
  const std::vector<std::string> secrets = {random_bits(200, seed_rng),
                                            random_bits(200, seed_rng),
                                            random_bits(200, seed_rng)};
  const std::vector<std::string> permuted = {secrets[2], secrets[0],
                                             secrets[1]};
  Rng rng_a(42);
  Rng rng_b(42);
  const auto a = run_qss(cfg, secrets, rng_a);
  const auto b = run_qss(cfg, permuted, rng_b);
  CHECK(a.recovered_bits == b.recovered_bits);
  CHECK(a.detected_slots == b.detected_slots);
}

TEST_CASE("one dishonest party randomizes half of the recovered bits") {
  ProtocolConfig cfg = ideal_config(Service::qss);
  cfg.mu = 0.5;
  cfg.n_bobs = 3;
  cfg.dishonest_bob = 1;
  cfg.max_rounds = 500;
  cfg.monitor.min_gates = 10;
  Rng rng(111);
  const std::vector<std::string> secrets = {random_bits(2000, rng),
                                            random_bits(2000, rng),
                                            random_bits(2000, rng)};
  const auto t = run_qss(cfg, secrets, rng);

  const double n = static_cast<double>(t.recovered_bits.size());
  REQUIRE(n > 1500.0);
  // a uniform phase offset lands on the wrong port with probability
  // E[sin^2(delta/2)] = 1/2
  CHECK(std::abs(t.qber - 0.5) < 3.0 * std::sqrt(0.25 / n));
}

TEST_CASE("qss validates its secret inputs") {
  ProtocolConfig cfg = ideal_config(Service::qss);
  cfg.n_bobs = 2;
  Rng rng(112);
  CHECK_THROWS_AS((void)run_qss(cfg, {"101"}, rng), std::invalid_argument);
  CHECK_THROWS_AS((void)run_qss(cfg, {"101", "01"}, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)run_qss(cfg, {"101", "0a1"}, rng),
                  std::invalid_argument);
  cfg.dishonest_bob = 5;
  CHECK_THROWS_AS((void)run_qss(cfg, {"101", "011"}, rng),
                  std::invalid_argument);
}

TEST_CASE("transcripts replay identically under the same seed") {
  ProtocolConfig cfg = realistic_config(Service::qkd);
  cfg.n_pulses = 30000;
  Rng rng_a(4242);
  Rng rng_b(4242);
  const auto a = run_qkd(cfg, rng_a);
  const auto b = run_qkd(cfg, rng_b);
  CHECK(a.sent_bits == b.sent_bits);
  CHECK(a.recovered_bits == b.recovered_bits);
  CHECK(a.detected_slots == b.detected_slots);
  CHECK(a.qber == b.qber);
  CHECK(a.monitor_stats.clicks == b.monitor_stats.clicks);
  CHECK(a.monitor_verdict.z_score == b.monitor_verdict.z_score);
}

TEST_CASE("every thermal gate feeds the monitor across services") {
  Rng rng(113);

  ProtocolConfig qkd_cfg = realistic_config(Service::qkd);
  qkd_cfg.n_pulses = 5000;
  qkd_cfg.monitor.min_gates = 100;
  CHECK(run_qkd(qkd_cfg, rng).monitor_stats.gates == 5000);

  ProtocolConfig qsdc_cfg = realistic_config(Service::qsdc);
  qsdc_cfg.max_rounds = 3;
  qsdc_cfg.monitor.min_gates = 100;
  const auto t = run_qsdc(qsdc_cfg, "1011", rng);
  CHECK(t.monitor_stats.gates % 2 == 0);
  CHECK(t.monitor_stats.gates >= 8);  // two gates per slot, every round
}

TEST_CASE("blinding fires the alarm inside a protocol run") {
  ProtocolConfig cfg = realistic_config(Service::qkd);
  cfg.n_pulses = 20000;
  cfg.attack = AttackKind::blinding(1e6);
  Rng rng(114);
  const auto t = run_qkd(cfg, rng);
  CHECK(t.monitor_alarm);
  CHECK(t.monitor_verdict.rate > 0.99);
}

TEST_CASE("optional data-detector watch catches saturated ports") {
  ProtocolConfig cfg = realistic_config(Service::qkd);
  cfg.n_pulses = 20000;
  cfg.attack = AttackKind::blinding(1e6);
  cfg.monitor.watch_ports = true;
  Rng rng(115);
  const auto t = run_qkd(cfg, rng);
  CHECK(t.monitor_alarm);
  CHECK(power_proxy(t.port0_stats) > 0.99);
  CHECK(power_proxy(t.port1_stats) > 0.99);
}

TEST_CASE("config validation rejects out-of-range parameters") {
  ProtocolConfig cfg = ideal_config(Service::qkd);
  cfg.mu = -0.1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = ideal_config(Service::qkd);
  cfg.n_pulses = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = ideal_config(Service::qsdc);
  cfg.max_rounds = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = ideal_config(Service::qss);
  cfg.n_bobs = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
