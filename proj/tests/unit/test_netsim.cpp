#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "eaia/netsim/adversary.hpp"
#include "eaia/netsim/simulator.hpp"
#include "eaia/protocol/wire.hpp"
#include "fixtures.hpp"

using namespace eaia;
using namespace eaia::netsim;
using nlohmann::json;
using testing_support::error_of;
using testing_support::make_world;
namespace fs = std::filesystem;

namespace {

json base_scenario() {
  return json::parse(R"({
    "name": "unit",
    "seed": 3,
    "backend": "toy",
    "vehicles": ["a", "b", "c"],
    "sessions": [{"at_ms": 1, "initiator": "a", "responder": "b", "repeat": 3, "interval_ms": 10}]
  })");
}

ErrorKind parse_error(const json& j) {
  return error_of([&] { (void)parse_scenario(j).validate(); });
}

}  // namespace

TEST_CASE("scenario parsing is strict", "[netsim][scenario]") {
  CHECK_NOTHROW(parse_scenario(base_scenario()).validate());

  auto j = base_scenario();
  j["colour"] = "red";
  CHECK(parse_error(j) == ErrorKind::ScenarioInvalid);

  j = base_scenario();
  j["sessions"][0]["initator"] = "a";
  CHECK(parse_error(j) == ErrorKind::ScenarioInvalid);

  j = base_scenario();
  j["sessions"][0]["responder"] = "zed";
  CHECK(parse_error(j) == ErrorKind::ScenarioInvalid);

  j = base_scenario();
  j["sessions"][0]["responder"] = "a";
  CHECK(parse_error(j) == ErrorKind::ScenarioInvalid);

  j = base_scenario();
  j["seed"] = "three";
  CHECK(parse_error(j) == ErrorKind::ScenarioInvalid);

  j = base_scenario();
  j["backend"] = "rsa";
  CHECK(parse_error(j) == ErrorKind::ScenarioInvalid);

  j = base_scenario();
  j["link"] = {{"loss", 1.5}};
  CHECK(parse_error(j) == ErrorKind::ScenarioInvalid);

  j = base_scenario();
  j["vehicles"] = json::array({"a", "a"});
  CHECK(parse_error(j) == ErrorKind::ScenarioInvalid);

  j = base_scenario();
  j["adversary"] = {{"rules", json::array({{{"action", "explode"}}})}};
  CHECK(parse_error(j) == ErrorKind::ScenarioInvalid);

  j = base_scenario();
  j["adversary"] = {{"leak", json::array({{{"session", 0}, {"secret", "d"}}})}};
  CHECK(parse_error(j) == ErrorKind::ScenarioInvalid);

  j = base_scenario();
  j["expect"] = json::array({{{"metric", "sessions.total"}, {"op", "ne"}, {"value", 1}}});
  CHECK(parse_error(j) == ErrorKind::ScenarioInvalid);

  CHECK(error_of([] { (void)load_scenario("/nonexistent/x.json"); }) == ErrorKind::ScenarioInvalid);
}

TEST_CASE("vehicle counts and ring sessions expand", "[netsim][scenario]") {
  auto j = base_scenario();
  j["vehicles"] = {{"count", 4}, {"prefix", "car"}};
  j["sessions"] = json::array({{{"ring", true}, {"at_ms", 5}}});
  const auto sc = parse_scenario(j);
  REQUIRE(sc.vehicles.size() == 4);
  CHECK(sc.vehicles.front().rfind("car", 0) == 0);
  REQUIRE(sc.sessions.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(sc.sessions[i].initiator == sc.vehicles[i]);
    CHECK(sc.sessions[i].responder == sc.vehicles[(i + 1) % 4]);
  }
  // The normalized form parses back to the same scenario.
  CHECK(scenario_to_json(parse_scenario(json::parse(scenario_to_json(sc).dump()))).dump() ==
        scenario_to_json(sc).dump());
}

TEST_CASE("honest runs are deterministic and balanced", "[netsim]") {
  const auto sc = parse_scenario(base_scenario());
  const auto r1 = run_scenario(sc);
  const auto r2 = run_scenario(sc);
  CHECK(r1.to_json_string() == r2.to_json_string());
  CHECK(r1.summary_csv() == r2.summary_csv());
  CHECK_FALSE(r1.wall_time_ms.has_value());
  CHECK(r1.metric("sessions.sk_match") == 3.0);
  CHECK(r1.metric("messages.sent") == 9.0);
  CHECK(r1.messages.balanced());
  CHECK(r1.metric("privacy.pseudonym_leaks") == 0.0);
  CHECK(r1.metric("zeroization.violations") == 0.0);
  CHECK(r1.metric("errors.ReplayDetected") == 0.0);
  CHECK_FALSE(r1.metric("no.such.metric").has_value());

  auto other = sc;
  other.seed = 4;
  CHECK(run_scenario(other).to_json_string() != r1.to_json_string());

  const auto timed = run_scenario(sc, {true});
  CHECK(timed.wall_time_ms.has_value());
}

TEST_CASE("link loss is accounted as dropped", "[netsim]") {
  auto j = base_scenario();
  j["link"] = {{"loss", 0.5}};
  j["sessions"][0]["repeat"] = 30;
  const auto r = run_scenario(parse_scenario(j));
  CHECK(r.messages.dropped > 0);
  CHECK(r.messages.suppressed == 0);
  CHECK(r.messages.balanced());
  CHECK(r.metric("sessions.timed_out").value() > 0);
  CHECK(r.metric("zeroization.violations") == 0.0);
}

TEST_CASE("expectations are evaluated", "[netsim]") {
  auto j = base_scenario();
  j["expect"] = json::array({{{"metric", "sessions.sk_match"}, {"value", 3}},
                             {{"metric", "messages.sent"}, {"op", "ge"}, {"value", 100}},
                             {{"metric", "made.up"}, {"value", 0}}});
  const auto r = run_scenario(parse_scenario(j));
  REQUIRE(r.expectations.size() == 3);
  CHECK(r.expectations[0].passed);
  CHECK_FALSE(r.expectations[1].passed);
  CHECK_FALSE(r.expectations[2].passed);
  CHECK_FALSE(r.expectations[2].actual.has_value());
  CHECK_FALSE(r.passed());
  CHECK(r.summary_csv().rfind("kind,name,value,passed\n", 0) == 0);
}

TEST_CASE("adversary actions on captured frames", "[netsim][adversary]") {
  const auto w = make_world("production", 2, 70);
  const auto& p = w.params();
  SeededRandom rng(8);
  const auto req = protocol::make_auth_request(p, w.keys[1]);
  const auto ch = protocol::build_challenge(p, req, w.keys[0], {1}, rng);
  const auto frame = protocol::encode_message(ch.msg);
  const auto tag = protocol::field_tag(protocol::MessageType::Challenge, "sigma");
  const auto span = protocol::locate_field(frame, *tag);
  REQUIRE(span.has_value());

  AdversaryRule rule;
  rule.kind = ActionKind::Drop;
  CHECK_FALSE(adversary_action(frame, rule, p, rng).frame.has_value());

  rule.kind = ActionKind::Tamper;
  rule.field = "sigma";
  rule.bit = 10;
  const auto tampered = adversary_action(frame, rule, p, rng).frame;
  REQUIRE(tampered.has_value());
  REQUIRE(tampered->size() == frame.size());
  std::size_t diff_bits = 0;
  for (std::size_t i = 0; i < frame.size(); ++i) {
    const auto x = static_cast<unsigned>((*tampered)[i] ^ frame[i]);
    diff_bits += static_cast<std::size_t>(__builtin_popcount(x));
    if (x != 0) CHECK(i == span->offset + 1);
  }
  CHECK(diff_bits == 1);

  rule.field = "eta";
  CHECK(adversary_action(frame, rule, p, rng).frame == frame);

  rule.kind = ActionKind::MitmSwap;
  const auto swapped = adversary_action(frame, rule, p, rng).frame;
  REQUIRE(swapped.has_value());
  const auto back = std::get<protocol::ChallengeMsg>(
      protocol::decode_message(*swapped, protocol::WireProfile::from(p)));
  CHECK(back.B != ch.msg.B);
  CHECK(back.sigma == ch.msg.sigma);

  rule.kind = ActionKind::Replay;
  CHECK(adversary_action(frame, rule, p, rng).frame == frame);
}

TEST_CASE("every shipped scenario meets its expectations", "[netsim][scenarios]") {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(EAIA_SCENARIO_DIR)) {
    if (e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  REQUIRE(files.size() >= 10);
  for (const auto& f : files) {
    INFO(f.filename().string());
    const auto report = run_scenario(load_scenario(f));
    for (const auto& e : report.expectations) {
      INFO(e.spec.metric << " actual " << (e.actual ? std::to_string(*e.actual) : "none"));
      CHECK(e.passed);
    }
    CHECK(report.messages.balanced());
    CHECK(report.zeroization_violations == 0);
  }
}
