#include <algorithm>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eaia/authority/authority.hpp"
#include "eaia/costmodel/attack_time.hpp"
#include "eaia/costmodel/bench.hpp"
#include "eaia/costmodel/costs.hpp"
#include "eaia/costmodel/table.hpp"
#include "eaia/costmodel/tables.hpp"
#include "eaia/group/group.hpp"
#include "eaia/netsim/simulator.hpp"
#include "eaia/protocol/protocol.hpp"
#include "eaia/protocol/wire.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace eaia;
using namespace eaia::cli;

namespace {

std::string render_table(const cost::Table& t, Format f) {
  switch (f) {
    case Format::Json:
      return t.to_json().dump(2) + "\n";
    case Format::Csv:
      return t.to_csv();
    case Format::Text:
      return t.to_text();
  }
  return {};
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

cost::PrimitiveCosts costs_from_option(const std::string& path) {
  return cost::load_cost_file(path.empty() ? cost::default_cost_file() : path);
}

// ---- setup ----

struct SetupArgs {
  bool force = false;
};

int cmd_setup(const CliConfig& cfg, const SetupArgs& args) {
  const fs::path dir = require_state_dir(cfg);
  if (fs::exists(dir / authority::kMasterKeyFile)) {
    if (!args.force) {
      fail(ErrorKind::StateCorrupt, dir.string() + " already holds an authority (use --force)");
    }
    fs::remove(dir / authority::kMasterKeyFile);
    fs::remove(dir / authority::kLogFile);
    fs::remove_all(vehicle_dir(dir));
  }
  fs::create_directories(dir);
  auto rng = make_rng(cfg, label_of("setup"));
  auto amf = authority::Authority::setup(group::make_group(cfg.backend), {}, *rng);
  amf.attach(dir);

  nlohmann::ordered_json out;
  out["state_dir"] = dir.string();
  out["backend"] = std::string(amf.params().g().name());
  out["p_pub"] = to_hex(amf.params().p_pub.bytes());
  emit(cfg, render_record(out, cfg.format));
  return kExitOk;
}

// ---- register ----

struct RegisterArgs {
  std::string vin;
  std::string name;
};

int cmd_register(const CliConfig& cfg, const RegisterArgs& args) {
  const fs::path dir = require_state_dir(cfg);
  if (args.vin.empty()) throw UsageError("--vin must not be empty");
  const std::string name = args.name.empty() ? args.vin : args.name;
  if (name.find_first_of("/\\") != std::string::npos || name == "." || name == "..") {
    throw UsageError("vehicle name must not contain path separators");
  }
  if (fs::exists(vehicle_dir(dir) / (name + ".json"))) {
    fail(ErrorKind::DuplicateRegistration, "vehicle name '" + name + "' already in use");
  }

  auto amf = authority::Authority::load(dir);
  const auto& params = amf.params();
  const auto& g = params.g();

  auto vehicle_rng = make_rng(cfg, label_of("vehicle:" + args.vin));
  auto authority_rng = make_rng(cfg, label_of("register:" + args.vin));

  const auto x = g.random_nonzero(*vehicle_rng);
  const auto X = g.mul_generator(x);
  const auto rid = protocol::real_id_from_vin(args.vin);
  const auto reply = amf.register_vehicle(rid, X.bytes(), cli_now(cfg), *authority_rng);

  StoredVehicle v;
  v.name = name;
  v.vin = args.vin;
  v.seq = amf.vehicle_count() - 1;
  v.rid = rid;
  v.registered_id = reply.id;
  v.keys = protocol::verify_registration(params, reply, x);
  save_vehicle(dir, v);

  nlohmann::ordered_json out;
  out["name"] = name;
  out["id"] = v.keys.id.hex();
  out["X"] = to_hex(v.keys.X.bytes());
  out["Y"] = to_hex(v.keys.Y.bytes());
  emit(cfg, render_record(out, cfg.format));
  return kExitOk;
}

// ---- auth-demo ----

struct AuthDemoArgs {
  std::string initiator;
  std::string responder;
  std::string tamper;
  bool verbose = false;
};

const std::vector<std::string> kChallengeFields = {"B", "N", "sigma", "T_a"};
const std::vector<std::string> kResponseFields = {"D", "eta", "T_b"};

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

Bytes flip_field(Bytes frame, protocol::MessageType type, const std::string& field) {
  const auto tag = protocol::field_tag(type, field);
  const auto span = tag ? protocol::locate_field(frame, *tag) : std::nullopt;
  if (!span || span->length == 0) fail(ErrorKind::InvalidArgument, "no field " + field);
  frame[span->offset] ^= 0x80;
  return frame;
}

template <typename T>
T decode_as(ByteView frame, const protocol::WireProfile& profile) {
  auto msg = protocol::decode_message(frame, profile);
  if (auto* m = std::get_if<T>(&msg)) return *m;
  fail(ErrorKind::MalformedMessage, "unexpected message type");
}

int cmd_auth_demo(const CliConfig& cfg, const AuthDemoArgs& args) {
  const fs::path dir = require_state_dir(cfg);
  if (!args.tamper.empty() && !contains(kChallengeFields, args.tamper) &&
      !contains(kResponseFields, args.tamper)) {
    throw UsageError("--tamper takes one of B, N, sigma, T_a, D, eta, T_b");
  }
  auto amf = authority::Authority::load(dir);
  const auto& params = amf.params();

  std::string ini = args.initiator;
  std::string res = args.responder;
  if (ini.empty() || res.empty()) {
    const auto names = list_vehicles(dir);
    if (names.size() < 2) throw UsageError("auth-demo needs two registered vehicles");
    if (ini.empty()) ini = names[0];
    if (res.empty()) res = names[ini == names[1] ? 0 : 1];
  }
  if (ini == res) throw UsageError("initiator and responder must differ");
  const auto vi = load_vehicle(dir, ini, params);
  const auto vj = load_vehicle(dir, res, params);

  auto rng_i = make_rng(cfg, label_of("auth-demo:" + ini));
  auto rng_j = make_rng(cfg, label_of("auth-demo:" + res));
  const auto profile = protocol::WireProfile::from(params);
  const auto now = cli_now(cfg);

  nlohmann::ordered_json out;
  out["initiator"] = ini;
  out["responder"] = res;
  nlohmann::ordered_json flow = nlohmann::ordered_json::array();
  auto note = [&](const std::string& from, const std::string& to, const Bytes& frame,
                  const nlohmann::ordered_json& fields) {
    nlohmann::ordered_json m;
    m["from"] = from;
    m["to"] = to;
    m["type"] = std::string(protocol::to_string(*protocol::peek_type(frame)));
    m["bytes"] = frame.size();
    if (args.verbose) m["fields"] = fields;
    flow.push_back(std::move(m));
  };

  const auto req = protocol::make_auth_request(params, vj.keys);
  note(res, ini, protocol::encode_message(req),
       {{"id", req.requester_id.hex()}, {"pub_sum", to_hex(req.requester_pub_sum)}});

  auto ch = protocol::build_challenge(params, req, vi.keys, now, *rng_i);
  Bytes ch_frame = protocol::encode_message(ch.msg);
  if (contains(kChallengeFields, args.tamper)) {
    ch_frame = flip_field(std::move(ch_frame), protocol::MessageType::Challenge, args.tamper);
  }
  const auto ch_msg = decode_as<protocol::ChallengeMsg>(ch_frame, profile);
  note(ini, res, ch_frame,
       {{"B", to_hex(ch_msg.B)},
        {"N", to_hex(ch_msg.N)},
        {"sigma", to_hex(ch_msg.sigma)},
        {"T_a", ch_msg.t_a.ms}});

  protocol::ReplayCache cache(2 * cfg.window_ms);
  auto outcome =
      protocol::process_challenge(params, ch_msg, vj.keys, amf, now, cfg.window_ms, *rng_j, &cache);
  Bytes resp_frame = protocol::encode_message(outcome.msg);
  if (contains(kResponseFields, args.tamper)) {
    resp_frame = flip_field(std::move(resp_frame), protocol::MessageType::Response, args.tamper);
  }
  const auto resp_msg = decode_as<protocol::ResponseMsg>(resp_frame, profile);
  note(res, ini, resp_frame,
       {{"D", to_hex(resp_msg.D)}, {"eta", to_hex(resp_msg.eta)}, {"T_b", resp_msg.t_b.ms}});

  const auto sk_i = protocol::finalize(params, resp_msg, ch.state, vi.keys, now, cfg.window_ms);
  const bool match = sk_i == outcome.key;
  out["messages"] = flow;
  out["sk_match"] = match;

  if (cfg.format == Format::Text) {
    std::string text;
    for (const auto& m : flow) {
      text += m["from"].get<std::string>() + " -> " + m["to"].get<std::string>() + "  " +
              m["type"].get<std::string>() + "  " + std::to_string(m["bytes"].get<std::size_t>()) +
              " bytes\n";
      if (m.contains("fields")) {
        for (const auto& [k, v] : m["fields"].items()) {
          text += "    " + k + " = " + (v.is_string() ? v.get<std::string>() : v.dump()) + "\n";
        }
      }
    }
    text += std::string("SK match: ") + (match ? "true" : "false") + "\n";
    emit(cfg, text);
  } else if (cfg.format == Format::Json) {
    emit(cfg, out.dump(2) + "\n");
  } else {
    cost::Table t({"from", "to", "type", "bytes"});
    for (const auto& m : flow) t.add_row({m["from"], m["to"], m["type"], m["bytes"]});
    emit(cfg, t.to_csv());
  }
  return match ? kExitOk : kExitAssertion;
}

// ---- sim ----

struct SimArgs {
  std::vector<std::string> scenarios;
  bool timing = false;
};

int cmd_sim(const CliConfig& cfg, const SimArgs& args) {
  std::vector<netsim::Scenario> loaded;
  for (const auto& path : args.scenarios) {
    auto sc = netsim::load_scenario(path);
    if (cfg.seed) sc.seed = *cfg.seed;
    sc.validate();
    loaded.push_back(std::move(sc));
  }
  std::vector<std::string> names;
  for (const auto& sc : loaded) {
    if (contains(names, sc.name)) {
      fail(ErrorKind::ScenarioInvalid, "two scenarios named '" + sc.name + "'");
    }
    names.push_back(sc.name);
  }

  bool all_passed = true;
  cost::Table overview({"scenario", "expectations", "failed", "passed"});
  for (const auto& sc : loaded) {
    const auto report = netsim::run_scenario(sc, {args.timing});
    std::size_t failed = 0;
    for (const auto& e : report.expectations) failed += e.passed ? 0 : 1;
    all_passed = all_passed && report.passed();
    overview.add_row({sc.name, report.expectations.size(), failed, report.passed()});
    if (cfg.out) {
      write_file_atomic(*cfg.out / (sc.name + ".report.json"), report.to_json_string());
      write_file_atomic(*cfg.out / (sc.name + ".summary.csv"), report.summary_csv());
    } else if (cfg.format == Format::Json) {
      std::cout << report.to_json_string();
    } else if (cfg.format == Format::Csv) {
      std::cout << report.summary_csv();
    }
    for (const auto& e : report.expectations) {
      if (!e.passed) {
        std::cerr << sc.name << ": expectation '" << e.spec.name << "' failed ("
                  << e.spec.metric << " = "
                  << (e.actual ? cost::format_number(*e.actual) : std::string("unknown")) << ")\n";
      }
    }
  }
  if (cfg.out || cfg.format == Format::Text) std::cout << overview.to_text();
  return all_passed ? kExitOk : kExitAssertion;
}

// ---- cost ----

struct CostArgs {
  std::string table = "IV";
  std::string costs;
  double rate_bps = cost::kDefaultRateBps;
  double distance_m = cost::kDefaultDistanceM;
};

int cmd_cost(const CliConfig& cfg, const CostArgs& args) {
  const auto costs = costs_from_option(args.costs);
  const auto table = cost::table_by_id(args.table, costs, {args.rate_bps, args.distance_m});
  emit(cfg, render_table(table, cfg.format));
  return kExitOk;
}

// ---- attack-time ----

struct AttackArgs {
  std::string p_list;
  double p_step = 0.1;
  unsigned steps = 3;
  std::string costs;
  std::uint64_t monte_carlo = 0;
};

int cmd_attack_time(const CliConfig& cfg, const AttackArgs& args) {
  std::vector<double> grid;
  if (!args.p_list.empty()) {
    for (const auto& item : split_commas(args.p_list)) {
      try {
        std::size_t used = 0;
        grid.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw UsageError("--p: not a number: " + item);
      }
    }
  } else {
    grid = cost::probability_grid(args.p_step);
  }
  if (args.steps == 0) throw UsageError("--steps must be at least 1");
  const auto costs = costs_from_option(args.costs);
  auto table = cost::attack_time_sweep(costs, grid, args.steps);

  if (args.monte_carlo > 0) {
    const std::uint64_t seed = cfg.seed.value_or(1);
    const auto& schemes = cost::reference_schemes();
    const auto& eaia = schemes.back();
    const double t_success = cost::scheme_time_us(eaia.formula, costs) +
                             cost::comm_delay(eaia.formula.message_bits, cost::kDefaultRateBps,
                                              cost::kDefaultDistanceM)
                                 .total_us();
    cost::Table mc({"p", "analytic_us", "monte_carlo_us", "stderr_us", "trials"});
    for (double p : grid) {
      const auto m = cost::AttackModel::uniform_steps(p, t_success, args.steps);
      const auto est = cost::monte_carlo_auth_time(m, args.monte_carlo, derive_seed(seed, label_of("mc")));
      mc.add_row({p, cost::avg_auth_time(m), est.mean, est.stderr_mean, est.trials});
    }
    std::string text = render_table(table, cfg.format);
    if (cfg.format == Format::Json) {
      nlohmann::ordered_json j;
      j["sweep"] = table.to_json();
      j["monte_carlo_EAIA"] = mc.to_json();
      text = j.dump(2) + "\n";
    } else {
      text += "\n" + render_table(mc, cfg.format);
    }
    emit(cfg, text);
    return kExitOk;
  }
  emit(cfg, render_table(table, cfg.format));
  return kExitOk;
}

// ---- bench ----

struct BenchArgs {
  unsigned iterations = 200;
};

int cmd_bench(const CliConfig& cfg, const BenchArgs& args) {
  if (args.iterations == 0) throw UsageError("--iterations must be at least 1");
  const auto g = group::make_group(cfg.backend);
  const auto costs = cost::bench_primitives(args.iterations, *g);
  switch (cfg.format) {
    case Format::Json:
      emit(cfg, cost::costs_to_json(costs).dump(2) + "\n");
      break;
    case Format::Csv:
      emit(cfg, cost::costs_to_csv(costs));
      break;
    case Format::Text: {
      cost::Table t({"primitive", "notation", "time_us"});
      for (auto p : cost::kAllPrimitives) {
        t.add_row({std::string(cost::to_string(p)), std::string(cost::notation(p)), costs.time(p)});
      }
      emit(cfg, t.to_text());
      break;
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certificateless V2V authentication: authority, demo, simulator and cost model"};
  app.require_subcommand(1);
  app.fallthrough();

  CliConfig cfg;
  std::string backend_flag;
  std::string format_flag;
  std::string config_path;
  std::optional<std::uint64_t> seed_flag;
  std::optional<std::uint64_t> window_flag;
  std::string state_flag;
  std::string out_flag;

  app.add_option("--backend", backend_flag, "production (P-256) or toy (F_17 curve)");
  app.add_option("--seed", seed_flag, "Deterministic randomness and logical time 0");
  app.add_option("--window-ms", window_flag, "Freshness window in milliseconds");
  app.add_option("--format", format_flag, "text, json or csv");
  app.add_option("--state-dir", state_flag, "Authority directory (default $EAIA_STATE_DIR)");
  app.add_option("--out", out_flag, "Output file (sim: output directory)");
  app.add_option("--config", config_path, "JSON file with default global options");

  SetupArgs setup_args;
  auto* setup = app.add_subcommand("setup", "Create the authority master key and parameters");
  setup->add_flag("--force", setup_args.force, "Replace an existing authority");

  RegisterArgs register_args;
  auto* reg = app.add_subcommand("register", "Register a vehicle and store its keys");
  reg->add_option("--vin", register_args.vin, "Vehicle identification number")->required();
  reg->add_option("--name", register_args.name, "Local name (defaults to the VIN)");

  AuthDemoArgs demo_args;
  auto* demo = app.add_subcommand("auth-demo", "Run one authentication between two vehicles");
  demo->add_option("--initiator", demo_args.initiator, "Challenging vehicle");
  demo->add_option("--responder", demo_args.responder, "Requesting vehicle");
  demo->add_option("--tamper", demo_args.tamper, "Flip one bit in B, N, sigma, T_a, D, eta or T_b");
  demo->add_flag("--verbose", demo_args.verbose, "Show public message fields");

  SimArgs sim_args;
  auto* sim = app.add_subcommand("sim", "Run network scenarios");
  sim->add_option("scenarios", sim_args.scenarios, "Scenario files")->required();
  sim->add_flag("--timing", sim_args.timing, "Add wall-clock time to reports");

  CostArgs cost_args;
  auto* costc = app.add_subcommand("cost", "Print a cost comparison table");
  costc->add_option("--table", cost_args.table, "IV, V or VII")
      ->check(CLI::IsMember({"IV", "V", "VII"}));
  costc->add_option("--costs", cost_args.costs, "Primitive cost file (JSON)");
  costc->add_option("--rate-bps", cost_args.rate_bps, "Link rate")->check(CLI::PositiveNumber);
  costc->add_option("--distance-m", cost_args.distance_m, "Link distance")
      ->check(CLI::NonNegativeNumber);

  AttackArgs attack_args;
  auto* attack = app.add_subcommand("attack-time", "Expected authentication time under disruption");
  attack->add_option("--p", attack_args.p_list, "Comma-separated disruption probabilities");
  attack->add_option("--p-step", attack_args.p_step, "Grid step when --p is absent")
      ->check(CLI::Range(1e-6, 1.0));
  attack->add_option("--steps", attack_args.steps, "Protocol steps an attack can hit");
  attack->add_option("--costs", attack_args.costs, "Primitive cost file (JSON)");
  attack->add_option("--monte-carlo", attack_args.monte_carlo,
                     "Also simulate EAIA with this many trials per p");

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "Measure primitive costs on this machine");
  bench->add_option("--iterations", bench_args.iterations, "Samples per primitive");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (!config_path.empty()) apply_config_file(config_path, cfg);
    if (!backend_flag.empty()) cfg.backend = canonical_backend(backend_flag);
    if (!format_flag.empty()) cfg.format = parse_format(format_flag);
    if (seed_flag) cfg.seed = seed_flag;
    if (window_flag) cfg.window_ms = *window_flag;
    if (!state_flag.empty()) cfg.state_dir = state_flag;
    if (!out_flag.empty()) cfg.out = out_flag;
    if (cfg.window_ms == 0) throw UsageError("--window-ms must be positive");

    if (*setup) return cmd_setup(cfg, setup_args);
    if (*reg) return cmd_register(cfg, register_args);
    if (*demo) return cmd_auth_demo(cfg, demo_args);
    if (*sim) return cmd_sim(cfg, sim_args);
    if (*costc) return cmd_cost(cfg, cost_args);
    if (*attack) return cmd_attack_time(cfg, attack_args);
    if (*bench) return cmd_bench(cfg, bench_args);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitState;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
