#include "cli.hpp"

#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "p4bft.hpp"

namespace p4bft::cli {
namespace {

using json = nlohmann::ordered_json;

struct TopoOpts {
  std::string name;  // fig2 | internet2
  std::string file;
  std::string attach;
  std::optional<std::size_t> fat_tree;
  std::optional<std::size_t> random;
  double degree = 4.0;
  std::optional<std::size_t> controllers;
  std::optional<std::size_t> clusters;
  std::uint64_t seed = 1;
};

struct PlacementOpts {
  double w1 = 1.0;
  double w2 = 1.0;
  std::optional<std::uint64_t> q;
  std::optional<std::uint32_t> T;
  std::optional<double> coverage;
};

struct FaultOpts {
  std::optional<std::size_t> fm;
  std::size_t fa = 0;
  bool strict = false;
};

struct SimOpts {
  std::string targets;
  std::size_t requests = 0;
  std::string byzantine;
  std::string crashed;
  std::string mode = "p4bft";
  bool compare = false;
  std::string profile = "unit";
  std::optional<Tick> hop_delay;
  std::optional<Tick> proc_delay;
  Tick jitter = 0;
  Tick interval = 0;
  std::string trace;
  bool no_reassign = false;
  std::size_t slots = 64;
};

void add_topo_options(CLI::App* app, TopoOpts& o) {
  app->add_option("--topo", o.name, "Built-in topology: fig2 or internet2")
      ->check(CLI::IsMember({"fig2", "internet2"}));
  app->add_option("--file", o.file, "Edge-list file");
  app->add_option("--attach", o.attach, "Controller attachment file");
  app->add_option("--fat-tree", o.fat_tree, "k-ary Fat-Tree");
  app->add_option("--random", o.random, "Random graph with N switches");
  app->add_option("--degree", o.degree, "Average degree of --random graphs");
  app->add_option("--controllers", o.controllers, "Place N controllers at random");
  app->add_option("--clusters", o.clusters, "Disjoint clusters for --controllers");
  app->add_option("--seed", o.seed, "Seed for every random choice");
}

void add_placement_options(CLI::App* app, PlacementOpts& o) {
  app->add_option("--w1", o.w1, "Footprint weight");
  app->add_option("--w2", o.w2, "Delay weight");
  app->add_option("--q", o.q, "Uniform processing capacity per switch");
  app->add_option("--T", o.T, "Delay bound in hops");
  app->add_option("--coverage", o.coverage, "Fraction of switches that may process")
      ->check(CLI::Range(0.0, 1.0));
}

void add_fault_options(CLI::App* app, FaultOpts& o) {
  app->add_option("--fm", o.fm, "Tolerated Byzantine replicas (default (|C|-1)/2)");
  app->add_option("--fa", o.fa, "Tolerated crashed replicas");
  app->add_flag("--strict", o.strict, "Exit 4 when the fault guarantee is degraded");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::size_t default_clusters(std::size_t controllers) { return controllers >= 2 ? 2 : 1; }

// Graph only; controllers are placed separately when requested.
Topology base_topology(const TopoOpts& o) {
  const int sources = !o.name.empty() + !o.file.empty() + o.fat_tree.has_value() +
                      o.random.has_value();
  if (sources == 0) throw Error(Errc::InvalidConfig, "no topology given");
  if (sources > 1) throw Error(Errc::InvalidConfig, "more than one topology source given");
  if (!o.attach.empty() && o.file.empty()) {
    throw Error(Errc::InvalidConfig, "--attach needs --file");
  }
  if (o.name == "fig2") return fig2_topology();
  if (o.name == "internet2") return internet2();
  if (!o.file.empty()) return load_topology(o.file, o.attach);
  if (o.fat_tree) return fat_tree(*o.fat_tree);
  return random_topology(*o.random, o.degree, 0, 0, derive_seed(o.seed, 0x70B0));
}

Topology make_topology(const TopoOpts& o) {
  Topology t = base_topology(o);
  if (o.controllers) {
    Rng rng(derive_seed(o.seed, 0xA77));
    t = place_controllers(t, *o.controllers, o.clusters.value_or(default_clusters(*o.controllers)),
                          rng);
  } else if (o.clusters) {
    throw Error(Errc::InvalidConfig, "--clusters needs --controllers");
  }
  return t;
}

PlacementProblem make_cli_problem(const Topology& t, const PlacementOpts& o, std::uint64_t seed) {
  PlacementProblem p = make_problem(t);
  p.weights = {o.w1, o.w2};
  p.delay_bound = o.T;
  if (o.q) p.capacity.assign(t.switch_count(), *o.q);
  if (o.coverage) {
    Rng rng(derive_seed(seed, 0xC0FE));
    p.candidate = sample_candidates(t, coverage_count(t.switch_count(), *o.coverage), rng);
  }
  return p;
}

PlacementPolicy make_policy(const Topology& t, const PlacementOpts& o) {
  PlacementPolicy pol;
  pol.weights = {o.w1, o.w2};
  pol.delay_bound = o.T;
  if (o.q) pol.capacity.assign(t.switch_count(), *o.q);
  return pol;
}

SwitchId switch_by_name(const Topology& t, const std::string& name) {
  if (auto s = t.find_switch(name)) return *s;
  throw Error(Errc::UnknownSwitch, "unknown switch " + name);
}

std::vector<ControllerId> controllers_by_name(const Topology& t, const std::string& list) {
  std::vector<ControllerId> out;
  for (const auto& name : split_list(list)) {
    auto c = t.find_controller(name);
    if (!c) throw Error(Errc::InvalidConfig, "unknown controller " + name);
    out.push_back(*c);
  }
  return out;
}

DelayProfile make_profile(const SimOpts& o) {
  DelayProfile p;
  if (o.profile == "hardware") p = DelayProfile::hardware_like();
  if (o.profile == "software") p = DelayProfile::software_like();
  if (o.hop_delay) p.hop_delay = *o.hop_delay;
  if (o.proc_delay) p.processing_delay = *o.proc_delay;
  return p;
}

// ---------------------------------------------------------------------------

int cmd_topo(const TopoOpts& o, std::ostream& out) {
  const Topology t = make_topology(o);
  out << "switches=" << t.switch_count() << " links=" << t.link_count() << '\n';
  out << "controllers=" << t.controller_count() << " clusters=" << t.attachment_switches().size()
      << '\n';
  for (SwitchId j : t.attachment_switches()) {
    out << "cluster " << t.switch_name(j) << ':';
    for (ControllerId c : t.controllers_at(j)) out << ' ' << t.controller_name(c);
    out << '\n';
  }
  out << to_edge_list(t);
  return kOk;
}

int cmd_solve(const TopoOpts& o, const PlacementOpts& po, bool soa, bool brute, std::ostream& out) {
  const Topology t = make_topology(o);
  const PlacementProblem p = make_cli_problem(t, po, o.seed);
  p.validate();
  const PlacementSolution s = soa ? soa_solution(p) : brute ? brute_force(p) : solve(p);
  json j = solution_json(s, t);
  j["method"] = soa ? "soa" : brute ? "brute-force" : "min-cost-flow";
  j["reported"] = reported_json(reported_metrics(p, s), t);
  out << j.dump(2) << '\n';
  return kOk;
}

int cmd_pareto(const TopoOpts& o, const PlacementOpts& po, std::ostream& out) {
  const Topology t = make_topology(o);
  const PlacementProblem p = make_cli_problem(t, po, o.seed);
  const auto front = pareto(p);
  out << "footprint,delay\n";
  for (const auto& pt : front) out << pt.footprint << ',' << pt.delay << '\n';
  return kOk;
}

int cmd_simulate(const TopoOpts& o, const PlacementOpts& po, const FaultOpts& fo,
                 const SimOpts& so, std::ostream& out, std::ostream& err) {
  SimConfig c;
  c.topology = make_topology(o);
  const auto nc = c.topology.controller_count();
  if (nc == 0) throw Error(Errc::InvalidConfig, "topology has no controllers");
  c.fm = fo.fm.value_or((nc - 1) / 2);
  c.fa = fo.fa;
  c.byzantine = controllers_by_name(c.topology, so.byzantine);
  c.crashed = controllers_by_name(c.topology, so.crashed);
  c.policy = make_policy(c.topology, po);
  c.coverage = po.coverage;
  c.profile = make_profile(so);
  c.send_jitter = so.jitter;
  c.request_interval = so.interval;
  c.seed = o.seed;
  c.reassign_on_detection = !so.no_reassign;
  c.register_slots = so.slots;
  c.request_count = so.requests;
  if (!so.targets.empty()) {
    Rng rng(derive_seed(o.seed, 0x9A71));
    std::uint32_t id = 0;
    for (const auto& name : split_list(so.targets)) {
      const SwitchId k = switch_by_name(c.topology, name);
      ++id;
      c.requests.push_back({id, k, default_payload(id, k, rng)});
    }
  }
  std::unique_ptr<std::ofstream> trace;
  if (!so.trace.empty()) {
    trace = std::make_unique<std::ofstream>(so.trace);
    if (!*trace) throw Error(Errc::InvalidConfig, "cannot write " + so.trace);
    c.trace = [&trace](const nlohmann::json& j) { *trace << j.dump() << '\n'; };
  }

  const bool unsafe = c.byzantine.size() > c.fm || nc < min_replicas(c.fm, c.fa);
  bool degraded = unsafe;
  json result;
  if (so.compare) {
    c.mode = Mode::P4bft;
    const auto a = run(c);
    c.mode = Mode::Soa;
    const auto b = run(c);
    degraded = degraded || a.degraded || b.degraded;
    result = {{"p4bft", report_json(a, c.topology)},
              {"soa", report_json(b, c.topology)},
              {"improvement", improvement(a, b, FootprintConvention::InNetwork)},
              {"improvement_reported", improvement(a, b, FootprintConvention::Reported)}};
  } else {
    if (so.mode != "p4bft" && so.mode != "soa") throw Error(Errc::InvalidConfig, "bad --mode");
    c.mode = so.mode == "soa" ? Mode::Soa : Mode::P4bft;
    const auto r = run(c);
    degraded = degraded || r.degraded;
    result = report_json(r, c.topology);
  }
  out << result.dump(2) << '\n';
  if (degraded) {
    err << "warning: degraded fault guarantee (|C|=" << nc << ", F_M=" << c.fm << ", F_A=" << c.fa
        << ")\n";
    if (fo.strict) return kDegraded;
  }
  return kOk;
}

struct SweepOpts {
  std::size_t placements = 200;
  std::size_t requests = 0;
  std::string output;
  std::string cdf;
  unsigned threads = 0;
};

int cmd_sweep(const TopoOpts& o, const PlacementOpts& po, const FaultOpts& fo,
              const SimOpts& so, const SweepOpts& sw, std::ostream& out, std::ostream& err) {
  SweepConfig c;
  if (o.random && o.name.empty() && o.file.empty() && !o.fat_tree) {
    c.source = TopologySource::random(*o.random, o.degree);
  } else {
    c.source = TopologySource::of(base_topology(o).with_attachments({}));
  }
  c.controllers = o.controllers.value_or(5);
  c.clusters = o.clusters.value_or(default_clusters(c.controllers));
  c.placements = sw.placements;
  c.seed = o.seed;
  c.fm = fo.fm;
  c.fa = fo.fa;
  c.policy.weights = {po.w1, po.w2};
  c.policy.delay_bound = po.T;
  c.coverage = po.coverage;
  c.request_count = sw.requests;
  c.profile = make_profile(so);
  c.send_jitter = so.jitter;
  c.threads = sw.threads;
  if (c.source.kind == TopologySource::Kind::Fixed && po.q) {
    c.policy.capacity.assign(c.source.fixed.switch_count(), *po.q);
  }
  const SweepResult r = sweep(c);

  const std::string csv = sweep_csv(r);
  if (sw.output.empty()) {
    out << csv;
  } else {
    std::ofstream f(sw.output, std::ios::binary);
    if (!f) throw Error(Errc::InvalidConfig, "cannot write " + sw.output);
    f << csv;
  }
  if (!sw.cdf.empty()) {
    std::vector<double> imp;
    for (const auto& p : r.placements) imp.push_back(p.improvement);
    std::ofstream f(sw.cdf, std::ios::binary);
    if (!f) throw Error(Errc::InvalidConfig, "cannot write " + sw.cdf);
    f << cdf_csv(cdf_points(imp));
  }
  err << "improvement " << json{{"in_network", summary_json(r.improvement)},
                               {"reported", summary_json(r.improvement_reported)}}
                               .dump()
      << '\n';
  bool degraded = false;
  for (const auto& p : r.placements) degraded = degraded || p.p4bft.degraded || p.soa.degraded;
  if (degraded) {
    err << "warning: degraded fault guarantee in at least one placement\n";
    if (fo.strict) return kDegraded;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// --spec FILE: a JSON object whose keys are long option names of the
// subcommand (plus "command"). Options given on the command line win.

std::vector<std::string> spec_arguments(const std::string& path, std::string& command) {
  json doc;
  try {
    doc = json::parse(detail::read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(Errc::ParseError, std::string("spec: ") + e.what());
  }
  if (!doc.is_object()) throw Error(Errc::ParseError, "spec must be a JSON object");
  std::vector<std::string> args;
  for (const auto& [key, value] : doc.items()) {
    if (key == "command") {
      if (!value.is_string()) throw Error(Errc::ParseError, "spec command must be a string");
      if (!command.empty() && command != value.get<std::string>()) {
        throw Error(Errc::InvalidConfig, "spec command does not match " + command);
      }
      command = value.get<std::string>();
      continue;
    }
    const std::string flag = "--" + key;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_string()) {
      args.push_back(flag);
      args.push_back(value.get<std::string>());
    } else if (value.is_number()) {
      args.push_back(flag);
      args.push_back(value.dump());
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) {
        if (!joined.empty()) joined += ',';
        joined += v.is_string() ? v.get<std::string>() : v.dump();
      }
      args.push_back(flag);
      args.push_back(joined);
    } else {
      throw Error(Errc::ParseError, "spec key " + key + " has an unsupported value");
    }
  }
  return args;
}

}  // namespace

int run_cli(const std::vector<std::string>& input, std::ostream& out, std::ostream& err) {
  const std::vector<std::string> commands = {"topo", "solve", "pareto", "simulate", "sweep"};
  std::vector<std::string> args;
  try {
    // Splice a --spec document in front of the explicit options.
    std::string spec_path;
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < input.size(); ++i) {
      if (input[i] == "--spec") {
        if (i + 1 == input.size()) throw Error(Errc::InvalidConfig, "--spec needs a file");
        spec_path = input[++i];
      } else if (input[i].rfind("--spec=", 0) == 0) {
        spec_path = input[i].substr(7);
      } else {
        rest.push_back(input[i]);
      }
    }
    std::string command;
    if (!rest.empty() && std::find(commands.begin(), commands.end(), rest.front()) != commands.end()) {
      command = rest.front();
      rest.erase(rest.begin());
    }
    std::vector<std::string> from_spec;
    if (!spec_path.empty()) from_spec = spec_arguments(spec_path, command);
    if (!command.empty()) args.push_back(command);
    args.insert(args.end(), from_spec.begin(), from_spec.end());
    args.insert(args.end(), rest.begin(), rest.end());
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kSpecError;
  }

  CLI::App app{"Byzantine-tolerant processing-node placement and simulation"};
  app.name("p4bft");
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.add_option("--spec", "JSON document of subcommand options");

  TopoOpts topo;
  PlacementOpts place;
  FaultOpts fault;
  SimOpts sim;
  SweepOpts sw;
  bool soa = false;
  bool brute = false;

  auto* c_topo = app.add_subcommand("topo", "Generate or load a topology and print it");
  add_topo_options(c_topo, topo);

  auto* c_solve = app.add_subcommand("solve", "Optimal processing-node assignment as JSON");
  add_topo_options(c_solve, topo);
  add_placement_options(c_solve, place);
  c_solve->add_flag("--soa", soa, "Evaluate destination processing instead");
  c_solve->add_flag("--brute-force", brute, "Exhaustive search (at most 10 switches)");

  auto* c_pareto = app.add_subcommand("pareto", "Footprint/delay frontier as CSV");
  add_topo_options(c_pareto, topo);
  add_placement_options(c_pareto, place);

  auto add_sim_options = [&](CLI::App* a) {
    a->add_option("--profile", sim.profile, "Delay profile: unit, hardware or software")
        ->check(CLI::IsMember({"unit", "hardware", "software"}));
    a->add_option("--hop-delay", sim.hop_delay, "Ticks per link hop");
    a->add_option("--proc-delay", sim.proc_delay, "Ticks per comparison at a processing node");
    a->add_option("--jitter", sim.jitter, "Max random send offset per replica, ticks");
  };

  auto* c_sim = app.add_subcommand("simulate", "Run one scenario and print the metrics report");
  add_topo_options(c_sim, topo);
  add_placement_options(c_sim, place);
  add_fault_options(c_sim, fault);
  add_sim_options(c_sim);
  c_sim->add_option("--target", sim.targets, "Comma-separated request targets");
  c_sim->add_option("--requests", sim.requests, "Random requests (0 = one per switch)");
  c_sim->add_option("--byzantine", sim.byzantine, "Comma-separated Byzantine controllers");
  c_sim->add_option("--crashed", sim.crashed, "Comma-separated crashed controllers");
  c_sim->add_option("--mode", sim.mode, "p4bft or soa")->check(CLI::IsMember({"p4bft", "soa"}));
  c_sim->add_flag("--compare", sim.compare, "Run both modes and report the improvement");
  c_sim->add_option("--interval", sim.interval, "Ticks between requests (0 = no overlap)");
  c_sim->add_option("--trace", sim.trace, "Write JSON-lines event trace to FILE");
  c_sim->add_flag("--no-reassign", sim.no_reassign, "Keep detected replicas active");
  c_sim->add_option("--slots", sim.slots, "Hash register slots per row");

  auto* c_sweep = app.add_subcommand("sweep", "Paired runs over random placements as CSV");
  add_topo_options(c_sweep, topo);
  add_placement_options(c_sweep, place);
  add_fault_options(c_sweep, fault);
  add_sim_options(c_sweep);
  c_sweep->add_option("--placements", sw.placements, "Number of placements")
      ->check(CLI::PositiveNumber);
  c_sweep->add_option("--requests", sw.requests, "Random requests (0 = one per switch)");
  c_sweep->add_option("--output", sw.output, "Write the CSV to FILE instead of stdout");
  c_sweep->add_option("--cdf", sw.cdf, "Write improvement CDF points to FILE");
  c_sweep->add_option("--threads", sw.threads, "Worker threads (0 = all cores)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kSpecError;
  }

  try {
    if (c_topo->parsed()) return cmd_topo(topo, out);
    if (c_solve->parsed()) return cmd_solve(topo, place, soa, brute, out);
    if (c_pareto->parsed()) return cmd_pareto(topo, place, out);
    if (c_sim->parsed()) return cmd_simulate(topo, place, fault, sim, out, err);
    if (c_sweep->parsed()) return cmd_sweep(topo, place, fault, sim, sw, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == Errc::Infeasible ? kInfeasible : kSpecError;
  }
  return kSpecError;
}

}  // namespace p4bft::cli
