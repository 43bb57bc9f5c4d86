// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "p4bft.hpp"
#include "packet_vectors.hpp"

using namespace p4bft;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

constexpr SwitchId S2 = 1, S3 = 2, S4 = 3;

// ---------------------------------------------------------------------------

Outcome c1_reported_metrics() {
  const auto t0 = Clock::now();
  const auto p = make_problem(fig2_topology());
  struct Case {
    SwitchId node;
    std::uint64_t fc;
    std::uint32_t fd;
  };
  bool ok = true;
  std::string got;
  for (const Case& c : {Case{S4, 13, 3}, Case{S3, 11, 5}, Case{S2, 11, 3}}) {
    auto nodes = p.targets;
    nodes[S4] = c.node;
    const auto r = reported_metrics(p, evaluate(p, nodes))[S4];
    ok = ok && r.footprint == c.fc && r.delay == c.fd;
    got += fmt("S%u:(%llu,%u) ", c.node + 1, (unsigned long long)r.footprint, r.delay);
  }
  const double s = seconds_since(t0);
  return {ok && s < 1.0, got + fmt("in %.3fs", s)};
}

Outcome c2_selection() {
  const auto s = solve(make_problem(fig2_topology()));
  const SwitchId x = s.node_for(S4);
  return {x == S2, fmt("x(S4)=S%u", x + 1)};
}

Outcome c3_frontier() {
  const auto p = make_problem(fig2_topology());
  const auto front = pareto(p);
  std::string got;
  std::vector<std::pair<std::uint64_t, std::uint32_t>> pts;
  for (const auto& pt : front) {
    pts.emplace_back(pt.footprint, pt.delay);
    got += fmt("(%llu,%u)", (unsigned long long)pt.footprint, pt.delay);
  }
  const auto soa = soa_solution(p);
  const bool ok = pts == std::vector<std::pair<std::uint64_t, std::uint32_t>>{{26, 3}, {28, 2}} &&
                  soa.footprint == 30 && soa.delay == 2;
  return {ok, "frontier " + got +
                  fmt(" soa (%llu,%u)", (unsigned long long)soa.footprint, soa.delay)};
}

Outcome c4_oracle() {
  const auto t0 = Clock::now();
  Rng rng(derive_seed(4, 0));
  int agreed = 0, both_infeasible = 0, disagreed = 0;
  for (int trial = 0; trial < 160; ++trial) {
    const std::size_t n = 3 + rng.below(8);  // 3..10
    const double degree = std::min<double>(2.0 + rng.unit() * 2.0, double(n - 1));
    const std::size_t clusters = 1 + rng.below(3);
    const std::size_t controllers = clusters + rng.below(5);
    const auto t = random_topology(n, degree, clusters, controllers, rng.next());
    auto p = make_problem(t);
    p.candidate = sample_candidates(t, 1 + rng.below(n), rng);
    switch (rng.below(3)) {
      case 0: break;                                                      // unbounded
      case 1: p.capacity.assign(n, controllers * (1 + rng.below(3))); break;  // tight
      default: p.capacity.assign(n, controllers * n); break;              // loose
    }
    if (rng.below(2)) p.delay_bound = 1 + static_cast<std::uint32_t>(rng.below(5));
    const double w[][2] = {{1, 1}, {1, 0}, {0, 1}, {3, 2}};
    const auto wi = rng.below(4);
    p.weights = {w[wi][0], w[wi][1]};

    std::optional<double> a, b;
    try {
      a = solve(p).objective;
    } catch (const Error& e) {
      if (e.code() != Errc::Infeasible) throw;
    }
    try {
      b = brute_force(p).objective;
    } catch (const Error& e) {
      if (e.code() != Errc::Infeasible) throw;
    }
    if (a && b && *a == *b) {
      ++agreed;
    } else if (!a && !b) {
      ++both_infeasible;
    } else {
      ++disagreed;
    }
  }
  const double s = seconds_since(t0);
  return {disagreed == 0 && agreed >= 100 && s < 30.0,
          fmt("%d feasible instances agree, %d jointly infeasible, %d disagree, %.2fs", agreed,
              both_infeasible, disagreed, s)};
}

Outcome c5_safety() {
  const auto t0 = Clock::now();
  std::vector<Topology> topologies{fig2_topology()};
  for (std::uint64_t s = 1; s <= 3; ++s) {
    Rng rng(derive_seed(5, s));
    topologies.push_back(place_controllers(internet2(), 5, 1 + s % 3, rng));
  }
  std::size_t cases = 0, failures = 0, wrongly_reported = 0, missed = 0;
  for (const auto& topo : topologies) {
    for (unsigned mask = 0; mask < 32; ++mask) {
      if (__builtin_popcount(mask) > 2) continue;
      std::vector<ControllerId> byz;
      for (ControllerId c = 0; c < 5; ++c) {
        if (mask & (1u << c)) byz.push_back(c);
      }
      for (std::uint64_t order = 1; order <= 20; ++order) {
        for (Mode mode : {Mode::P4bft, Mode::Soa}) {
          SimConfig c;
          c.topology = topo;
          c.fm = 2;
          c.byzantine = byz;
          c.mode = mode;
          c.send_jitter = 8;  // random arrival order at the processing node
          c.seed = derive_seed(order, mask);
          c.reassign_on_detection = false;
          const auto r = run(c);
          for (const auto& m : r.requests) {
            ++cases;
            if (!m.correct || m.applies != 1) ++failures;
            for (ControllerId f : m.reported_faulty) {
              if (std::find(byz.begin(), byz.end(), f) == byz.end()) ++wrongly_reported;
            }
            for (ControllerId b : byz) {
              if (std::find(m.reported_faulty.begin(), m.reported_faulty.end(), b) ==
                  m.reported_faulty.end()) {
                ++missed;
              }
            }
          }
        }
      }
    }
  }
  const double s = seconds_since(t0);
  return {failures == 0 && wrongly_reported == 0 && missed == 0 && s < 60.0,
          fmt("%zu requests: %zu bad deliveries, %zu correct replicas reported, %zu Byzantine "
              "replicas missed, %.2fs",
              cases, failures, wrongly_reported, missed, s)};
}

Outcome c6a_random128() {
  SweepConfig c;
  c.source = TopologySource::random(128, 4.0);
  c.controllers = 7;
  c.clusters = 3;
  c.placements = 200;
  c.seed = 1;
  const auto r = sweep(c);
  const double m = r.improvement.mean;
  return {std::abs(m - 0.332) <= 0.05,
          fmt("mean %.4f (target 0.332 +/- 0.05), range [%.3f, %.3f]; counting attachment hops "
              "%.4f",
              m, r.improvement.min, r.improvement.max, r.improvement_reported.mean)};
}

Outcome c6b_internet2() {
  SweepConfig c;
  c.source = TopologySource::of(internet2());
  c.controllers = 5;
  c.clusters = 2;
  c.placements = 10;
  c.seed = 7;
  const auto r = sweep(c);
  std::size_t outside = 0;
  for (const auto& p : r.placements) outside += p.improvement < 0.15 || p.improvement > 0.65;
  const double m = r.improvement.mean;
  return {outside == 0 && std::abs(m - 0.38) <= 0.07,
          fmt("mean %.4f (target 0.38 +/- 0.07), range [%.3f, %.3f], %zu of 10 outside "
              "[0.15, 0.65]",
              m, r.improvement.min, r.improvement.max, outside)};
}

double sweep_mean(const Topology& t, std::size_t controllers, std::size_t clusters) {
  SweepConfig c;
  c.source = TopologySource::of(t);
  c.controllers = controllers;
  c.clusters = clusters;
  c.placements = 200;
  c.seed = 77;  // paired across scenarios
  return sweep(c).improvement.mean;
}

Outcome c7_monotonicity() {
  bool ok = true;
  std::string got;
  for (const auto& [name, topo] :
       std::vector<std::pair<std::string, Topology>>{{"internet2", internet2()}, {"fat-tree", fat_tree(4)}}) {
    const double c3 = sweep_mean(topo, 3, 3), c7 = sweep_mean(topo, 7, 3), c17 = sweep_mean(topo, 17, 3);
    const double k1 = sweep_mean(topo, 17, 1), k7 = sweep_mean(topo, 17, 7), k17 = sweep_mean(topo, 17, 17);
    ok = ok && c3 <= c7 && c7 <= c17 && k1 >= k7 && k7 >= k17;
    got += fmt("%s controllers 3/7/17: %.3f %.3f %.3f, clusters 1/7/17: %.3f %.3f %.3f; ",
               name.c_str(), c3, c7, c17, k1, k7, k17);
  }
  return {ok, got};
}

Outcome c8_delay_properties() {
  SweepConfig c;
  c.source = TopologySource::of(internet2());
  c.controllers = 5;
  c.clusters = 2;
  c.placements = 10;
  c.request_count = 100;  // 1000 requests in total
  c.seed = 8;
  c.policy.weights = {0, 1};
  std::size_t requests = 0, differing = 0;
  for (const auto& p : sweep(c).placements) {
    for (std::size_t i = 0; i < p.p4bft.requests.size(); ++i) {
      ++requests;
      differing += p.p4bft.requests[i].delay != p.soa.requests[i].delay;
    }
  }
  c.policy.weights = {1, 0};
  c.request_count = 0;
  c.placements = 200;
  std::size_t negative = 0;
  double worst = 1.0;
  const auto r = sweep(c);
  for (const auto& p : r.placements) {
    negative += p.improvement < 0.0;
    worst = std::min(worst, p.improvement);
  }
  return {requests == 1000 && differing == 0 && negative == 0,
          fmt("(0,1): %zu/%zu requests with equal delay; (1,0): %zu of 200 placements negative, "
              "min %.4f",
              requests - differing, requests, negative, worst)};
}

Outcome c9_solver_scaling() {
  std::vector<double> times;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto t = random_topology(128, 4.0, 3, 7, derive_seed(9, seed));
    const auto p = make_problem(t);
    const auto t0 = Clock::now();
    const auto s = solve(p);
    times.push_back(seconds_since(t0));
    (void)s;
  }
  std::sort(times.begin(), times.end());
  const double median = (times[9] + times[10]) / 2;
  return {median < 5.0, fmt("median %.3fs, max %.3fs over 20 instances", median, times.back())};
}

Outcome c10_wire() {
  Rng rng(10);
  std::size_t lost = 0;
  for (int i = 0; i < 10000; ++i) {
    ControlPacket p;
    p.request_id = static_cast<std::uint32_t>(rng.next());
    p.controller_id = static_cast<std::uint16_t>(rng.next());
    p.destination = static_cast<std::uint16_t>(rng.next());
    p.payload.resize(rng.below(512));
    for (auto& b : p.payload) b = static_cast<std::uint8_t>(rng.next());
    if (rng.below(2)) p = sign(p, derive_switch_key(10, i));
    lost += !(decode(encode(p)) == p);
  }
  std::size_t vectors = 0, mismatched = 0;
  for (const auto& v : load_packet_vectors(std::string(P4BFT_SOURCE_DIR) +
                                           "/tests/data/packet_vectors.txt")) {
    ++vectors;
    const Bytes frame = from_hex(v.frame_hex);
    try {
      const auto p = decode(frame);
      mismatched += !v.expected || !(p == *v.expected) || encode(p) != frame;
    } catch (const Error& e) {
      mismatched += v.expected.has_value() || std::string(to_string(e.code())) != v.error;
    }
  }
  return {lost == 0 && vectors > 0 && mismatched == 0,
          fmt("%zu of 10000 round trips lossy; %zu/%zu vectors exact", lost, vectors - mismatched,
              vectors)};
}

Outcome c11_profiles() {
  SweepConfig c;
  c.source = TopologySource::of(internet2());
  c.controllers = 5;
  c.clusters = 2;
  c.placements = 10;
  c.request_count = 170;
  c.seed = 11;
  c.profile = DelayProfile::hardware_like();
  const auto hw = sweep(c);
  c.profile = DelayProfile::software_like();
  const auto sw = sweep(c);
  std::size_t requests = 0, dominated = 0;
  double hw_mean = 0, sw_mean = 0;
  for (std::size_t p = 0; p < hw.placements.size(); ++p) {
    const auto& a = hw.placements[p].p4bft.requests;
    const auto& b = sw.placements[p].p4bft.requests;
    for (std::size_t i = 0; i < a.size(); ++i) {
      ++requests;
      dominated += *b[i].delay > *a[i].delay;
      hw_mean += double(*a[i].delay);
      sw_mean += double(*b[i].delay);
    }
  }
  return {dominated == requests,
          fmt("software-like slower on %zu/%zu requests, mean %.1f vs %.1f ticks; absolute "
              "hardware timings are not modelled",
              dominated, requests, sw_mean / double(requests), hw_mean / double(requests))};
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* name;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria = {
      {"1", "five-switch reported footprint/delay for S4", c1_reported_metrics},
      {"2", "balanced weights choose S2 for S4", c2_selection},
      {"3", "five-switch frontier and baseline", c3_frontier},
      {"4", "min-cost flow matches brute force", c4_oracle},
      {"5", "protocol safety with up to two Byzantine replicas", c5_safety},
      {"6a", "random 128-switch improvement band", c6a_random128},
      {"6b", "Internet2 per-placement improvement band", c6b_internet2},
      {"7", "improvement trends in controllers and clusters", c7_monotonicity},
      {"8", "delay equality and non-negative footprint gain", c8_delay_properties},
      {"9", "exact solve time on 128 switches", c9_solver_scaling},
      {"10", "wire format round trip and vectors", c10_wire},
      {"11", "software-like delay dominates hardware-like", c11_profiles},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s criterion %-3s %s: %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
