#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "p4bft/sim.hpp"

namespace p4bft {

/// Network family a sweep draws placements on.
struct TopologySource {
  enum class Kind { Fixed, Random };
  Kind kind = Kind::Fixed;
  Topology fixed;            // Fixed: controllers are re-placed per placement
  std::size_t switches = 0;  // Random: a fresh graph per placement
  double degree = 4.0;

  static TopologySource of(Topology t) {
    TopologySource s;
    s.kind = Kind::Fixed;
    s.fixed = std::move(t);
    return s;
  }
  static TopologySource random(std::size_t n, double degree) {
    TopologySource s;
    s.kind = Kind::Random;
    s.switches = n;
    s.degree = degree;
    return s;
  }
};

struct SweepConfig {
  TopologySource source;
  std::size_t controllers = 5;
  std::size_t clusters = 2;
  std::size_t placements = 200;
  std::uint64_t seed = 1;
  std::optional<std::size_t> fm;  // default: (controllers - 1) / 2
  std::size_t fa = 0;
  PlacementPolicy policy;
  std::optional<double> coverage;
  std::size_t request_count = 0;
  DelayProfile profile;
  Tick send_jitter = 0;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct PlacementResult {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::vector<SwitchId> attachment;
  MetricsReport p4bft;
  MetricsReport soa;
  double improvement = 0.0;           // in-network hops
  double improvement_reported = 0.0;  // counting controller -> attachment hops
};

struct Summary {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct SweepResult {
  std::vector<PlacementResult> placements;  // by index
  Summary improvement;
  Summary improvement_reported;
};

inline Summary summarize(const std::vector<double>& v) {
  if (v.empty()) return {};
  Summary s{0.0, v.front(), v.front()};
  for (double x : v) {
    s.mean += x;
    s.min = std::min(s.min, x);
    s.max = std::max(s.max, x);
  }
  s.mean /= static_cast<double>(v.size());
  return s;
}

/// Empirical CDF as (value, F(value)) points, one per sample.
inline std::vector<std::pair<double, double>> cdf_points(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.emplace_back(v[i], static_cast<double>(i + 1) / static_cast<double>(v.size()));
  }
  return out;
}

inline SimConfig placement_config(const SweepConfig& c, std::size_t index) {
  const std::uint64_t seed = derive_seed(c.seed, index);
  SimConfig s;
  if (c.source.kind == TopologySource::Kind::Random) {
    s.topology = random_topology(c.source.switches, c.source.degree, c.clusters, c.controllers, seed);
  } else {
    Rng rng(seed);
    s.topology = place_controllers(c.source.fixed, c.controllers, c.clusters, rng);
  }
  s.fm = c.fm.value_or((c.controllers - 1) / 2);
  s.fa = c.fa;
  s.policy = c.policy;
  s.coverage = c.coverage;
  s.request_count = c.request_count;
  s.profile = c.profile;
  s.send_jitter = c.send_jitter;
  s.seed = seed;
  return s;
}

inline PlacementResult run_placement(const SweepConfig& c, std::size_t index) {
  SimConfig s = placement_config(c, index);
  PlacementResult r;
  r.index = index;
  r.seed = s.seed;
  r.attachment = s.topology.attachments();
  s.mode = Mode::P4bft;
  r.p4bft = run(s);
  s.mode = Mode::Soa;
  r.soa = run(s);
  r.improvement = improvement(r.p4bft, r.soa, FootprintConvention::InNetwork);
  r.improvement_reported = improvement(r.p4bft, r.soa, FootprintConvention::Reported);
  return r;
}

/// Paired p4bft/soa runs, one per placement. Runs share no state, so they
/// execute in parallel; results are ordered by placement index.
inline SweepResult sweep(const SweepConfig& c) {
  if (c.placements == 0) throw Error(Errc::InvalidConfig, "placements must be >= 1");
  SweepResult out;
  out.placements.resize(c.placements);
  unsigned threads = c.threads ? c.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, c.placements));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < c.placements; i = next++) {
      try {
        out.placements[i] = run_placement(c, i);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = c.placements;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::vector<double> imp, rep;
  for (const auto& p : out.placements) {
    imp.push_back(p.improvement);
    rep.push_back(p.improvement_reported);
  }
  out.improvement = summarize(imp);
  out.improvement_reported = summarize(rep);
  return out;
}

namespace detail {

inline std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace detail

inline std::string sweep_csv(const SweepResult& r) {
  std::string s =
      "placement,seed,footprint_p4bft,footprint_soa,in_network_p4bft,in_network_soa,"
      "improvement,improvement_reported,mean_delay_p4bft,mean_delay_soa,max_delay_p4bft,"
      "max_delay_soa,degraded\n";
  for (const auto& p : r.placements) {
    s += std::to_string(p.index) + ',' + std::to_string(p.seed) + ',' +
         std::to_string(p.p4bft.total_footprint) + ',' + std::to_string(p.soa.total_footprint) +
         ',' + std::to_string(p.p4bft.total_in_network_footprint) + ',' +
         std::to_string(p.soa.total_in_network_footprint) + ',' + detail::fixed(p.improvement) +
         ',' + detail::fixed(p.improvement_reported) + ',' + detail::fixed(p.p4bft.mean_delay) +
         ',' + detail::fixed(p.soa.mean_delay) + ',' + std::to_string(p.p4bft.max_delay) + ',' +
         std::to_string(p.soa.max_delay) + ',' + (p.p4bft.degraded || p.soa.degraded ? "1" : "0") +
         '\n';
  }
  return s;
}

inline std::string cdf_csv(const std::vector<std::pair<double, double>>& pts) {
  std::string s = "value,cdf\n";
  for (const auto& [v, f] : pts) s += detail::fixed(v) + ',' + detail::fixed(f) + '\n';
  return s;
}

}  // namespace p4bft
