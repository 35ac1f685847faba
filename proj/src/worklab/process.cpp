#include "worklab/process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <thread>

#include "worklab/error.hpp"
#include "worklab/numeric.hpp"

namespace worklab {

Process::Process(EnergyLevels initial, std::vector<ProcessStep> steps)
    : initial_(std::move(initial)), steps_(std::move(steps)) {
  for (const auto& s : steps_)
    if (is_lt(s) && std::get<LevelTransformation>(s).target.size() != initial_.size())
      fail(ErrorCode::invalid_argument,
           "level transformation target has the wrong dimension");
}

bool Process::is_normalized() const {
  for (std::size_t i = 1; i < steps_.size(); ++i)
    if (is_lt(steps_[i]) == is_lt(steps_[i - 1])) return false;
  return true;
}

std::size_t Process::lt_count() const {
  return static_cast<std::size_t>(std::count_if(steps_.begin(), steps_.end(), is_lt));
}

std::vector<EnergyLevels> Process::configurations() const {
  std::vector<EnergyLevels> out{initial_};
  out.reserve(steps_.size() + 1);
  for (const auto& s : steps_)
    out.push_back(is_lt(s) ? std::get<LevelTransformation>(s).target : out.back());
  return out;
}

nlohmann::json Process::to_json() const {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : steps_) {
    if (is_lt(s))
      steps.push_back({{"lt", std::get<LevelTransformation>(s).target.values()}});
    else
      steps.push_back("therm");
  }
  return {{"initial_levels", initial_.values()}, {"steps", steps}};
}

Process Process::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("initial_levels") || !j.contains("steps"))
    fail(ErrorCode::parse, "process needs \"initial_levels\" and \"steps\"");
  if (!j["steps"].is_array()) fail(ErrorCode::parse, "process steps must be an array");
  std::vector<ProcessStep> steps;
  for (const auto& s : j["steps"]) {
    if (s.is_string() && s.get<std::string>() == "therm")
      steps.emplace_back(Thermalization{});
    else if (s.is_object() && s.contains("lt"))
      steps.emplace_back(LevelTransformation{levels_from_json(s["lt"])});
    else
      fail(ErrorCode::parse, "process step must be \"therm\" or {\"lt\": [...]}");
  }
  return Process(levels_from_json(j["initial_levels"]), std::move(steps));
}

Process concatenate(const Process& a, const Process& b) {
  require(final_levels(a) == b.initial_levels(),
          "concatenated processes do not meet at the same levels");
  std::vector<ProcessStep> steps(a.steps());
  steps.insert(steps.end(), b.steps().begin(), b.steps().end());
  return Process(a.initial_levels(), std::move(steps));
}

Process normalize(const Process& p) {
  std::vector<ProcessStep> out;
  EnergyLevels current = p.initial_levels();
  std::optional<EnergyLevels> before_lt;  // set while out ends with an LT
  for (const auto& s : p.steps()) {
    if (is_lt(s)) {
      const auto& target = std::get<LevelTransformation>(s).target;
      if (before_lt) {
        out.pop_back();
        current = *before_lt;
        before_lt.reset();
      }
      if (target == current) continue;
      before_lt = current;
      out.emplace_back(LevelTransformation{target});
      current = target;
    } else {
      if (out.empty() || is_lt(out.back())) out.emplace_back(Thermalization{});
      before_lt.reset();
    }
  }
  return Process(p.initial_levels(), std::move(out));
}

EnergyLevels final_levels(const Process& p) {
  EnergyLevels current = p.initial_levels();
  for (const auto& s : p.steps())
    if (is_lt(s)) current = std::get<LevelTransformation>(s).target;
  return current;
}

Distribution final_state_distribution(const Process& p, const Distribution& q0,
                                      const Bath& bath) {
  require(q0.size() == p.dimension(), "initial distribution has the wrong dimension");
  EnergyLevels current = p.initial_levels();
  std::optional<EnergyLevels> last_therm;
  for (const auto& s : p.steps()) {
    if (is_lt(s))
      current = std::get<LevelTransformation>(s).target;
    else
      last_therm = current;
  }
  return last_therm ? gibbs(*last_therm, bath) : q0;
}

std::vector<WorkSegment> work_segments(const Process& p, const Distribution& q0,
                                       const Bath& bath) {
  require(q0.size() == p.dimension(), "initial distribution has the wrong dimension");
  const Process np = normalize(p);
  std::vector<WorkSegment> out;
  EnergyLevels current = np.initial_levels();
  std::vector<double> state = q0.probs();
  for (const auto& s : np.steps()) {
    if (is_lt(s)) {
      const auto& target = std::get<LevelTransformation>(s).target;
      WorkSegment seg{state, std::vector<double>(current.size())};
      for (std::size_t n = 0; n < current.size(); ++n)
        seg.increments[n] = target[n] - current[n];
      out.push_back(std::move(seg));
      current = target;
    } else {
      state = gibbs(current, bath).probs();
    }
  }
  return out;
}

nlohmann::json WorkDistribution::metadata() const {
  nlohmann::json j;
  j["provenance"] = provenance == Provenance::exact ? "exact" : "monte-carlo";
  j["atoms"] = law.size();
  if (provenance == Provenance::monte_carlo) {
    j["seed"] = seed;
    j["samples"] = sample_count;
    j["generator"] = generator;
  }
  return j;
}

namespace {

DiscreteRandomVariable segment_law(const WorkSegment& seg) {
  std::vector<Atom> atoms;
  for (std::size_t n = 0; n < seg.increments.size(); ++n)
    if (seg.state_probs[n] > 0.0) atoms.push_back({seg.increments[n], seg.state_probs[n]});
  return DiscreteRandomVariable::from_atoms(std::move(atoms));
}

}  // namespace

WorkDistribution exact_work_distribution(const Process& p, const Distribution& q0,
                                         const Bath& bath, std::size_t atom_cap) {
  auto law = DiscreteRandomVariable::point_mass(0.0);
  for (const auto& seg : work_segments(p, q0, bath))
    law = convolve(law, segment_law(seg), atom_cap);
  return WorkDistribution{std::move(law), Provenance::exact, 0, 0, {}};
}

WorkMoments exact_work_moments(const Process& p, const Distribution& q0,
                               const Bath& bath) {
  numeric::KahanSum mean, var;
  for (const auto& seg : work_segments(p, q0, bath)) {
    numeric::KahanSum m;
    for (std::size_t n = 0; n < seg.increments.size(); ++n)
      m.add(seg.state_probs[n] * seg.increments[n]);
    numeric::KahanSum v;
    for (std::size_t n = 0; n < seg.increments.size(); ++n) {
      const double d = seg.increments[n] - m.value();
      v.add(seg.state_probs[n] * d * d);
    }
    mean.add(m.value());
    var.add(v.value());
  }
  return {mean.value(), var.value()};
}

WorkDistribution sample_work(const Process& p, const Distribution& q0,
                             const Bath& bath, const SamplingOptions& opts) {
  require(opts.n_samples >= 1, "sample_work needs at least one sample");
  require(opts.chunk_size >= 1, "chunk size must be positive");
  const auto segments = work_segments(p, q0, bath);
  std::vector<std::vector<double>> cdfs;
  for (const auto& seg : segments) {
    std::vector<double> cdf(seg.state_probs.size());
    numeric::KahanSum acc;
    for (std::size_t n = 0; n < cdf.size(); ++n) {
      acc.add(seg.state_probs[n]);
      cdf[n] = acc.value();
    }
    cdfs.push_back(std::move(cdf));
  }

  const std::size_t n_chunks = (opts.n_samples + opts.chunk_size - 1) / opts.chunk_size;
  std::vector<std::vector<double>> results(n_chunks);
  auto run_chunk = [&](std::size_t c) {
    std::seed_seq seq{static_cast<std::uint32_t>(opts.seed),
                      static_cast<std::uint32_t>(opts.seed >> 32),
                      static_cast<std::uint32_t>(c)};
    std::mt19937_64 rng(seq);
    const std::size_t begin = c * opts.chunk_size;
    const std::size_t count = std::min(opts.chunk_size, opts.n_samples - begin);
    auto& out = results[c];
    out.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      double w = 0.0;
      for (std::size_t k = 0; k < segments.size(); ++k) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        const auto& cdf = cdfs[k];
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        std::size_t n = std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
        while (segments[k].state_probs[n] == 0.0 && n > 0) --n;
        w += segments[k].increments[n];
      }
      out[i] = w;
    }
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min(opts.jobs, n_chunks));
  if (jobs == 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < jobs; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t c = t; c < n_chunks; c += jobs) run_chunk(c);
      });
    for (auto& th : pool) th.join();
  }

  std::vector<double> values;
  values.reserve(opts.n_samples);
  for (const auto& r : results) values.insert(values.end(), r.begin(), r.end());
  std::sort(values.begin(), values.end());
  const double unit = 1.0 / static_cast<double>(opts.n_samples);
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < values.size();) {
    std::size_t j = i;
    while (j < values.size() && values[j] == values[i]) ++j;
    atoms.push_back({values[i], static_cast<double>(j - i) * unit});
    i = j;
  }
  return WorkDistribution{DiscreteRandomVariable::from_atoms(std::move(atoms)),
                          Provenance::monte_carlo, opts.seed, opts.n_samples,
                          kGeneratorName};
}

Process reverse(const Process& p) {
  const auto conf = p.configurations();
  const auto& steps = p.steps();
  std::vector<ProcessStep> out;
  out.reserve(steps.size());
  for (std::size_t j = steps.size(); j-- > 0;) {
    if (is_lt(steps[j]))
      out.emplace_back(LevelTransformation{conf[j]});
    else
      out.emplace_back(Thermalization{});
  }
  return Process(conf.back(), std::move(out));
}

std::size_t path_count(const Process& p, const Distribution& q0, const Bath& bath) {
  std::size_t count = 1;
  for (const auto& seg : work_segments(p, q0, bath)) {
    const auto support = static_cast<std::size_t>(std::count_if(
        seg.state_probs.begin(), seg.state_probs.end(), [](double x) { return x > 0.0; }));
    if (support != 0 && count > std::numeric_limits<std::size_t>::max() / support)
      return std::numeric_limits<std::size_t>::max();
    count *= support;
  }
  return count;
}

void enumerate_paths(const Process& p, const Distribution& q0, const Bath& bath,
                     const PathVisitor& visit, std::size_t path_cap) {
  const auto segments = work_segments(p, q0, bath);
  if (path_count(p, q0, bath) > path_cap)
    fail(ErrorCode::cap_exceeded,
         "path enumeration exceeds the cap of " + std::to_string(path_cap));
  std::vector<std::size_t> states(segments.size());
  std::function<void(std::size_t, double, double)> dfs =
      [&](std::size_t k, double prob, double work) {
        if (k == segments.size()) {
          visit(prob, work, states);
          return;
        }
        const auto& seg = segments[k];
        for (std::size_t n = 0; n < seg.state_probs.size(); ++n) {
          if (seg.state_probs[n] == 0.0) continue;
          states[k] = n;
          dfs(k + 1, prob * seg.state_probs[n], work + seg.increments[n]);
        }
      };
  dfs(0, 1.0, 0.0);
}

}  // namespace worklab
