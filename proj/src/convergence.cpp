#include "pdfm/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <thread>

#include "pdfm/errors.hpp"
#include "pdfm/wasserstein.hpp"

namespace pdfm {

StreamRng::StreamRng(std::uint64_t seed, std::uint64_t stream_a, std::uint64_t stream_b) {
  auto lo = [](std::uint64_t x) { return static_cast<std::uint32_t>(x); };
  auto hi = [](std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), lo(stream_a), hi(stream_a), lo(stream_b), hi(stream_b)};
  engine_.seed(seq);
}

std::uint64_t StreamRng::below(std::uint64_t n) {
  // Reject the low residue class so every value has equal weight.
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = next();
    if (r >= threshold) return r % n;
  }
}

InducedSample induced_from_draws(const Grouping& population, std::span<const std::size_t> draws) {
  const std::size_t L = population.column_count();
  std::vector<PersistenceDiagram> sampled;
  sampled.reserve(draws.size());
  for (std::size_t d : draws) {
    if (d >= L) throw RangeError("induced_from_draws: draw " + std::to_string(d) + " out of range");
    sampled.push_back(population.diagrams()[d]);
  }
  std::vector<std::vector<Cell>> rows;
  rows.reserve(population.nontrivial_row_count());
  for (std::size_t i = 0; i < population.nontrivial_row_count(); ++i) {
    std::vector<Cell> row;
    row.reserve(draws.size());
    for (std::size_t d : draws) row.push_back(population.row(i)[d]);
    rows.push_back(std::move(row));
  }
  InducedSample s;
  s.draws.assign(draws.begin(), draws.end());
  s.grouping = Grouping(std::move(sampled), std::move(rows));
  s.mean = mean_diagram(s.grouping);
  return s;
}

InducedSample sample_induced_mean(const Grouping& population, std::size_t B, StreamRng& rng) {
  if (B == 0) throw RangeError("sample_induced_mean: B must be at least 1");
  if (population.column_count() == 0) throw ArityError("sample_induced_mean: empty population");
  std::vector<std::size_t> draws(B);
  for (auto& d : draws) d = static_cast<std::size_t>(rng.below(population.column_count()));
  return induced_from_draws(population, draws);
}

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

std::vector<ConvergenceReport> convergence_experiment(const Grouping& population, std::span<const std::size_t> B_list,
                                                      const ExperimentOptions& options) {
  if (options.trials == 0) throw RangeError("convergence_experiment: trials must be at least 1");
  const PersistenceDiagram population_mean = mean_diagram(population);
  const double sigma2 = variance_definitional(population);

  std::vector<ConvergenceReport> reports;
  for (std::size_t B : B_list) {
    std::vector<double> sq(options.trials);
    auto run = [&](std::size_t begin, std::size_t end) {
      for (std::size_t t = begin; t < end; ++t) {
        StreamRng rng(options.seed, B, t);
        const auto sample = sample_induced_mean(population, B, rng);
        sq[t] = w2_squared(sample.mean, population_mean);
      }
    };

    const std::size_t workers = std::clamp<std::size_t>(options.threads, 1, options.trials);
    if (workers == 1) {
      run(0, options.trials);
    } else {
      std::vector<std::jthread> pool;
      const std::size_t chunk = (options.trials + workers - 1) / workers;
      for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(options.trials, begin + chunk);
        if (begin < end) pool.emplace_back(run, begin, end);
      }
    }

    ConvergenceReport r;
    r.B = B;
    r.trials = options.trials;
    r.seed = options.seed;
    r.bound = sigma2 / static_cast<double>(B);
    const double n = static_cast<double>(options.trials);
    r.estimate = pairwise_sum(sq) / n;
    if (options.trials > 1) {
      std::vector<double> dev(sq.size());
      std::transform(sq.begin(), sq.end(), dev.begin(), [&](double x) { return (x - r.estimate) * (x - r.estimate); });
      r.std_error = std::sqrt(pairwise_sum(dev) / (n - 1.0) / n);
    }
    if (options.keep_per_trial) r.per_trial = std::move(sq);
    reports.push_back(std::move(r));
  }
  return reports;
}

double rate_fit(std::span<const ConvergenceReport> reports) {
  std::vector<double> xs, ys;
  std::set<std::size_t> distinct;
  for (const auto& r : reports) {
    if (!(r.estimate > 0.0) || r.B == 0) continue;
    xs.push_back(std::log(static_cast<double>(r.B)));
    ys.push_back(std::log(r.estimate));
    distinct.insert(r.B);
  }
  if (distinct.size() < 3) {
    throw ArityError("rate_fit: need at least 3 distinct B values with positive estimates, have " +
                     std::to_string(distinct.size()));
  }
  const double n = static_cast<double>(xs.size());
  const double mx = pairwise_sum(xs) / n;
  const double my = pairwise_sum(ys) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

std::string reports_to_csv(std::span<const ConvergenceReport> reports) {
  std::ostringstream out;
  out.precision(17);
  out << "B,trials,estimate,std_error,bound,seed\n";
  for (const auto& r : reports) {
    out << r.B << ',' << r.trials << ',' << r.estimate << ',' << r.std_error << ',' << r.bound << ',' << r.seed << '\n';
  }
  return out.str();
}

}  // namespace pdfm
