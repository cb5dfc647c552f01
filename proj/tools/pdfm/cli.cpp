#include "cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include "manifest.hpp"
#include "pdfm/convergence.hpp"
#include "pdfm/diagram_io.hpp"
#include "pdfm/errors.hpp"
#include "pdfm/frechet.hpp"
#include "pdfm/grouping_io.hpp"
#include "pdfm/tangent_cone.hpp"
#include "pdfm/wasserstein.hpp"

namespace pdfm::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc{} ? std::string(buf, end) : std::to_string(x);
}

std::size_t brute_cap(std::size_t fallback) {
  const char* env = std::getenv("PDFM_BRUTE_CAP");
  if (env == nullptr || *env == '\0') return fallback;
  std::size_t v = 0;
  const char* last = env + std::char_traits<char>::length(env);
  auto [p, ec] = std::from_chars(env, last, v);
  if (ec != std::errc{} || p != last) throw UsageError(std::string("PDFM_BRUTE_CAP is not a count: ") + env);
  return v;
}

std::uint64_t fresh_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

struct Loaded {
  std::vector<PersistenceDiagram> diagrams;
  std::vector<fs::path> files;
};

Loaded load_dir(const fs::path& dir) {
  Loaded l;
  l.files = list_diagram_files(dir);
  if (l.files.empty()) throw ValidationError("no *.json diagrams in " + dir.string());
  for (const auto& f : l.files) {
    try {
      l.diagrams.push_back(load_diagram(f));
    } catch (const Error& e) {
      throw ParseError(f.string() + ": " + e.what());
    }
  }
  return l;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ParseError("cannot open " + p.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(p.string() + ": " + e.what());
  }
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream o(p);
  if (!o) throw ValidationError("cannot write " + p.string());
  o << j.dump(2) << '\n';
}

Grouping grouping_or_flat(const std::string& grouping_path, const std::vector<PersistenceDiagram>& diagrams,
                          std::vector<fs::path>& inputs) {
  if (!grouping_path.empty()) {
    inputs.emplace_back(grouping_path);
    return load_grouping(grouping_path, diagrams);
  }
  auto g = find_flat_grouping(diagrams);
  if (!g) throw ValidationError("no flat grouping found; pass --grouping");
  return *g;
}

struct Context {
  std::vector<std::string> args;
  std::ostream& out;
  std::ostream& err;
};

// ---- dist -----------------------------------------------------------------

struct DistOpts {
  std::string a, b, matching_out;
  bool oracle = false;
  bool json = false;
};

int run_dist(const DistOpts& o, Context& c) {
  const auto A = load_diagram(fs::path(o.a));
  const auto B = load_diagram(fs::path(o.b));
  const auto r = w2_distance(A, B);
  std::optional<BruteForceW2> bf;
  if (o.oracle) bf = brute_force_w2(A, B, brute_cap(kDefaultMatchingCap));

  const auto manifest = manifest_to_json(make_manifest(c.args, std::nullopt, {o.a, o.b}));
  if (!o.matching_out.empty()) {
    json mj = matching_to_json(A, B, r.matching);
    mj["manifest"] = manifest;
    write_json(o.matching_out, mj);
  }
  if (o.json) {
    json j = {{"distance", r.distance}, {"matching", matching_to_json(A, B, r.matching)}};
    if (bf) j["oracle"] = {{"distance", bf->distance}, {"optimal_count", bf->optimal_count}};
    j["manifest"] = manifest;
    c.out << j.dump(2) << '\n';
    return kOk;
  }
  c.out << num(r.distance) << '\n';
  if (bf) {
    c.out << "oracle: " << num(bf->distance) << '\n';
    c.out << "optimal_matchings: " << bf->optimal_count << '\n';
  }
  return kOk;
}

// ---- mean -----------------------------------------------------------------

struct MeanOpts {
  std::string dir, algorithm = "turner", init = "1", out_path;
  std::optional<std::uint64_t> seed;
  std::size_t max_iters = TurnerOptions{}.max_iters;
  bool json = false;
};

int run_mean(const MeanOpts& o, Context& c) {
  const auto in = load_dir(o.dir);
  const auto& D = in.diagrams;
  const auto cert = certify_unique_mean(D);

  json j;
  std::optional<std::uint64_t> seed = o.seed;
  if (o.algorithm == "brute") {
    const auto bf = brute_force_optimal_grouping(D, brute_cap(kDefaultGroupingCap));
    const auto mean = mean_diagram(bf.grouping);
    j = {{"algorithm", "brute"},
         {"mean", diagram_to_json(mean)},
         {"grouping", grouping_to_json(bf.grouping)},
         {"variance", bf.variance},
         {"optima_count", bf.optima_count}};
  } else {
    std::size_t init = 0;
    if (o.init == "random") {
      if (!seed) seed = fresh_seed();
      StreamRng rng(*seed);
      init = static_cast<std::size_t>(rng.below(D.size()));
    } else {
      std::size_t k = 0;
      auto [p, ec] = std::from_chars(o.init.data(), o.init.data() + o.init.size(), k);
      if (ec != std::errc{} || p != o.init.data() + o.init.size()) throw UsageError("--init expects k or random");
      if (k < 1 || k > D.size())
        throw RangeError("--init " + o.init + " outside 1.." + std::to_string(D.size()));
      init = k - 1;
    }
    TurnerOptions opts;
    opts.max_iters = o.max_iters;
    const auto r = turner_mean(D, init, opts);
    j = {{"algorithm", "turner"},
         {"mean", diagram_to_json(r.mean)},
         {"grouping", grouping_to_json(r.grouping)},
         {"variance", r.variance},
         {"iterations", r.iterations},
         {"converged", r.converged},
         {"init", r.init_descriptor},
         {"variance_trace", r.variance_trace},
         {"tie_detected", r.tie_detected},
         {"tie_check_complete", r.tie_check_complete}};
  }
  json cj = {{"unique", cert.has_value()}};
  if (cert) {
    cj["mean"] = diagram_to_json(cert->mean);
    cj["grouping"] = grouping_to_json(cert->grouping);
    cj["flatness"] = flatness_to_json(cert->report);
  }
  j["certificate"] = cj;
  j["manifest"] = manifest_to_json(make_manifest(c.args, seed, in.files));

  if (!o.out_path.empty()) write_json(o.out_path, j);
  if (o.json) {
    c.out << j.dump(2) << '\n';
    return kOk;
  }
  c.out << "algorithm: " << j["algorithm"].get<std::string>() << '\n';
  if (seed) c.out << "seed: " << *seed << '\n';
  if (j.contains("init")) {
    c.out << "init: " << j["init"].get<std::string>() << '\n';
    c.out << "iterations: " << j["iterations"].get<std::size_t>() << '\n';
    c.out << "converged: " << (j["converged"].get<bool>() ? "true" : "false") << '\n';
  } else {
    c.out << "optima: " << j["optima_count"].get<std::size_t>() << '\n';
  }
  c.out << "variance: " << num(j["variance"].get<double>()) << '\n';
  c.out << "unique: " << (cert ? "true" : "false") << '\n';
  c.out << "mean: " << j["mean"]["points"].dump() << '\n';
  return kOk;
}

// ---- variance -------------------------------------------------------------

struct VarianceOpts {
  std::string grouping, dir;
  bool json = false;
};

int run_variance(const VarianceOpts& o, Context& c) {
  const auto in = load_dir(o.dir);
  const auto g = load_grouping(o.grouping, in.diagrams);
  const double v = variance_definitional(g);
  const double cf = variance_closed_form(g);
  if (o.json) {
    auto files = in.files;
    files.emplace_back(o.grouping);
    json j = {{"variance", v},
              {"closed_form", cf},
              {"L", g.column_count()},
              {"K", g.row_count()},
              {"mean", diagram_to_json(mean_diagram(g))},
              {"manifest", manifest_to_json(make_manifest(c.args, std::nullopt, files))}};
    c.out << j.dump(2) << '\n';
    return kOk;
  }
  c.out << "variance: " << num(v) << '\n';
  c.out << "closed_form: " << num(cf) << '\n';
  return kOk;
}

// ---- flatness -------------------------------------------------------------

struct FlatnessOpts {
  std::string dir, grouping, emit;
  bool json = false;
};

int run_flatness(const FlatnessOpts& o, Context& c) {
  const auto in = load_dir(o.dir);
  auto files = in.files;
  std::optional<Grouping> g;
  if (!o.grouping.empty()) {
    files.emplace_back(o.grouping);
    g = load_grouping(o.grouping, in.diagrams);
  } else {
    g = find_flat_grouping(in.diagrams);
  }
  std::optional<FlatnessReport> report;
  if (g) report = check_flatness(*g);
  const bool flat = report && report->flat;
  const auto manifest = manifest_to_json(make_manifest(c.args, std::nullopt, files));

  if (!o.emit.empty() && flat) {
    json gj = grouping_to_json(*g);
    gj["manifest"] = manifest;
    write_json(o.emit, gj);
  }
  if (o.json) {
    json j = {{"flat", flat}};
    j["report"] = report ? flatness_to_json(*report) : json(nullptr);
    j["grouping"] = g ? grouping_to_json(*g) : json(nullptr);
    j["manifest"] = manifest;
    c.out << j.dump(2) << '\n';
    return kOk;
  }
  c.out << "flat: " << (flat ? "true" : "false") << '\n';
  if (report) {
    if (report->feasible_interval)
      c.out << "interval: (" << num(report->feasible_interval->lo) << ", " << num(report->feasible_interval->hi)
            << ")\n";
    if (report->witness_lambda) c.out << "lambda: " << num(*report->witness_lambda) << '\n';
    if (!report->reason.empty()) c.out << "reason: " << report->reason << '\n';
  } else {
    c.out << "reason: no candidate grouping\n";
  }
  if (!o.emit.empty() && !flat) c.err << "no flat grouping; " << o.emit << " not written\n";
  return kOk;
}

// ---- converge -------------------------------------------------------------

struct ConvergeOpts {
  std::string dir, grouping, out_path;
  std::vector<std::size_t> B{1, 2, 4, 8, 16, 32, 64};
  std::size_t trials = 10000;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  bool json = false;
};

int run_converge(const ConvergeOpts& o, Context& c) {
  const auto in = load_dir(o.dir);
  auto files = in.files;
  const Grouping g = grouping_or_flat(o.grouping, in.diagrams, files);

  ExperimentOptions eo;
  eo.trials = o.trials;
  const bool generated = !o.seed;
  eo.seed = o.seed ? *o.seed : fresh_seed();
  eo.threads = o.threads != 0 ? o.threads : std::max(1u, std::thread::hardware_concurrency());
  if (generated) c.err << "seed: " << eo.seed << '\n';

  const auto reports = convergence_experiment(g, o.B, eo);
  std::optional<double> slope;
  try {
    slope = rate_fit(reports);
  } catch (const ArityError&) {
  }
  const auto manifest = manifest_to_json(make_manifest(c.args, eo.seed, files));
  const std::string csv = reports_to_csv(reports);

  if (!o.out_path.empty()) {
    std::ofstream f(o.out_path, std::ios::binary);
    if (!f) throw ValidationError("cannot write " + o.out_path);
    f << csv;
    write_json(o.out_path + ".manifest.json", manifest);
  }
  if (o.json) {
    json rows = json::array();
    for (const auto& r : reports)
      rows.push_back({{"B", r.B},
                      {"trials", r.trials},
                      {"estimate", r.estimate},
                      {"std_error", r.std_error},
                      {"bound", r.bound},
                      {"seed", r.seed}});
    json j = {{"reports", rows}, {"manifest", manifest}};
    j["rate_slope"] = slope ? json(*slope) : json(nullptr);
    c.out << j.dump(2) << '\n';
    return kOk;
  }
  if (o.out_path.empty()) {
    c.out << csv;
  } else {
    c.out << "wrote " << o.out_path << '\n';
    if (slope) c.out << "rate_slope: " << num(*slope) << '\n';
  }
  return kOk;
}

// ---- hugging / barycheck --------------------------------------------------

struct HuggingOpts {
  std::string dir, weights, grouping;
  bool json = false;
};

std::vector<double> read_weights(const fs::path& p) {
  const json j = read_json(p);
  const json& w = j.is_object() ? j.at("weights") : j;
  if (!w.is_array()) throw ParseError(p.string() + ": weights must be an array");
  std::vector<double> out;
  for (const auto& x : w) {
    if (!x.is_number()) throw ParseError(p.string() + ": weights must be numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

int run_hugging(const HuggingOpts& o, Context& c) {
  const auto in = load_dir(o.dir);
  auto files = in.files;
  const Grouping g = grouping_or_flat(o.grouping, in.diagrams, files);
  files.emplace_back(o.weights);
  const auto weights = read_weights(o.weights);

  const auto z = mean_diagram(g);
  const auto y = lambda_mixture(g, weights);
  const auto h = hugging_equality_check(in.diagrams, z, y);
  json j = {{"lhs", h.lhs},
            {"rhs", h.rhs},
            {"residual", h.residual()},
            {"kappa", h.kappa},
            {"z", diagram_to_json(z)},
            {"y", diagram_to_json(y)},
            {"manifest", manifest_to_json(make_manifest(c.args, std::nullopt, files))}};
  c.out << j.dump(2) << '\n';
  return kOk;
}

struct BarycheckOpts {
  std::string dir, candidate, y;
  bool json = false;
};

PersistenceDiagram read_candidate(const fs::path& p) {
  const json j = read_json(p);
  try {
    if (j.is_object() && !j.contains("points") && j.contains("mean")) return diagram_from_json(j.at("mean"));
    return diagram_from_json(j);
  } catch (const Error& e) {
    throw ParseError(p.string() + ": " + e.what());
  }
}

int run_barycheck(const BarycheckOpts& o, Context& c) {
  const auto in = load_dir(o.dir);
  auto files = in.files;
  files.emplace_back(o.candidate);
  const auto cand = read_candidate(o.candidate);
  const double v = barycenter_equality_check(in.diagrams, cand);
  json j = {{"lhs", v}, {"rhs", 0.0}, {"residual", std::abs(v)}};
  if (!o.y.empty()) {
    files.emplace_back(o.y);
    j["one_sided"] = barycenter_one_sided(in.diagrams, cand, load_diagram(fs::path(o.y)));
  }
  j["manifest"] = manifest_to_json(make_manifest(c.args, std::nullopt, files));
  c.out << j.dump(2) << '\n';
  return kOk;
}

// ---- oracle ---------------------------------------------------------------

struct OracleOpts {
  std::vector<std::string> inputs;
  bool json = false;
};

int run_oracle(const OracleOpts& o, Context& c) {
  json j;
  std::vector<fs::path> files;
  if (o.inputs.size() == 2) {
    const auto A = load_diagram(fs::path(o.inputs[0]));
    const auto B = load_diagram(fs::path(o.inputs[1]));
    const auto bf = brute_force_w2(A, B, brute_cap(kDefaultMatchingCap));
    files = {o.inputs[0], o.inputs[1]};
    j = {{"kind", "matching"},
         {"distance", bf.distance},
         {"optimal_count", bf.optimal_count},
         {"matching", matching_to_json(A, B, bf.matching)}};
  } else if (o.inputs.size() == 1 && fs::is_directory(o.inputs[0])) {
    const auto in = load_dir(o.inputs[0]);
    files = in.files;
    const auto bf = brute_force_optimal_grouping(in.diagrams, brute_cap(kDefaultGroupingCap));
    j = {{"kind", "grouping"},
         {"variance", bf.variance},
         {"optima_count", bf.optima_count},
         {"grouping", grouping_to_json(bf.grouping)},
         {"mean", diagram_to_json(mean_diagram(bf.grouping))}};
  } else {
    throw UsageError("oracle expects A.json B.json or a diagram directory");
  }
  if (o.json) {
    j["manifest"] = manifest_to_json(make_manifest(c.args, std::nullopt, files));
    c.out << j.dump(2) << '\n';
    return kOk;
  }
  if (j["kind"] == "matching") {
    c.out << "distance: " << num(j["distance"].get<double>()) << '\n';
    c.out << "optimal_matchings: " << j["optimal_count"].get<std::size_t>() << '\n';
  } else {
    c.out << "variance: " << num(j["variance"].get<double>()) << '\n';
    c.out << "optimal_groupings: " << j["optima_count"].get<std::size_t>() << '\n';
    c.out << "mean: " << j["mean"]["points"].dump() << '\n';
  }
  return kOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Persistence diagram geometry under the 2-Wasserstein metric", "pdfm"};
  app.set_version_flag("--version", PDFM_VERSION);
  app.require_subcommand(1);

  DistOpts dist;
  auto* s_dist = app.add_subcommand("dist", "W2 distance and optimal matching between two diagrams");
  s_dist->add_option("A", dist.a, "first diagram")->required()->check(CLI::ExistingFile);
  s_dist->add_option("B", dist.b, "second diagram")->required()->check(CLI::ExistingFile);
  s_dist->add_flag("--oracle", dist.oracle, "cross-check with exhaustive enumeration");
  s_dist->add_option("--matching", dist.matching_out, "write the matching JSON here");
  s_dist->add_flag("--json", dist.json);

  MeanOpts mean;
  auto* s_mean = app.add_subcommand("mean", "Frechet mean of a directory of diagrams");
  s_mean->add_option("dir", mean.dir)->required()->check(CLI::ExistingDirectory);
  s_mean->add_option("--algorithm", mean.algorithm)->check(CLI::IsMember({"turner", "brute"}));
  s_mean->add_option("--init", mean.init, "1-based diagram index or 'random'");
  s_mean->add_option("--seed", mean.seed);
  s_mean->add_option("--max-iters", mean.max_iters)->check(CLI::PositiveNumber);
  s_mean->add_option("--out", mean.out_path, "write result JSON here");
  s_mean->add_flag("--json", mean.json);

  VarianceOpts var;
  auto* s_var = app.add_subcommand("variance", "variance of a grouping");
  s_var->add_option("grouping", var.grouping)->required()->check(CLI::ExistingFile);
  s_var->add_option("--diagrams", var.dir)->required()->check(CLI::ExistingDirectory);
  s_var->add_flag("--json", var.json);

  FlatnessOpts flat;
  auto* s_flat = app.add_subcommand("flatness", "search for (or check) a flat grouping");
  s_flat->add_option("dir", flat.dir)->required()->check(CLI::ExistingDirectory);
  s_flat->add_option("--grouping", flat.grouping, "check this grouping instead of searching")
      ->check(CLI::ExistingFile);
  s_flat->add_option("--emit-grouping", flat.emit, "write the flat grouping here");
  s_flat->add_flag("--json", flat.json);

  ConvergeOpts conv;
  auto* s_conv = app.add_subcommand("converge", "Monte Carlo check of E[W2^2] <= V/B");
  s_conv->add_option("dir", conv.dir)->required()->check(CLI::ExistingDirectory);
  s_conv->add_option("--grouping", conv.grouping, "population grouping (default: flat grouping)")
      ->check(CLI::ExistingFile);
  s_conv->add_option("--B", conv.B, "comma-separated sample sizes")->delimiter(',')->check(CLI::PositiveNumber);
  s_conv->add_option("--trials", conv.trials)->check(CLI::PositiveNumber);
  s_conv->add_option("--seed", conv.seed);
  s_conv->add_option("--threads", conv.threads, "worker threads (default: hardware)");
  s_conv->add_option("--out", conv.out_path, "CSV output path");
  s_conv->add_flag("--json", conv.json);

  HuggingOpts hug;
  auto* s_hug = app.add_subcommand("hugging", "hugging equality at the flat mean for a lambda-mixture y");
  s_hug->add_option("dir", hug.dir)->required()->check(CLI::ExistingDirectory);
  s_hug->add_option("--y", hug.weights, "weights JSON: [w1, ...] or {\"weights\": [...]}")
      ->required()
      ->check(CLI::ExistingFile);
  s_hug->add_option("--grouping", hug.grouping)->check(CLI::ExistingFile);
  s_hug->add_flag("--json", hug.json);

  BarycheckOpts bary;
  auto* s_bary = app.add_subcommand("barycheck", "barycenter equality at a candidate mean");
  s_bary->add_option("dir", bary.dir)->required()->check(CLI::ExistingDirectory);
  s_bary->add_option("--candidate", bary.candidate, "diagram JSON or mean result JSON")
      ->required()
      ->check(CLI::ExistingFile);
  s_bary->add_option("--y", bary.y, "also report the one-sided test for this diagram")->check(CLI::ExistingFile);
  s_bary->add_flag("--json", bary.json);

  OracleOpts orc;
  auto* s_orc = app.add_subcommand("oracle", "exhaustive matching or grouping oracle");
  s_orc->add_option("inputs", orc.inputs, "A.json B.json, or a directory")->required()->expected(1, 2);
  s_orc->add_flag("--json", orc.json);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  Context ctx{args, out, err};
  try {
    if (s_dist->parsed()) return run_dist(dist, ctx);
    if (s_mean->parsed()) return run_mean(mean, ctx);
    if (s_var->parsed()) return run_variance(var, ctx);
    if (s_flat->parsed()) return run_flatness(flat, ctx);
    if (s_conv->parsed()) return run_converge(conv, ctx);
    if (s_hug->parsed()) return run_hugging(hug, ctx);
    if (s_bary->parsed()) return run_barycheck(bary, ctx);
    if (s_orc->parsed()) return run_oracle(orc, ctx);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const CapExceededError& e) {
    err << "error: " << e.what() << " (set PDFM_BRUTE_CAP to raise the cap of " << e.cap() << ")\n";
    return kFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  err << app.help();
  return kUsage;
}

int dispatch(int argc, char** argv, std::ostream& out, std::ostream& err) {
  return dispatch(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace pdfm::cli
