#include "trilab/cli.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>

#include "trilab/counterex.hpp"
#include "trilab/csv.hpp"
#include "trilab/dist.hpp"
#include "trilab/graphs.hpp"
#include "trilab/nets.hpp"
#include "trilab/rare.hpp"
#include "trilab/rng.hpp"
#include "trilab/spectral.hpp"

namespace trilab {
namespace {

constexpr std::array<std::string_view, 10> kSubcommands = {
    "rate",           "identity-check", "spectrum", "net-verify", "bound",
    "tail-estimate",  "structure-report", "counterexample", "cramer", "hypergeo"};

// nan cells are normalized so negative nan never leaks a sign bit into CSV.
std::string cell(double x) {
  if (std::isnan(x)) return "nan";
  return format_double(x);
}

std::string bool_cell(bool b) { return b ? "true" : "false"; }

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// "value:prob,value:prob,..." -> finite-support mean-zero law.
EdgeDistribution parse_atom_list(const std::string& text) {
  std::vector<Atom> atoms;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == item.size())
      throw std::invalid_argument("--atoms expects value:prob pairs separated by commas");
    double value = 0.0, prob = 0.0;
    try {
      std::size_t used = 0;
      std::string v = item.substr(0, colon), p = item.substr(colon + 1);
      value = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(item);
      prob = std::stod(p, &used);
      if (used != p.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw std::invalid_argument("--atoms: cannot parse entry '" + item + "'");
    }
    atoms.push_back({value, prob});
  }
  if (atoms.empty()) throw std::invalid_argument("--atoms: no entries given");
  return EdgeDistribution::from_atoms(std::move(atoms));
}

// Exactly one of --q / --atoms selects the entry law; q is echoed in CSV
// rows and becomes nan for --atoms laws.
EdgeDistribution law_from_flags(const std::optional<double>& q, const std::string& atoms) {
  if (q && !atoms.empty())
    throw std::invalid_argument("pass either --q or --atoms, not both");
  if (q) return EdgeDistribution::centered_bernoulli(*q);
  if (!atoms.empty()) return parse_atom_list(atoms);
  throw std::invalid_argument("one of --q or --atoms is required");
}

double q_cell_value(const std::optional<double>& q) { return q ? *q : kNan; }

std::int64_t pair_count(int n) { return std::int64_t(n) * (n - 1) / 2; }

// ------------------------------------------------------------------ rate

struct RateArgs {
  std::vector<double> q;
  std::string atoms;
  std::string out = "-";
};

int run_rate(const RateArgs& args, std::ostream& csv, std::ostream&) {
  std::vector<std::pair<double, EdgeDistribution>> laws;
  if (!args.q.empty() && !args.atoms.empty())
    throw std::invalid_argument("pass either --q or --atoms, not both");
  if (args.q.empty() && args.atoms.empty())
    throw std::invalid_argument("one of --q or --atoms is required");
  for (double q : args.q) laws.emplace_back(q, EdgeDistribution::centered_bernoulli(q));
  if (!args.atoms.empty()) laws.emplace_back(kNan, parse_atom_list(args.atoms));

  std::vector<std::vector<std::string>> rows;
  for (const auto& [q, law] : laws) {
    RateFunctionResult two = rate_constant(law);
    PositiveRateResult one = rate_constant_positive(law);
    rows.push_back({cell(q), cell(two.rate_constant), cell(two.minimizer),
                    cell(two.subg_constant), cell(two.duality_residual),
                    cell(one.rate_constant), cell(one.minimizer)});
  }

  CsvWriter w(csv);
  w.header({"q", "rate_constant", "minimizer", "subg_constant", "duality_residual",
            "one_sided_rate_constant", "one_sided_minimizer"});
  for (const auto& row : rows) w.line(row);
  return 0;
}

// -------------------------------------------------------- identity-check

struct IdentityArgs {
  int n = 0;
  std::int64_t m = 0;
  std::int64_t samples = 100;
  std::uint64_t seed = 0;
  std::optional<std::int64_t> a;
  std::optional<std::int64_t> b;
  std::string out = "-";
};

int run_identity_check(const IdentityArgs& args, std::ostream& csv, std::ostream&) {
  if (args.n < 2) throw std::invalid_argument("identity-check needs --n >= 2");
  if (args.m < 0 || args.m > pair_count(args.n))
    throw std::invalid_argument("--m must lie in [0, n(n-1)/2]");
  if (args.samples < 1) throw std::invalid_argument("--samples must be positive");
  if (args.a.has_value() != args.b.has_value())
    throw std::invalid_argument("--a and --b must be given together");
  const std::int64_t a = args.a ? *args.a : 2 * args.m;
  const std::int64_t b = args.b ? *args.b : std::int64_t(args.n) * (args.n - 1);
  if (b < 1 || a < 0 || a > b)
    throw std::invalid_argument("--a/--b must satisfy 0 <= a <= b with b >= 1");

  CsvWriter w(csv);
  w.header({"sample", "n", "m", "a", "b", "residual", "inequality_holds",
            "degree_condition_holds"});
  for (std::int64_t i = 0; i < args.samples; ++i) {
    Rng rng = Rng::for_replica(args.seed, static_cast<std::uint64_t>(i));
    Graph g = Graph::sample_gnm(args.n, args.m, rng);
    CenteringIdentity id = centering_identity(g, a, b);
    CenteringInequality ineq = centering_inequality(g);
    w.line({std::to_string(i), std::to_string(args.n), std::to_string(args.m),
            std::to_string(a), std::to_string(b), id.residual.str(),
            bool_cell(ineq.inequality_holds), bool_cell(ineq.degree_condition_holds)});
  }
  return 0;
}

// ------------------------------------------------------------- spectrum

struct SpectrumArgs {
  int n = 0;
  std::optional<double> p;
  std::optional<std::int64_t> m;
  std::int64_t samples = 1;
  std::uint64_t seed = 0;
  double cap = 0.8;
  std::string out = "-";
};

int run_spectrum(const SpectrumArgs& args, std::ostream& csv, std::ostream&) {
  if (args.n < 2) throw std::invalid_argument("spectrum needs --n >= 2");
  if (args.p.has_value() == args.m.has_value())
    throw std::invalid_argument("pass exactly one of --p (edge probability) or --m (edge count)");
  if (args.p && (*args.p < 0.0 || *args.p > 1.0))
    throw std::invalid_argument("--p must lie in [0, 1]");
  if (args.m && (*args.m < 0 || *args.m > pair_count(args.n)))
    throw std::invalid_argument("--m must lie in [0, n(n-1)/2]");
  if (args.samples < 1) throw std::invalid_argument("--samples must be positive");
  if (!(args.cap > 0.0)) throw std::invalid_argument("--cap must be positive");

  const double density =
      args.p ? *args.p : 2.0 * double(*args.m) / (double(args.n) * (args.n - 1));
  const double threshold = -std::sqrt(args.cap * args.n);

  CsvWriter w(csv);
  w.header({"sample", "n", "p", "lambda_min", "lambda_second_min", "lambda_max",
            "cubic_statistic", "extreme_count", "extreme_cube_sum", "bulk_cube_sum"});
  for (std::int64_t i = 0; i < args.samples; ++i) {
    Rng rng = Rng::for_replica(args.seed, static_cast<std::uint64_t>(i));
    Graph g = args.p ? Graph::sample_gnp(args.n, *args.p, rng)
                     : Graph::sample_gnm(args.n, *args.m, rng);
    std::vector<double> ev = eigenvalues_desc(g.centered_adjacency(density));
    SpectrumSplit split = split_spectrum(ev, threshold);
    w.line({std::to_string(i), std::to_string(args.n), cell(density), cell(ev.back()),
            cell(ev[ev.size() - 2]), cell(ev.front()),
            cell(spectral_cubic_statistic(ev, args.cap)),
            std::to_string(split.extreme.size()), cell(split.extreme_cube_sum),
            cell(split.bulk_cube_sum)});
  }
  return 0;
}

// ------------------------------------------------------------ net-verify

struct NetVerifyArgs {
  std::string kind;
  std::optional<int> dim;
  std::optional<int> n;
  std::optional<int> k;
  double eps = 0.0;
  std::int64_t draws = 10000;
  std::uint64_t seed = 0;
  int threads = 1;
  std::size_t max_elements = 1000000;
  std::string out = "-";
};

int run_net_verify(const NetVerifyArgs& args, std::ostream& csv, std::ostream& summary) {
  if (args.draws < 1) throw std::invalid_argument("--draws must be positive");
  if (args.threads < 1) throw std::invalid_argument("--threads must be positive");
  NetConfig cfg;
  cfg.max_elements = args.max_elements;
  // Certificate draws use seed+1 so they are disjoint from the streams that
  // built the net.
  const std::uint64_t verify_seed = args.seed + 1;

  CoveringReport report;
  std::size_t net_size = 0, factor_count = 0;
  int dim_col = 0, k_col = 0;
  if (args.kind == "euclid") {
    if (!args.dim) throw std::invalid_argument("--kind euclid needs --dim");
    if (args.n || args.k)
      throw std::invalid_argument("--kind euclid takes --dim, not --n/--k");
    EuclideanNet net = euclidean_net(*args.dim, args.eps, args.seed, cfg);
    report = verify_euclidean_covering(net, static_cast<std::size_t>(args.draws),
                                       verify_seed, args.threads);
    net_size = net.points.size();
    dim_col = *args.dim;
  } else {
    if (!args.n || !args.k)
      throw std::invalid_argument("--kind " + args.kind + " needs --n and --k");
    if (args.dim)
      throw std::invalid_argument("--kind " + args.kind + " takes --n/--k, not --dim");
    MatrixNet net = args.kind == "rank"
                        ? rank_k_net(*args.n, *args.k, args.eps, args.seed, cfg)
                        : psd_rank_k_net(*args.n, *args.k, args.eps, args.seed, cfg);
    report = verify_matrix_covering(net, static_cast<std::size_t>(args.draws),
                                    verify_seed, args.threads);
    net_size = net.size();
    factor_count = net.factor_count();
    dim_col = *args.n;
    k_col = *args.k;
  }

  CsvWriter w(csv);
  w.header({"kind", "dim", "k", "eps", "net_size", "draws", "max_distance", "covered"});
  w.line({args.kind, std::to_string(dim_col), std::to_string(k_col), cell(args.eps),
          std::to_string(net_size), std::to_string(args.draws), cell(report.max_distance),
          bool_cell(report.covered)});

  char line[256];
  if (factor_count > 0)
    std::snprintf(line, sizeof(line), "net: kind=%s n=%d k=%d eps=%g size=%zu (%zu factors)\n",
                  args.kind.c_str(), dim_col, k_col, args.eps, net_size, factor_count);
  else
    std::snprintf(line, sizeof(line), "net: kind=%s dim=%d eps=%g size=%zu\n",
                  args.kind.c_str(), dim_col, args.eps, net_size);
  summary << line;
  std::snprintf(line, sizeof(line),
                "certificate: draws=%lld worst_nearest_distance=%.6g covered=%s\n",
                static_cast<long long>(args.draws), report.max_distance,
                report.covered ? "yes" : "NO");
  summary << line;
  return 0;
}

// ----------------------------------------------------------------- bound

struct BoundArgs {
  std::optional<double> q;
  std::string atoms;
  std::vector<double> t;
  std::optional<int> n;
  std::optional<int> k;
  std::optional<double> eps;
  std::optional<double> cap;
  double constant = 1.0;
  std::string out = "-";
};

int run_bound(const BoundArgs& args, std::ostream& csv, std::ostream&) {
  EdgeDistribution law = law_from_flags(args.q, args.atoms);
  if (args.t.empty()) throw std::invalid_argument("--t requires at least one level");
  const bool threshold_mode = args.cap.has_value();
  if (threshold_mode && (args.n || args.k || args.eps))
    throw std::invalid_argument("--cap excludes --n/--k/--eps");
  if (!threshold_mode && (!args.n || !args.k))
    throw std::invalid_argument("rank mode needs --n and --k (or pass --cap)");
  UnionBoundConfig cfg{args.constant};

  const double qcell = q_cell_value(args.q);
  std::vector<std::vector<std::string>> rows;
  for (double t : args.t) {
    double scalar = hoeffding_tail_log_bound(law, t);
    if (threshold_mode) {
      double u = union_upper_log_bound_threshold(law, t, *args.cap, cfg);
      rows.push_back({cell(qcell), "threshold", cell(kNan), cell(kNan), cell(kNan),
                      cell(*args.cap), cell(t), cell(scalar), cell(u)});
    } else {
      double eps = args.eps.value_or(0.0);
      double u = union_upper_log_bound(law, *args.n, *args.k, t, eps, cfg);
      rows.push_back({cell(qcell), "rank", cell(double(*args.n)), cell(double(*args.k)),
                      cell(eps), cell(kNan), cell(t), cell(scalar), cell(u)});
    }
  }

  CsvWriter w(csv);
  w.header({"q", "mode", "n", "k", "eps", "cap", "t", "scalar_log_bound",
            "union_log_bound"});
  for (const auto& row : rows) w.line(row);
  return 0;
}

// --------------------------------------------------------- tail-estimate

struct TailArgs {
  int n = 0;
  std::optional<double> p;
  std::optional<std::int64_t> m;
  std::optional<double> t;
  std::optional<double> quantile;
  std::int64_t samples = 0;
  std::int64_t calibration_samples = 0;
  std::string estimator = "both";
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out = "-";
};

int run_tail_estimate(const TailArgs& args, std::ostream& csv, std::ostream& summary,
                      std::ostream& err) {
  if (args.p.has_value() == args.m.has_value())
    throw std::invalid_argument("pass exactly one of --p (edge probability) or --m (edge count)");
  if (args.t.has_value() == args.quantile.has_value())
    throw std::invalid_argument("pass exactly one of --t or --quantile");
  const GraphModel model = args.p ? GraphModel::gnp : GraphModel::gnm;
  const double m_or_p = args.p ? *args.p : double(*args.m);

  double t = 0.0;
  if (args.t) {
    t = *args.t;
  } else {
    // Calibration draws use seed+1; the estimate's replica streams stay
    // untouched.
    std::int64_t calib = args.calibration_samples > 0 ? args.calibration_samples : args.samples;
    t = deficit_quantile(model, args.n, m_or_p, *args.quantile, calib, args.seed + 1,
                         args.threads);
  }

  std::vector<Estimator> kinds;
  if (args.estimator == "naive" || args.estimator == "both") kinds.push_back(Estimator::naive);
  if (args.estimator == "tilted" || args.estimator == "both") kinds.push_back(Estimator::tilted);

  std::vector<std::pair<const char*, TailEstimate>> results;
  for (Estimator kind : kinds) {
    TailEstimate est = kind == Estimator::naive
                           ? naive_tail_estimate(model, args.n, m_or_p, t, args.samples,
                                                 args.seed, args.threads)
                           : tilted_tail_estimate(model, args.n, m_or_p, t, args.samples,
                                                  args.seed, args.threads);
    results.emplace_back(kind == Estimator::naive ? "naive" : "tilted", est);
  }

  CsvWriter w(csv);
  w.header({"model", "n", "m_or_p", "t", "estimator", "log_prob", "stderr", "ess",
            "theoretical_exponent", "seed", "log_prob_lower"});
  std::vector<std::string> degenerate_kinds;
  for (const auto& [name, est] : results) {
    w.line({model == GraphModel::gnp ? "gnp" : "gnm", std::to_string(args.n), cell(m_or_p),
            cell(t), name, cell(est.log_prob), cell(est.stderr_log),
            cell(est.effective_sample_size), cell(est.theoretical_exponent),
            std::to_string(args.seed),
            cell(est.log_prob_lower ? *est.log_prob_lower : kNan)});
    char line[320];
    std::snprintf(line, sizeof(line),
                  "%s: log_prob=%.6g stderr=%.3g ess=%.6g predicted_exponent=%.6g%s\n", name,
                  est.log_prob, est.stderr_log, est.effective_sample_size,
                  est.theoretical_exponent, est.degenerate ? " DEGENERATE" : "");
    summary << line;
    if (est.log_prob_lower) {
      std::snprintf(line, sizeof(line),
                    "%s: edge-count-conditioned bracket lower end %.6g\n", name,
                    *est.log_prob_lower);
      summary << line;
    }
    if (est.degenerate) degenerate_kinds.push_back(name);
  }

  if (!degenerate_kinds.empty()) {
    err << "error: degenerate-estimate: no usable hits for";
    for (const auto& k : degenerate_kinds) err << ' ' << k;
    err << " (raise --samples or lower --t)\n";
    return 4;
  }
  return 0;
}

// ------------------------------------------------------ structure-report

struct StructureArgs {
  int n = 0;
  std::optional<double> p;
  std::optional<std::int64_t> m;
  double quantile = 0.0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  int threads = 1;
  double cap = 0.8;
  std::string out = "-";
};

int run_structure_report(const StructureArgs& args, std::ostream& csv, std::ostream& summary,
                         std::ostream& err) {
  if (args.p.has_value() == args.m.has_value())
    throw std::invalid_argument("pass exactly one of --p (edge probability) or --m (edge count)");
  const GraphModel model = args.p ? GraphModel::gnp : GraphModel::gnm;
  const double m_or_p = args.p ? *args.p : double(*args.m);

  StructureReport r = conditional_structure_report(model, args.n, m_or_p, args.quantile,
                                                   args.samples, args.seed, args.threads,
                                                   args.cap);

  const std::array<std::pair<const char*, Quartiles>, 5> stats = {{
      {"min_eigenvalue_share", r.min_eigenvalue_share},
      {"second_eigenvalue_share", r.second_eigenvalue_share},
      {"extreme_share", r.extreme_share},
      {"bulk_share", r.bulk_share},
      {"degree_statistic", r.degree_statistic},
  }};

  CsvWriter w(csv);
  w.header({"model", "n", "m_or_p", "quantile", "pilot_samples", "rejection_samples",
            "accepted", "threshold_deficit", "spectral_cap", "statistic", "q25", "median",
            "q75"});
  for (const auto& [name, quart] : stats) {
    w.line({model == GraphModel::gnp ? "gnp" : "gnm", std::to_string(args.n), cell(m_or_p),
            cell(args.quantile), std::to_string(r.pilot_samples),
            std::to_string(r.rejection_samples), std::to_string(r.accepted),
            cell(r.threshold_deficit), cell(r.spectral_cap),
            name, cell(r.degenerate ? kNan : quart.q25),
            cell(r.degenerate ? kNan : quart.median), cell(r.degenerate ? kNan : quart.q75)});
  }

  char line[256];
  std::snprintf(line, sizeof(line),
                "conditioned structure: accepted=%lld/%lld threshold_deficit=%.6g cap=%g\n",
                static_cast<long long>(r.accepted),
                static_cast<long long>(r.rejection_samples), r.threshold_deficit, args.cap);
  summary << line;
  std::snprintf(line, sizeof(line), "%-26s %10s %10s %10s\n", "statistic", "q25", "median",
                "q75");
  summary << line;
  for (const auto& [name, quart] : stats) {
    std::snprintf(line, sizeof(line), "%-26s %10.4f %10.4f %10.4f\n", name, quart.q25,
                  quart.median, quart.q75);
    summary << line;
  }

  if (r.degenerate) {
    err << "error: degenerate-estimate: no sample crossed the deficit threshold "
           "(raise --samples or use a milder --quantile)\n";
    return 4;
  }
  return 0;
}

// -------------------------------------------------------- counterexample

struct CounterexampleArgs {
  std::optional<double> q;
  std::string atoms;
  std::vector<double> eps;
  std::vector<double> delta;
  std::string out = "-";
};

int run_counterexample(const CounterexampleArgs& args, std::ostream& csv,
                       std::ostream& summary) {
  EdgeDistribution law = law_from_flags(args.q, args.atoms);
  if (args.eps.empty() != args.delta.empty())
    throw std::invalid_argument("--eps and --delta grids must be given together");
  EtaSearchResult res = args.eps.empty() ? default_eta_search(law)
                                         : search_eta(law, args.eps, args.delta);

  CsvWriter w(csv);
  w.header({"q", "eps", "delta", "rate_value", "baseline", "eta"});
  const double qcell = q_cell_value(args.q);
  for (const EtaRow& row : res.rows)
    w.line({cell(qcell), cell(row.eps), cell(row.delta), cell(row.rate_value),
            cell(row.baseline), cell(row.eta)});

  char line[256];
  std::snprintf(line, sizeof(line),
                "eta search: %zu grid points evaluated, %lld outside the tilt domain\n",
                res.rows.size(), static_cast<long long>(res.skipped));
  summary << line;
  std::snprintf(line, sizeof(line), "best eta=%.6g at eps=%.6g delta=%.6g\n", res.best_eta,
                res.best_eps, res.best_delta);
  summary << line;
  summary << (res.best_eta > 0.0
                  ? "the block construction dips below the quadratic baseline\n"
                  : "no dip below the quadratic baseline on this grid\n");
  return 0;
}

// ---------------------------------------------------------------- cramer

struct CramerArgs {
  std::optional<double> q;
  std::string atoms;
  double s = 0.0;
  std::vector<std::int64_t> m;
  std::string out = "-";
};

int run_cramer(const CramerArgs& args, std::ostream& csv, std::ostream&) {
  EdgeDistribution law = law_from_flags(args.q, args.atoms);
  if (args.m.empty()) throw std::invalid_argument("--m requires at least one copy count");
  const double qcell = q_cell_value(args.q);
  std::vector<std::vector<std::string>> rows;
  for (std::int64_t m : args.m) {
    CramerCheck c = cramer_check(law, m, args.s);
    rows.push_back({cell(qcell), std::to_string(m), cell(args.s), cell(c.empirical),
                    cell(c.limit), cell(c.gap)});
  }

  CsvWriter w(csv);
  w.header({"q", "m", "s", "empirical", "limit", "gap"});
  for (const auto& row : rows) w.line(row);
  return 0;
}

// -------------------------------------------------------------- hypergeo

struct HypergeoArgs {
  std::vector<std::int64_t> population;
  std::vector<std::int64_t> successes;
  std::int64_t trials = 0;
  std::int64_t value = 0;
  std::string out = "-";
};

int run_hypergeo(const HypergeoArgs& args, std::ostream& csv, std::ostream&) {
  if (args.population.empty()) throw std::invalid_argument("--population requires at least one size");
  if (args.successes.size() != 1 && args.successes.size() != args.population.size())
    throw std::invalid_argument("--successes takes one value or one per population size");
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < args.population.size(); ++i) {
    std::int64_t succ = args.successes.size() == 1 ? args.successes[0] : args.successes[i];
    double gap = hypergeo_binom_gap(args.population[i], succ, args.trials, args.value);
    rows.push_back({std::to_string(args.population[i]), std::to_string(succ),
                    std::to_string(args.trials), std::to_string(args.value), cell(gap)});
  }

  CsvWriter w(csv);
  w.header({"population", "successes", "trials", "value", "gap"});
  for (const auto& row : rows) w.line(row);
  return 0;
}

// ------------------------------------------------------------- plumbing

// CSV goes to `--out` (default stdout).  When a file is given the summary
// stream is stdout; when the CSV occupies stdout the summary moves to
// stderr so stdout stays machine readable.
struct CsvTarget {
  std::ofstream file;
  std::ostream* csv = nullptr;
  std::ostream* summary = nullptr;
};

CsvTarget open_target(const std::string& path, std::ostream& out, std::ostream& err) {
  CsvTarget t;
  if (path == "-") {
    t.csv = &out;
    t.summary = &err;
    return t;
  }
  t.file.open(path, std::ios::binary);
  if (!t.file) throw std::invalid_argument("cannot open output file '" + path + "'");
  t.csv = &t.file;
  t.summary = &out;
  return t;
}

void add_common(CLI::App* sub, std::string& out_path) {
  sub->add_option("--out", out_path, "CSV destination path, '-' for stdout")
      ->capture_default_str();
  // The config option lives on the root app (the library reads config files
  // only there); fallthrough lets '<sub> --config file' reach it.
  sub->fallthrough();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{
      "Numerical laboratory for lower-tail triangle deviations in random graphs.\n"
      "Each subcommand writes CSV (header row first) to --out, '-' meaning stdout.\n"};
  app.footer(
      "Exit codes: 0 success, 2 unknown subcommand, 3 invalid configuration or\n"
      "parameter domain, 4 degenerate estimate. Failures print a single line\n"
      "'error: <category>: <message>' to stderr.\n\n"
      "Stochastic subcommands require an explicit --seed; replica i of a run\n"
      "draws from an independent generator derived from (seed, i), so output\n"
      "is byte-identical for every --threads value. Helper stages that need\n"
      "separate randomness (quantile calibration, covering draws) use seed+1.\n"
      "Options may come from a --config TOML/INI file holding one\n"
      "[subcommand] section per subcommand (or dotted keys such as\n"
      "rate.q=0.25); command-line flags override the file and environment\n"
      "variables are never consulted.");
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "TOML/INI file with [subcommand] sections of option defaults "
                 "(command-line flags win)");

  RateArgs rate_args;
  CLI::App* rate_cmd = app.add_subcommand(
      "rate", "Variational rate constants of a centered entry law");
  rate_cmd->add_option("--q", rate_args.q,
                       "Bernoulli density q in (0,1); repeat or comma-separate for "
                       "several rows")
      ->delimiter(',');
  rate_cmd->add_option("--atoms", rate_args.atoms,
                       "general mean-zero law as value:prob pairs, e.g. 0.5:0.5,-0.5:0.5");
  add_common(rate_cmd, rate_args.out);
  rate_cmd->footer(
      "CSV columns: q,rate_constant,minimizer,subg_constant,duality_residual,\n"
      "  one_sided_rate_constant,one_sided_minimizer\n"
      "rate_constant = inf_s legendre(s)/s^2 with its minimizer (0 when the\n"
      "s->0 limit wins); subg_constant = sup_s cgf(s)/s^2; duality_residual =\n"
      "|4*subg*rate - 1|; the one_sided pair restricts the infimum to s > 0.\n"
      "Rows built from --atoms print nan in the q column. Deterministic.");

  IdentityArgs id_args;
  CLI::App* id_cmd = app.add_subcommand(
      "identity-check", "Exact cubic-trace centering identity on sampled graphs");
  id_cmd->add_option("--n", id_args.n, "vertex count (>= 2)")->required();
  id_cmd->add_option("--m", id_args.m, "edge count of the sampled G(n,m)")->required();
  id_cmd->add_option("--samples", id_args.samples, "number of graphs")
      ->capture_default_str();
  id_cmd->add_option("--seed", id_args.seed, "PRNG seed (required, no wall-clock default)")
      ->required();
  id_cmd->add_option("--a", id_args.a, "numerator of a custom centering density a/b");
  id_cmd->add_option("--b", id_args.b, "denominator of a custom centering density a/b");
  add_common(id_cmd, id_args.out);
  id_cmd->footer(
      "CSV columns: sample,n,m,a,b,residual,inequality_holds,degree_condition_holds\n"
      "The identity is evaluated in exact integer arithmetic at density a/b\n"
      "(default: the graph's own density 2m/(n(n-1))); residual must be 0 on\n"
      "every row. inequality_holds checks the degree-variance relaxation at\n"
      "the graph's own density. Sample i uses generator stream (seed, i).");

  SpectrumArgs spec_args;
  CLI::App* spec_cmd = app.add_subcommand(
      "spectrum", "Eigenvalue statistics of centered adjacency matrices");
  spec_cmd->add_option("--n", spec_args.n, "vertex count (>= 2)")->required();
  CLI::Option* spec_p = spec_cmd->add_option("--p", spec_args.p, "edge probability for G(n,p)");
  CLI::Option* spec_m = spec_cmd->add_option("--m", spec_args.m, "edge count for G(n,m)");
  spec_p->excludes(spec_m);
  spec_m->excludes(spec_p);
  spec_cmd->add_option("--samples", spec_args.samples, "number of graphs")
      ->capture_default_str();
  spec_cmd->add_option("--seed", spec_args.seed, "PRNG seed (required)")->required();
  spec_cmd->add_option("--cap", spec_args.cap,
                       "cap K of the capped cubic; the extreme/bulk split sits at "
                       "-sqrt(K n)")
      ->capture_default_str();
  add_common(spec_cmd, spec_args.out);
  spec_cmd->footer(
      "CSV columns: sample,n,p,lambda_min,lambda_second_min,lambda_max,\n"
      "  cubic_statistic,extreme_count,extreme_cube_sum,bulk_cube_sum\n"
      "Eigenvalues are those of A - pJ + pI with p the given probability or\n"
      "the G(n,m) density. cubic_statistic = (1/n) sum g(lambda_i/sqrt(n))\n"
      "with g the two-sided capped cubic. Sample i uses stream (seed, i).");

  NetVerifyArgs net_args;
  CLI::App* net_cmd = app.add_subcommand(
      "net-verify", "Build a covering net and certify it by random draws");
  net_cmd->add_option("--kind", net_args.kind, "euclid | rank | psd")
      ->required()
      ->check(CLI::IsMember({"euclid", "rank", "psd"}));
  net_cmd->add_option("--dim", net_args.dim, "ball dimension (euclid)");
  net_cmd->add_option("--n", net_args.n, "matrix order (rank/psd)");
  net_cmd->add_option("--k", net_args.k, "rank bound (rank/psd)");
  net_cmd->add_option("--eps", net_args.eps, "covering radius")->required();
  net_cmd->add_option("--draws", net_args.draws, "certificate sample count")
      ->capture_default_str();
  net_cmd->add_option("--seed", net_args.seed, "PRNG seed (required)")->required();
  net_cmd->add_option("--threads", net_args.threads, "worker threads for the certificate")
      ->capture_default_str();
  net_cmd->add_option("--max-elements", net_args.max_elements,
                      "refuse nets predicted to exceed this element count")
      ->capture_default_str();
  add_common(net_cmd, net_args.out);
  net_cmd->footer(
      "CSV columns: kind,dim,k,eps,net_size,draws,max_distance,covered\n"
      "dim echoes --dim (euclid) or --n (rank/psd); k is 0 for euclid.\n"
      "covered=true means the worst nearest-net distance over all draws is\n"
      "at most eps. Construction uses --seed, certificate draws use seed+1;\n"
      "output does not depend on --threads. A summary is printed to stdout\n"
      "(stderr when the CSV itself occupies stdout).");

  BoundArgs bound_args;
  CLI::App* bound_cmd = app.add_subcommand(
      "bound", "Tail log-bounds for bilinear forms in centered entries");
  bound_cmd->add_option("--q", bound_args.q, "Bernoulli density q in (0,1)");
  bound_cmd->add_option("--atoms", bound_args.atoms, "general law as value:prob pairs");
  bound_cmd->add_option("--t", bound_args.t, "deviation levels (comma-separated)")
      ->required()
      ->delimiter(',');
  bound_cmd->add_option("--n", bound_args.n, "matrix order (rank mode)");
  bound_cmd->add_option("--k", bound_args.k, "rank bound (rank mode)");
  bound_cmd->add_option("--eps", bound_args.eps,
                        "net radius; omit to use the optimized radius");
  bound_cmd->add_option("--cap", bound_args.cap,
                        "spectral threshold K > 1; switches to threshold mode");
  bound_cmd->add_option("--constant", bound_args.constant,
                        "absolute constant in the entropy term")
      ->capture_default_str();
  add_common(bound_cmd, bound_args.out);
  bound_cmd->footer(
      "CSV columns: q,mode,n,k,eps,cap,t,scalar_log_bound,union_log_bound\n"
      "scalar_log_bound = -(t^2/2) * one_sided_rate, the fixed-direction\n"
      "bound. union_log_bound covers the supremum over the rank-k ball (rank\n"
      "mode, needs --n/--k, requires t^2 L > 2nk) or the threshold variant\n"
      "(--cap). Inapplicable columns print nan. Deterministic.");

  TailArgs tail_args;
  CLI::App* tail_cmd = app.add_subcommand(
      "tail-estimate", "Monte Carlo lower-tail probability of the triangle count");
  tail_cmd->add_option("--n", tail_args.n, "vertex count")->required();
  CLI::Option* tail_p = tail_cmd->add_option("--p", tail_args.p, "edge probability for G(n,p)");
  CLI::Option* tail_m = tail_cmd->add_option("--m", tail_args.m, "edge count for G(n,m)");
  tail_p->excludes(tail_m);
  tail_m->excludes(tail_p);
  CLI::Option* tail_t =
      tail_cmd->add_option("--t", tail_args.t, "deficit level in density units");
  CLI::Option* tail_qu = tail_cmd->add_option(
      "--quantile", tail_args.quantile,
      "calibrate t as this upper-tail mass of the unconditioned deficit");
  tail_t->excludes(tail_qu);
  tail_qu->excludes(tail_t);
  tail_cmd->add_option("--samples", tail_args.samples, "Monte Carlo sample count")
      ->required();
  tail_cmd->add_option("--calibration-samples", tail_args.calibration_samples,
                       "draws for --quantile calibration (default: --samples)");
  tail_cmd->add_option("--estimator", tail_args.estimator, "naive | tilted | both")
      ->capture_default_str()
      ->check(CLI::IsMember({"naive", "tilted", "both"}));
  tail_cmd->add_option("--seed", tail_args.seed, "PRNG seed (required)")->required();
  tail_cmd->add_option("--threads", tail_args.threads, "worker threads")
      ->capture_default_str();
  add_common(tail_cmd, tail_args.out);
  tail_cmd->footer(
      "CSV columns: model,n,m_or_p,t,estimator,log_prob,stderr,ess,\n"
      "  theoretical_exponent,seed,log_prob_lower\n"
      "Estimates ln P(triangle density <= reference - t); the reference is a\n"
      "pilot mean over streams shared by both estimators, so naive and tilted\n"
      "target the same event. theoretical_exponent is the predicted size of\n"
      "-log_prob. log_prob_lower is the edge-count-conditioned bracket end for\n"
      "G(n,m) tilted runs and nan otherwise. Replica i uses stream (seed, i);\n"
      "--quantile calibration uses seed+1; output is independent of --threads.\n"
      "Exit 4 with a diagnostic when an estimator sees no usable hits.");

  StructureArgs struct_args;
  CLI::App* struct_cmd = app.add_subcommand(
      "structure-report", "Spectral structure of graphs conditioned on a deficit");
  struct_cmd->add_option("--n", struct_args.n, "vertex count")->required();
  CLI::Option* struct_p =
      struct_cmd->add_option("--p", struct_args.p, "edge probability for G(n,p)");
  CLI::Option* struct_m =
      struct_cmd->add_option("--m", struct_args.m, "edge count for G(n,m)");
  struct_p->excludes(struct_m);
  struct_m->excludes(struct_p);
  struct_cmd->add_option("--quantile", struct_args.quantile,
                         "tail mass of the conditioning event, in (0,1)")
      ->required();
  struct_cmd->add_option("--samples", struct_args.samples,
                         "pilot draws and rejection draws, each")
      ->required();
  struct_cmd->add_option("--seed", struct_args.seed, "PRNG seed (required)")->required();
  struct_cmd->add_option("--threads", struct_args.threads, "worker threads")
      ->capture_default_str();
  struct_cmd->add_option("--cap", struct_args.cap,
                         "extreme/bulk split threshold parameter K; split at -sqrt(K n)")
      ->capture_default_str();
  add_common(struct_cmd, struct_args.out);
  struct_cmd->footer(
      "CSV columns: model,n,m_or_p,quantile,pilot_samples,rejection_samples,\n"
      "  accepted,threshold_deficit,spectral_cap,statistic,q25,median,q75\n"
      "One row per statistic: min_eigenvalue_share, second_eigenvalue_share,\n"
      "extreme_share, bulk_share (cube shares of the sample's own deficit)\n"
      "and degree_statistic. Quartiles print nan when nothing was accepted\n"
      "(exit 4). A summary table goes to stdout (stderr when the CSV itself\n"
      "occupies stdout). Replica i uses stream (seed, i).");

  CounterexampleArgs cx_args;
  CLI::App* cx_cmd = app.add_subcommand(
      "counterexample", "Grid search for a dip below the quadratic-baseline rate");
  cx_cmd->add_option("--q", cx_args.q, "Bernoulli density q in (0,1)");
  cx_cmd->add_option("--atoms", cx_args.atoms, "general law as value:prob pairs");
  cx_cmd->add_option("--eps", cx_args.eps, "explicit eps grid (comma-separated)")
      ->delimiter(',');
  cx_cmd->add_option("--delta", cx_args.delta, "explicit delta grid (comma-separated)")
      ->delimiter(',');
  add_common(cx_cmd, cx_args.out);
  cx_cmd->footer(
      "CSV columns: q,eps,delta,rate_value,baseline,eta\n"
      "One row per admissible grid point, grid order; eta = 1 - rate/baseline\n"
      "with baseline = 1/(2 Var), so eta > 0 exhibits a law whose three-block\n"
      "rate expression drops below the quadratic approximation. Omitting\n"
      "--eps/--delta uses the built-in coupled grids. Deterministic; a\n"
      "summary with the best point goes to stdout (stderr when the CSV\n"
      "occupies stdout). Rows from --atoms print nan in the q column.");

  CramerArgs cramer_args;
  CLI::App* cramer_cmd = app.add_subcommand(
      "cramer", "Exact i.i.d.-sum tail versus its large-m limit");
  cramer_cmd->add_option("--q", cramer_args.q, "Bernoulli density q in (0,1)");
  cramer_cmd->add_option("--atoms", cramer_args.atoms, "general law as value:prob pairs");
  cramer_cmd->add_option("--s", cramer_args.s, "per-copy threshold, inside the open hull")
      ->required();
  cramer_cmd->add_option("--m", cramer_args.m, "copy counts (comma-separated)")
      ->required()
      ->delimiter(',');
  add_common(cramer_cmd, cramer_args.out);
  cramer_cmd->footer(
      "CSV columns: q,m,s,empirical,limit,gap\n"
      "empirical = (1/m) ln P(sum of m copies > m s) by exact enumeration;\n"
      "limit = -legendre(s); gap = |empirical - limit| and shrinks as m\n"
      "grows. Deterministic. Rows from --atoms print nan in the q column.");

  HypergeoArgs hyp_args;
  CLI::App* hyp_cmd = app.add_subcommand(
      "hypergeo", "Hypergeometric versus binomial log-pmf gap, exact arithmetic");
  hyp_cmd->add_option("--population", hyp_args.population,
                      "population sizes (comma-separated)")
      ->required()
      ->delimiter(',');
  hyp_cmd->add_option("--successes", hyp_args.successes,
                      "success counts, one value or one per population size")
      ->required()
      ->delimiter(',');
  hyp_cmd->add_option("--trials", hyp_args.trials, "number of draws without replacement")
      ->required();
  hyp_cmd->add_option("--value", hyp_args.value, "pmf evaluation point")->required();
  add_common(hyp_cmd, hyp_args.out);
  hyp_cmd->footer(
      "CSV columns: population,successes,trials,value,gap\n"
      "gap = |ln P(H = value) - ln P(B = value)| with H hypergeometric and B\n"
      "binomial(trials, successes/population), both in exact rational\n"
      "arithmetic; identical distributions (trials = 1) give exactly 0.\n"
      "Deterministic.");

  // Locate the subcommand token, allowing a leading '--config FILE' pair.
  std::size_t scan = 0;
  if (scan < args.size() && args[scan] == "--config")
    scan += 2;
  else if (scan < args.size() && args[scan].rfind("--config=", 0) == 0)
    scan += 1;
  if (scan >= args.size()) {
    err << "error: unknown-subcommand: no subcommand given; expected one of";
    for (auto s : kSubcommands) err << ' ' << s;
    err << '\n';
    return 2;
  }
  if (args[scan] == "--help" || args[scan] == "-h") {
    out << app.help();
    return 0;
  }
  if (std::find(kSubcommands.begin(), kSubcommands.end(), args[scan]) ==
      kSubcommands.end()) {
    err << "error: unknown-subcommand: '" << args[scan] << "'; expected one of";
    for (auto s : kSubcommands) err << ' ' << s;
    err << '\n';
    return 2;
  }

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("trilab");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());

    if (rate_cmd->parsed()) {
      CsvTarget t = open_target(rate_args.out, out, err);
      return run_rate(rate_args, *t.csv, *t.summary);
    }
    if (id_cmd->parsed()) {
      CsvTarget t = open_target(id_args.out, out, err);
      return run_identity_check(id_args, *t.csv, *t.summary);
    }
    if (spec_cmd->parsed()) {
      CsvTarget t = open_target(spec_args.out, out, err);
      return run_spectrum(spec_args, *t.csv, *t.summary);
    }
    if (net_cmd->parsed()) {
      CsvTarget t = open_target(net_args.out, out, err);
      return run_net_verify(net_args, *t.csv, *t.summary);
    }
    if (bound_cmd->parsed()) {
      CsvTarget t = open_target(bound_args.out, out, err);
      return run_bound(bound_args, *t.csv, *t.summary);
    }
    if (tail_cmd->parsed()) {
      CsvTarget t = open_target(tail_args.out, out, err);
      return run_tail_estimate(tail_args, *t.csv, *t.summary, err);
    }
    if (struct_cmd->parsed()) {
      CsvTarget t = open_target(struct_args.out, out, err);
      return run_structure_report(struct_args, *t.csv, *t.summary, err);
    }
    if (cx_cmd->parsed()) {
      CsvTarget t = open_target(cx_args.out, out, err);
      return run_counterexample(cx_args, *t.csv, *t.summary);
    }
    if (cramer_cmd->parsed()) {
      CsvTarget t = open_target(cramer_args.out, out, err);
      return run_cramer(cramer_args, *t.csv, *t.summary);
    }
    if (hyp_cmd->parsed()) {
      CsvTarget t = open_target(hyp_args.out, out, err);
      return run_hypergeo(hyp_args, *t.csv, *t.summary);
    }
    err << "error: unknown-subcommand: nothing parsed\n";
    return 2;
  } catch (const CLI::CallForHelp&) {
    CLI::App* deepest = &app;
    while (!deepest->get_subcommands().empty())
      deepest = deepest->get_subcommands().front();
    out << deepest->help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: invalid-config: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    err << "error: invalid-config: " << e.what() << '\n';
    return 3;
  } catch (const std::domain_error& e) {
    err << "error: invalid-config: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace trilab
