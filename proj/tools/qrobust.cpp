// qrobust command-line tool: generate, solve, flatten, bench, profile.
//
// Exit codes: 0 ok, 2 usage or input error, 3 resource or time limit,
// 4 internal inconsistency.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>

#include "CLI11.hpp"
#include "qrobust/qrobust.hpp"

namespace {

using namespace qrobust;

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kLimit = 3;
constexpr int kInternal = 4;

struct ExitError {
  int code;
  std::string message;
};

std::string read_text(const std::string& path) {
  std::ostringstream ss;
  if (path == "-") {
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ExitError{kUsage, "cannot open " + path};
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw ExitError{kUsage, "cannot write " + path};
}

QipInstance load(const std::string& path) {
  const std::string text = read_text(path);
  try {
    return parse_qlp(text);
  } catch (const ParseError& e) {
    throw ExitError{kUsage, path + ": " + e.what()};
  } catch (const SemanticError& e) {
    throw ExitError{kUsage, path + ": " + e.what()};
  }
}

struct GenerateOpts {
  std::string family;
  std::string model = "qippu";
  std::optional<int> n, p, T, N, B, U;
  std::optional<Int> alpha, beta, capacity;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out;
  std::string params;
};

// Fills options not given on the command line from a key=value file.
void apply_params_file(GenerateOpts& o) {
  std::istringstream in(read_text(o.params));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = detail::trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    const std::string where = o.params + ":" + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) throw ExitError{kUsage, where + "expected key = value"};
    const std::string key = detail::trim(line.substr(0, eq));
    long long v = 0;
    try {
      v = detail::parse_int(detail::trim(line.substr(eq + 1)));
    } catch (const std::invalid_argument& e) {
      throw ExitError{kUsage, where + e.what()};
    }
    auto fill = [&](auto& slot) {
      if (!slot) slot = static_cast<std::remove_reference_t<decltype(*slot)>>(v);
    };
    if (key == "n") fill(o.n);
    else if (key == "p") fill(o.p);
    else if (key == "T") fill(o.T);
    else if (key == "N") fill(o.N);
    else if (key == "B") fill(o.B);
    else if (key == "U") fill(o.U);
    else if (key == "alpha") fill(o.alpha);
    else if (key == "beta") fill(o.beta);
    else if (key == "capacity") fill(o.capacity);
    else if (key == "seed") {
      if (v < 0) throw ExitError{kUsage, where + "negative seed"};
      if (!o.seed_given) o.seed = static_cast<std::uint64_t>(v);
    } else {
      throw ExitError{kUsage, where + "unknown key '" + key + "'"};
    }
  }
}

int run_generate(GenerateOpts o) {
  if (!o.params.empty()) apply_params_file(o);
  QipInstance q;
  try {
    if (o.family == "sel") {
      SelectionParams p;
      if (o.n) p.n = *o.n;
      p.p = o.p ? *o.p : p.n / 2;
      if (o.T) p.T = *o.T;
      if (o.N) p.N = *o.N;
      p.seed = o.seed;
      q = o.model == "qippu" ? build_selection_qip_pu(p)
          : o.model == "qip" ? build_selection_qip(p)
                             : build_selection_dep(p).model;
    } else if (o.family == "ass") {
      AssignmentParams p;
      if (o.n) p.n = *o.n;
      if (o.T) p.T = *o.T;
      if (o.N) p.N = *o.N;
      p.seed = o.seed;
      q = o.model == "qippu" ? build_assignment_qip_pu(p)
          : o.model == "qip" ? build_assignment_qip(p)
                             : build_assignment_dep(p).model;
    } else if (o.family == "lot") {
      if (o.model == "qippu") throw ExitError{kUsage, "lot-sizing has no qippu model; use qip or dep"};
      LotSizingParams p;
      if (o.B) p.B = *o.B;
      if (o.U) p.U = *o.U;
      if (o.T) p.T = *o.T;
      p.seed = o.seed;
      q = o.model == "qip" ? build_lot_sizing_qip(p) : build_lot_sizing_dep(p).model;
    } else {
      if (o.model == "qip") throw ExitError{kUsage, "knapsack has no qip model; use qippu or dep"};
      KnapsackParams p;
      if (o.n) p.n = *o.n;
      if (o.T) p.T = *o.T;
      p.seed = o.seed;
      p.alpha = o.alpha;
      p.beta = o.beta;
      p.capacity = o.capacity;
      q = o.model == "qippu" ? build_knapsack_qip_pu(p) : build_knapsack_dep(p).model;
    }
  } catch (const std::invalid_argument& e) {
    throw ExitError{kUsage, std::string("invalid parameters: ") + e.what()};
  }
  write_text(o.out, write_qlp(q));
  return kOk;
}

struct SolveOpts {
  std::string in;
  std::int64_t time_limit_ms = 60000;
  bool oracle = false;
  bool no_bounds = false;
  std::string ordering = "objective";
  std::string solver = "alphabeta";
};

std::string first_stage_text(const QipInstance& q, const std::vector<int>& vars, const std::vector<Int>& vals) {
  std::ostringstream os;
  for (std::size_t k = 0; k < vars.size() && k < vals.size(); ++k) {
    if (k > 0) os << ' ';
    os << q.var_names[vars[k]] << '=' << vals[k];
  }
  return os.str();
}

int run_solve(const SolveOpts& o) {
  const QipInstance q = load(o.in);
  SearchConfig cfg;
  cfg.time_limit_ms = o.time_limit_ms;
  cfg.bounds_enabled = !o.no_bounds;
  cfg.ordering = o.ordering == "domain" ? MoveOrdering::DomainAscending : MoveOrdering::ObjectiveGuided;

  SolveStatus status;
  std::optional<Value> value;
  bool is_bound = false;
  std::uint64_t nodes = 0;
  std::int64_t ms = 0;
  std::string first;
  try {
    if (o.solver == "bnb") {
      const MipResult r = solve_mip(q, cfg);
      status = r.status;
      value = r.value;
      is_bound = r.value_is_bound;
      nodes = r.nodes;
      ms = r.elapsed_ms;
      if (!r.assignment.empty() && !q.blocks.empty()) {
        std::ostringstream os;
        bool sep = false;
        for (int v : q.blocks[0].vars) {
          os << (sep ? " " : "") << q.var_names[v] << '=' << r.assignment[v].str();
          sep = true;
        }
        first = os.str();
      }
    } else {
      const SolveResult r = solve(q, cfg);
      status = r.status;
      value = r.value;
      is_bound = r.value_is_bound;
      nodes = r.nodes;
      ms = r.elapsed_ms;
      first = first_stage_text(q, r.first_stage_vars, r.first_stage);
    }
  } catch (const ModelContractError& e) {
    throw ExitError{kUsage, e.what()};
  }

  std::cout << "status: " << to_string(status) << '\n';
  if (status == SolveStatus::Optimal) {
    std::cout << "value: " << value->str() << '\n';
    std::cout << "first_stage: " << first << '\n';
  } else if (status == SolveStatus::TimeLimit) {
    std::cout << "bound: " << (value && is_bound ? value->str() : std::string("none")) << '\n';
  }
  std::cout << "nodes: " << nodes << '\n';
  std::cout << "time_ms: " << ms << '\n';
  if (status == SolveStatus::TimeLimit) return kLimit;

  if (o.oracle) {
    SolveResult ref;
    try {
      ref = oracle_solve(q);
    } catch (const TreeTooLarge& e) {
      throw ExitError{kLimit, std::string("oracle: ") + e.what()};
    }
    const bool agree = ref.status == status && (status != SolveStatus::Optimal || *ref.value == *value);
    std::cout << "oracle: " << to_string(ref.status);
    if (ref.status == SolveStatus::Optimal) std::cout << ' ' << ref.value->str();
    std::cout << (agree ? " (agrees)" : " (MISMATCH)") << '\n';
    if (!agree) return kInternal;
  }
  return kOk;
}

int run_flatten(const std::string& in, const std::string& out, double cap) {
  const QipInstance q = load(in);
  MipInstance m;
  std::size_t leaves = 0;
  try {
    const auto c = static_cast<std::size_t>(cap);
    leaves = enumerate_scenarios(q, c).leaves.size();
    m = flatten(q, c);
  } catch (const ScenarioExplosion& e) {
    throw ExitError{kLimit, e.what()};
  } catch (const ModelContractError& e) {
    throw ExitError{kUsage, e.what()};
  }
  write_text(out, write_qlp(m));
  std::ostream& info = (out.empty() || out == "-") ? std::cerr : std::cout;
  info << "leaves: " << leaves << '\n';
  info << "variables: " << m.num_vars() << '\n';
  info << "constraints: " << m.model.existential_rows.size() << '\n';
  return kOk;
}

int run_bench(const std::string& grid_path, const std::string& out, unsigned jobs, std::optional<std::int64_t> limit) {
  GridSpec g;
  try {
    g = parse_grid(read_text(grid_path));
    if (limit) g.time_limit_ms = *limit;
  } catch (const std::invalid_argument& e) {
    throw ExitError{kUsage, grid_path + ": " + e.what()};
  }
  std::vector<BenchRecord> records;
  try {
    records = run_grid(g, jobs);
  } catch (const std::invalid_argument& e) {
    throw ExitError{kUsage, e.what()};
  }
  write_text(out, emit_csv(records));
  std::size_t errors = 0;
  for (const auto& r : records)
    if (r.status == BenchStatus::Error) ++errors;
  std::cerr << records.size() << " records, " << errors << " errors\n";
  return errors == 0 ? kOk : kInternal;
}

int run_profile(const std::string& in, const std::string& csv, const std::string& svg,
                const std::vector<std::string>& solvers, std::int64_t unit) {
  std::vector<BenchRecord> records;
  ProfileTable t;
  try {
    records = parse_csv(read_text(in));
    t = performance_profile(records, solvers, unit);
  } catch (const MismatchedInstanceSets& e) {
    throw ExitError{kUsage, std::string("mismatched instance sets: ") + e.what()};
  } catch (const std::invalid_argument& e) {
    throw ExitError{kUsage, in + ": " + e.what()};
  }
  write_text(csv, emit_csv(t));
  if (!svg.empty()) write_text(svg, emit_svg(t));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantified integer programs with polyhedral uncertainty"};
  app.require_subcommand(1);

  GenerateOpts gen;
  auto* g = app.add_subcommand("generate", "Write a generated instance as .qlp");
  g->add_option("--params", gen.params, "key=value file with defaults for n, p, T, N, B, U, alpha, beta, capacity, seed");
  g->add_option("--family", gen.family, "Problem family")->required()->check(CLI::IsMember({"sel", "ass", "lot", "kna"}));
  g->add_option("--model", gen.model, "Model variant")->check(CLI::IsMember({"qippu", "qip", "dep"}))->capture_default_str();
  g->add_option("--n", gen.n, "Items (sel, kna) or matching size (ass)");
  g->add_option("--p", gen.p, "Items to select (sel); defaults to n/2");
  g->add_option("--T", gen.T, "Number of uncertain periods");
  g->add_option("--N", gen.N, "Scenarios per period (sel, ass)");
  g->add_option("--B", gen.B, "Basic order sizes (lot)");
  g->add_option("--U", gen.U, "Urgent order sizes (lot)");
  g->add_option("--alpha", gen.alpha, "Per-period deviation budget (kna)");
  g->add_option("--beta", gen.beta, "Overall deviation budget (kna)");
  g->add_option("--capacity", gen.capacity, "Knapsack capacity (kna)");
  auto* seed_opt = g->add_option("--seed", gen.seed, "Generator seed")->envname("QROBUST_SEED")->capture_default_str();
  g->add_option("--out", gen.out, "Output file; stdout when omitted");

  SolveOpts sol;
  auto* s = app.add_subcommand("solve", "Solve a .qlp instance");
  s->add_option("--in", sol.in, "Input .qlp file; - reads stdin")->required();
  s->add_option("--time-limit", sol.time_limit_ms, "Time limit in milliseconds")->capture_default_str();
  s->add_flag("--oracle", sol.oracle, "Cross-check against exhaustive minimax");
  s->add_flag("--no-bounds", sol.no_bounds, "Disable bound propagation");
  s->add_option("--ordering", sol.ordering, "Move ordering")->check(CLI::IsMember({"objective", "domain"}))->capture_default_str();
  s->add_option("--solver", sol.solver, "alphabeta, or bnb for models without universal blocks")
      ->check(CLI::IsMember({"alphabeta", "bnb"}))
      ->capture_default_str();

  std::string flat_in;
  std::string flat_out;
  double flat_cap = static_cast<double>(kDefaultLeafCap);
  auto* f = app.add_subcommand("flatten", "Build the deterministic equivalent MIP");
  f->add_option("--in", flat_in, "Input .qlp file; - reads stdin")->required();
  f->add_option("--out", flat_out, "Output .qlp file; stdout when omitted");
  f->add_option("--cap", flat_cap, "Maximum number of scenario leaves")->check(CLI::PositiveNumber)->capture_default_str();

  std::string grid;
  std::string bench_out;
  unsigned jobs = 1;
  std::optional<std::int64_t> bench_limit;
  auto* b = app.add_subcommand("bench", "Run a benchmark grid and write records as CSV");
  b->add_option("--grid", grid, "Grid specification file")->required();
  b->add_option("--out", bench_out, "Records CSV; stdout when omitted");
  b->add_option("--jobs", jobs, "Parallel workers")->check(CLI::PositiveNumber)->capture_default_str();
  b->add_option("--time-limit", bench_limit, "Override the grid's time limit (ms)");

  std::string prof_in;
  std::string prof_csv;
  std::string prof_svg;
  std::vector<std::string> prof_solvers;
  std::int64_t prof_unit = 1;
  auto* p = app.add_subcommand("profile", "Performance profile from a records CSV");
  p->add_option("--in", prof_in, "Records CSV")->required();
  p->add_option("--csv", prof_csv, "Profile CSV; stdout when omitted");
  p->add_option("--svg", prof_svg, "Profile SVG step plot");
  p->add_option("--solvers", prof_solvers, "Configurations MODEL/solver to compare, in order")->delimiter(',');
  p->add_option("--time-unit-ms", prof_unit, "Times below this are lifted to it")->check(CLI::PositiveNumber)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*g) {
      gen.seed_given = seed_opt->count() > 0;
      return run_generate(gen);
    }
    if (*s) return run_solve(sol);
    if (*f) return run_flatten(flat_in, flat_out, flat_cap);
    if (*b) return run_bench(grid, bench_out, jobs, bench_limit);
    if (*p) return run_profile(prof_in, prof_csv, prof_svg, prof_solvers, prof_unit);
  } catch (const ExitError& e) {
    std::cerr << "error: " << e.message << '\n';
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}
