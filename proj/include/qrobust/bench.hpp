#pragma once

// Benchmark grids over the problem families, CSV records and performance
// profiles in the style of Dolan and More.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "qrobust/dep.hpp"
#include "qrobust/mip.hpp"
#include "qrobust/problems.hpp"
#include "qrobust/search.hpp"

namespace qrobust {

enum class BenchStatus { Optimal, Infeasible, TimeLimit, BuildFailed, Error };

inline const char* to_string(BenchStatus s) {
  switch (s) {
    case BenchStatus::Optimal: return "Optimal";
    case BenchStatus::Infeasible: return "Infeasible";
    case BenchStatus::TimeLimit: return "TimeLimit";
    case BenchStatus::BuildFailed: return "BuildFailed";
    case BenchStatus::Error: return "Error";
  }
  return "?";
}

inline BenchStatus bench_status_from(const std::string& s) {
  for (BenchStatus b : {BenchStatus::Optimal, BenchStatus::Infeasible, BenchStatus::TimeLimit, BenchStatus::BuildFailed,
                        BenchStatus::Error})
    if (s == to_string(b)) return b;
  throw std::invalid_argument("unknown status '" + s + "'");
}

inline bool solved(BenchStatus s) { return s == BenchStatus::Optimal || s == BenchStatus::Infeasible; }

struct BenchRecord {
  std::string instance_id;
  std::string family;
  std::optional<int> n, p, T, N, B, U;
  std::string model;   // QIPPU, QIP or DEP
  std::string solver;  // alphabeta, bnb or oracle
  BenchStatus status = BenchStatus::Error;
  std::optional<Value> value;
  std::int64_t time_ms = 0;
  std::uint64_t nodes = 0;
  friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

class MismatchedInstanceSets : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Grid specification

/// Plain `key = value` text. Lists are comma separated and may contain
/// inclusive ranges `a..b`. Lines starting with '#' are comments.
struct GridSpec {
  std::string family = "sel";  // sel, ass, lot, kna
  std::vector<std::string> models{"qippu"};
  std::vector<std::string> solvers{"alphabeta"};
  std::map<std::string, std::vector<int>> params;  // n, p, T, N, B, U
  std::vector<std::uint64_t> seeds{0};
  std::int64_t time_limit_ms = 5000;
  std::size_t leaf_cap = kDefaultLeafCap;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline long long parse_int(const std::string& s) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw std::invalid_argument("expected an integer, got '" + s + "'");
  return v;
}

inline std::vector<long long> parse_int_list(const std::string& s) {
  std::vector<long long> out;
  for (const std::string& item : split(s, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_int(item));
      continue;
    }
    const long long a = parse_int(trim(item.substr(0, dots)));
    const long long b = parse_int(trim(item.substr(dots + 2)));
    if (b < a) throw std::invalid_argument("empty range '" + item + "'");
    for (long long v = a; v <= b; ++v) out.push_back(v);
  }
  return out;
}

inline std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace detail

inline GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = detail::trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("grid line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    try {
      if (key == "family") {
        g.family = detail::lower(val);
      } else if (key == "models") {
        g.models.clear();
        for (const auto& m : detail::split(val, ',')) g.models.push_back(detail::lower(m));
      } else if (key == "solvers") {
        g.solvers.clear();
        for (const auto& s : detail::split(val, ',')) g.solvers.push_back(detail::lower(s));
      } else if (key == "seeds") {
        g.seeds.clear();
        for (long long s : detail::parse_int_list(val)) {
          if (s < 0) throw std::invalid_argument("negative seed");
          g.seeds.push_back(static_cast<std::uint64_t>(s));
        }
      } else if (key == "time_limit_ms") {
        g.time_limit_ms = detail::parse_int(val);
      } else if (key == "leaf_cap") {
        g.leaf_cap = static_cast<std::size_t>(detail::parse_int(val));
      } else if (key == "n" || key == "p" || key == "T" || key == "N" || key == "B" || key == "U") {
        std::vector<int> vs;
        for (long long v : detail::parse_int_list(val)) vs.push_back(static_cast<int>(v));
        g.params[key] = vs;
      } else {
        throw std::invalid_argument("unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument& e) {
      const std::string msg = e.what();
      if (msg.rfind("grid line", 0) == 0) throw;
      throw std::invalid_argument("grid line " + std::to_string(lineno) + ": " + msg);
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Instances

/// One generated instance of a family, independent of the model variant.
struct BenchInstance {
  std::string id;
  std::string family;
  std::optional<int> n, p, T, N, B, U;
  std::uint64_t seed = 0;

  [[nodiscard]] SelectionParams selection() const { return SelectionParams{*n, *p, *T, *N, seed}; }
  [[nodiscard]] AssignmentParams assignment() const { return AssignmentParams{*n, *T, *N, seed}; }
  [[nodiscard]] LotSizingParams lot_sizing() const { return LotSizingParams{*B, *U, *T, seed, false}; }
  [[nodiscard]] KnapsackParams knapsack() const {
    KnapsackParams k;
    k.n = *n;
    k.T = *T;
    k.seed = seed;
    return k;
  }
};

inline bool family_has_model(const std::string& family, const std::string& model) {
  if (model == "dep") return true;
  if (model == "qip") return family != "kna";
  if (model == "qippu") return family != "lot";
  return false;
}

/// QIP form for a family; `pu` selects the polyhedral uncertainty variant.
inline QipInstance build_qip(const BenchInstance& inst, bool pu) {
  if (inst.family == "sel") return pu ? build_selection_qip_pu(inst.selection()) : build_selection_qip(inst.selection());
  if (inst.family == "ass")
    return pu ? build_assignment_qip_pu(inst.assignment()) : build_assignment_qip(inst.assignment());
  if (inst.family == "lot") return build_lot_sizing_qip(inst.lot_sizing());
  if (inst.family == "kna") return build_knapsack_qip_pu(inst.knapsack());
  throw std::invalid_argument("unknown family '" + inst.family + "'");
}

/// The model a grid cell solves. DEP is the generic flattening of the
/// QIP^PU form where the family has one, else of the QIP form.
inline QipInstance build_bench_model(const BenchInstance& inst, const std::string& model, std::size_t leaf_cap) {
  if (!family_has_model(inst.family, model))
    throw std::invalid_argument("family " + inst.family + " has no " + model + " model");
  if (model == "qippu") return build_qip(inst, true);
  if (model == "qip") return build_qip(inst, false);
  return flatten(build_qip(inst, inst.family != "lot"), leaf_cap).model;
}

inline std::vector<BenchInstance> expand_instances(const GridSpec& g) {
  const std::string& f = g.family;
  if (f != "sel" && f != "ass" && f != "lot" && f != "kna") throw std::invalid_argument("unknown family '" + f + "'");
  auto values = [&](const char* key, std::vector<int> fallback) {
    auto it = g.params.find(key);
    return it == g.params.end() ? fallback : it->second;
  };
  const bool uses_n = f != "lot";
  const bool uses_N = f == "sel" || f == "ass";
  const bool uses_BU = f == "lot";
  for (const auto& [key, vs] : g.params) {
    const bool ok = key == "T" || (key == "n" && uses_n) || (key == "N" && uses_N) || (key == "p" && f == "sel") ||
                    ((key == "B" || key == "U") && uses_BU);
    if (!ok) throw std::invalid_argument("parameter " + key + " does not apply to family " + f);
  }
  std::vector<BenchInstance> out;
  const std::vector<int> none{0};
  for (int n : uses_n ? values("n", {4}) : none)
    for (int p : f == "sel" ? values("p", {-1}) : none)
      for (int T : values("T", {1}))
        for (int N : uses_N ? values("N", {2}) : none)
          for (int B : uses_BU ? values("B", {3}) : none)
            for (int U : uses_BU ? values("U", {2}) : none)
              for (std::uint64_t seed : g.seeds) {
                BenchInstance b;
                b.family = f;
                b.seed = seed;
                b.T = T;
                std::ostringstream id;
                id << f;
                if (uses_n) {
                  b.n = n;
                  id << "_n" << n;
                }
                if (f == "sel") {
                  b.p = p < 0 ? n / 2 : p;
                  id << "_p" << *b.p;
                }
                id << "_T" << T;
                if (uses_N) {
                  b.N = N;
                  id << "_N" << N;
                }
                if (uses_BU) {
                  b.B = B;
                  b.U = U;
                  id << "_B" << B << "_U" << U;
                }
                id << "_s" << seed;
                b.id = id.str();
                if (f == "sel") check(b.selection());
                if (f == "ass") check(b.assignment());
                if (f == "lot") check(b.lot_sizing());
                if (f == "kna") check(b.knapsack());
                out.push_back(b);
              }
  return out;
}

inline std::string model_tag(const std::string& model) {
  if (model == "qippu") return "QIPPU";
  if (model == "qip") return "QIP";
  if (model == "dep") return "DEP";
  throw std::invalid_argument("unknown model '" + model + "'");
}

/// bnb only handles models without universal blocks, so it pairs with DEP.
inline bool solver_accepts(const std::string& solver, const std::string& model) {
  if (solver == "bnb") return model == "dep";
  return solver == "alphabeta" || solver == "oracle";
}

/// Builds and solves one grid cell. Build time counts against the limit.
inline BenchRecord run_cell(const BenchInstance& inst, const std::string& model, const std::string& solver,
                            std::int64_t time_limit_ms, std::size_t leaf_cap) {
  BenchRecord rec;
  rec.instance_id = inst.id;
  rec.family = inst.family;
  rec.n = inst.n;
  rec.p = inst.p;
  rec.T = inst.T;
  rec.N = inst.N;
  rec.B = inst.B;
  rec.U = inst.U;
  rec.model = model_tag(model);
  rec.solver = solver;
  const auto start = std::chrono::steady_clock::now();
  auto since = [&] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  };
  auto finish = [&](SolveStatus s, const std::optional<Value>& v, bool is_bound, std::uint64_t nodes) {
    rec.status = s == SolveStatus::Optimal      ? BenchStatus::Optimal
                 : s == SolveStatus::Infeasible ? BenchStatus::Infeasible
                                                : BenchStatus::TimeLimit;
    if (rec.status != BenchStatus::TimeLimit && !is_bound) rec.value = v;
    rec.nodes = nodes;
  };
  try {
    QipInstance q;
    try {
      q = build_bench_model(inst, model, leaf_cap);
    } catch (const ScenarioExplosion&) {
      rec.status = BenchStatus::BuildFailed;
      rec.time_ms = since();
      return rec;
    }
    const std::int64_t left = time_limit_ms - since();
    if (left <= 0) {
      rec.status = BenchStatus::TimeLimit;
      rec.time_ms = since();
      return rec;
    }
    SearchConfig cfg;
    cfg.time_limit_ms = left;
    if (solver == "alphabeta") {
      const SolveResult r = solve(q, cfg);
      finish(r.status, r.value, r.value_is_bound, r.nodes);
    } else if (solver == "bnb") {
      const MipResult r = solve_mip(q, cfg);
      finish(r.status, r.value, r.value_is_bound, r.nodes);
    } else if (solver == "oracle") {
      try {
        const SolveResult r = oracle_solve(q);
        finish(r.status, r.value, false, r.nodes);
      } catch (const TreeTooLarge&) {
        rec.status = BenchStatus::TimeLimit;
      }
    } else {
      throw std::invalid_argument("unknown solver '" + solver + "'");
    }
    rec.time_ms = since();
    if (solved(rec.status) && rec.time_ms > time_limit_ms) {
      rec.status = BenchStatus::TimeLimit;
      rec.value.reset();
    }
  } catch (const std::exception&) {
    rec.status = BenchStatus::Error;
    rec.value.reset();
    rec.time_ms = since();
  }
  return rec;
}

/// Runs every compatible (instance, model, solver) cell. Records come back in
/// grid order whatever `jobs` is; `jobs` > 1 adds timing noise.
inline std::vector<BenchRecord> run_grid(const GridSpec& g, unsigned jobs = 1) {
  if (g.time_limit_ms <= 0) throw std::invalid_argument("time limit must be positive");
  for (const auto& m : g.models) {
    model_tag(m);
    if (!family_has_model(g.family, m)) throw std::invalid_argument("family " + g.family + " has no " + m + " model");
  }
  for (const auto& s : g.solvers)
    if (s != "alphabeta" && s != "bnb" && s != "oracle") throw std::invalid_argument("unknown solver '" + s + "'");
  const std::vector<BenchInstance> instances = expand_instances(g);
  struct Cell {
    const BenchInstance* inst;
    const std::string* model;
    const std::string* solver;
  };
  std::vector<Cell> cells;
  for (const auto& inst : instances)
    for (const auto& m : g.models)
      for (const auto& s : g.solvers)
        if (solver_accepts(s, m)) cells.push_back(Cell{&inst, &m, &s});
  std::vector<BenchRecord> out(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++)
      out[i] = run_cell(*cells[i].inst, *cells[i].model, *cells[i].solver, g.time_limit_ms, g.leaf_cap);
  };
  jobs = std::max(1u, jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char* kRecordHeader = "instance_id,family,n,p,T,N,B,U,model,solver,status,value,time_ms,nodes";

inline std::string emit_csv(const std::vector<BenchRecord>& records) {
  std::ostringstream os;
  os << kRecordHeader << '\n';
  auto opt = [&](const std::optional<int>& v) {
    if (v) os << *v;
    os << ',';
  };
  for (const auto& r : records) {
    os << r.instance_id << ',' << r.family << ',';
    opt(r.n);
    opt(r.p);
    opt(r.T);
    opt(r.N);
    opt(r.B);
    opt(r.U);
    os << r.model << ',' << r.solver << ',' << to_string(r.status) << ',';
    if (r.value) os << r.value->str();
    os << ',' << r.time_ms << ',' << r.nodes << '\n';
  }
  return os.str();
}

inline std::vector<BenchRecord> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != kRecordHeader)
    throw std::invalid_argument("missing or unexpected CSV header");
  std::vector<BenchRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split(line, ',');
    if (f.size() != 14) throw std::invalid_argument("CSV line " + std::to_string(lineno) + ": expected 14 fields");
    try {
      BenchRecord r;
      r.instance_id = f[0];
      r.family = f[1];
      std::optional<int>* params[] = {&r.n, &r.p, &r.T, &r.N, &r.B, &r.U};
      for (int k = 0; k < 6; ++k)
        if (!f[2 + k].empty()) *params[k] = static_cast<int>(detail::parse_int(f[2 + k]));
      r.model = f[8];
      r.solver = f[9];
      r.status = bench_status_from(f[10]);
      if (f[11] == "inf") {
        r.value = Value::infinity();
      } else if (!f[11].empty()) {
        r.value = Value(Rational::parse(f[11]));
      }
      r.time_ms = detail::parse_int(f[12]);
      r.nodes = static_cast<std::uint64_t>(detail::parse_int(f[13]));
      out.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw std::invalid_argument("CSV line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Performance profiles

struct ProfileTable {
  std::vector<std::string> solvers;
  std::vector<Rational> taus;          // 1 + k/2
  std::vector<std::vector<double>> p;  // p[solver][k]
  std::size_t instances = 0;
};

/// Profiles compare configurations labelled "MODEL/solver".
inline std::string profile_label(const BenchRecord& r) { return r.model + "/" + r.solver; }

/// p_s(tau) = |{instances : t_s <= tau * min_s' t_s'}| / |instances|.
/// Unsolved runs count as infinite time; times below `time_unit_ms` are lifted
/// to it. Ties at the minimum credit every tied configuration. `solvers`
/// selects and orders configurations; empty means all, in order of first
/// appearance.
inline ProfileTable performance_profile(const std::vector<BenchRecord>& records,
                                        std::vector<std::string> solvers = {}, std::int64_t time_unit_ms = 1) {
  if (time_unit_ms <= 0) throw std::invalid_argument("time unit must be positive");
  if (solvers.empty()) {
    for (const auto& r : records) {
      const std::string l = profile_label(r);
      if (std::find(solvers.begin(), solvers.end(), l) == solvers.end()) solvers.push_back(l);
    }
  }
  std::map<std::string, std::size_t> slot;
  for (std::size_t s = 0; s < solvers.size(); ++s) slot.emplace(solvers[s], s);
  // time[instance][solver]; nullopt means unsolved
  std::map<std::string, std::vector<std::optional<std::int64_t>>> times;
  std::map<std::string, std::vector<char>> seen;
  for (const auto& r : records) {
    auto it = slot.find(profile_label(r));
    if (it == slot.end()) continue;
    auto& row = times[r.instance_id];
    auto& mark = seen[r.instance_id];
    if (row.empty()) {
      row.assign(solvers.size(), std::nullopt);
      mark.assign(solvers.size(), 0);
    }
    if (mark[it->second])
      throw MismatchedInstanceSets("duplicate record for " + r.instance_id + " and " + it->first);
    mark[it->second] = 1;
    if (solved(r.status)) row[it->second] = std::max(r.time_ms, time_unit_ms);
  }
  for (const auto& [id, mark] : seen)
    for (std::size_t s = 0; s < solvers.size(); ++s)
      if (!mark[s]) throw MismatchedInstanceSets("no record for " + id + " and " + solvers[s]);

  ProfileTable table;
  table.solvers = solvers;
  table.instances = times.size();
  table.p.assign(solvers.size(), {});
  const double denom = times.empty() ? 1.0 : static_cast<double>(times.size());
  std::vector<std::size_t> terminal(solvers.size(), 0);
  for (const auto& [id, row] : times)
    for (std::size_t s = 0; s < solvers.size(); ++s)
      if (row[s]) ++terminal[s];
  for (int k = 0;; ++k) {
    // t <= (1 + k/2) * best  <=>  2t <= (2 + k) * best
    std::vector<std::size_t> count(solvers.size(), 0);
    for (const auto& [id, row] : times) {
      std::optional<std::int64_t> best;
      for (const auto& t : row)
        if (t && (!best || *t < *best)) best = t;
      if (!best) continue;
      for (std::size_t s = 0; s < solvers.size(); ++s)
        if (row[s] && 2 * *row[s] <= static_cast<std::int64_t>(2 + k) * *best) ++count[s];
    }
    table.taus.push_back(Rational(2 + k, 2));
    bool settled = true;
    for (std::size_t s = 0; s < solvers.size(); ++s) {
      table.p[s].push_back(static_cast<double>(count[s]) / denom);
      if (count[s] != terminal[s]) settled = false;
    }
    if (settled) break;
  }
  return table;
}

inline std::string emit_csv(const ProfileTable& t) {
  std::ostringstream os;
  os << "tau";
  for (const auto& s : t.solvers) os << ',' << s;
  os << '\n';
  for (std::size_t k = 0; k < t.taus.size(); ++k) {
    os << t.taus[k].to_double();
    for (std::size_t s = 0; s < t.solvers.size(); ++s) os << ',' << t.p[s][k];
    os << '\n';
  }
  return os.str();
}

/// Step plot of p_s(tau), one polyline per configuration.
inline std::string emit_svg(const ProfileTable& t) {
  constexpr double W = 640, H = 400, L = 60, R = 160, Tm = 20, Bm = 50;
  const double pw = W - L - R;
  const double ph = H - Tm - Bm;
  const double tmax = t.taus.empty() ? 1.0 : t.taus.back().to_double();
  const double span = std::max(tmax - 1.0, 0.5);
  auto X = [&](double tau) { return L + (tau - 1.0) / span * pw; };
  auto Y = [&](double p) { return Tm + (1.0 - p) * ph; };
  static const char* const colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << ' ' << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << Y(0) << "\" x2=\"" << L + pw << "\" y2=\"" << Y(0) << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << Y(0) << "\" x2=\"" << L << "\" y2=\"" << Y(1) << "\" stroke=\"black\"/>\n";
  for (double p : {0.0, 0.5, 1.0})
    os << "<text x=\"" << L - 8 << "\" y=\"" << Y(p) + 4 << "\" font-size=\"12\" text-anchor=\"end\">" << p
       << "</text>\n";
  os << "<text x=\"" << L << "\" y=\"" << H - 25 << "\" font-size=\"12\" text-anchor=\"middle\">1</text>\n";
  os << "<text x=\"" << L + pw << "\" y=\"" << H - 25 << "\" font-size=\"12\" text-anchor=\"middle\">" << 1.0 + span
     << "</text>\n";
  os << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 8 << "\" font-size=\"13\" text-anchor=\"middle\">tau</text>\n";
  for (std::size_t s = 0; s < t.solvers.size(); ++s) {
    const char* color = colors[s % (sizeof(colors) / sizeof(colors[0]))];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t k = 0; k < t.taus.size(); ++k) {
      const double x = X(t.taus[k].to_double());
      if (k > 0) os << x << ',' << Y(t.p[s][k - 1]) << ' ';
      os << x << ',' << Y(t.p[s][k]) << ' ';
    }
    if (!t.taus.empty() && !t.p[s].empty()) os << X(1.0 + span) << ',' << Y(t.p[s].back());
    os << "\"/>\n";
    const double ly = Tm + 16.0 * static_cast<double>(s) + 10;
    os << "<text x=\"" << L + pw + 10 << "\" y=\"" << ly << "\" font-size=\"12\" fill=\"" << color << "\">"
       << t.solvers[s] << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace qrobust
