#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "scalekit/counterexamples.hpp"
#include "scalekit/io.hpp"
#include "scalekit/matrix_socle.hpp"
#include "scalekit/renorm.hpp"
#include "scalekit/schwartz.hpp"
#include "scalekit/summability.hpp"

namespace scalekit::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitInput = 2;

struct RunConfig {
  std::string subcommand;
  std::string example;  // counterexample name
  std::size_t k = 0;    // prefix length; 0 picks the subcommand default
  int max_m = 6;
  int max_n = 3;
  int trials = 1000;
  std::uint64_t seed = kDefaultSeed;
  std::string format = "json";
  std::vector<int> ns{0, 1, 2};

  std::string family;     // scale family in k and n
  std::string sigma;      // single scale in k
  std::string dims;       // dimension expression in k
  std::string chi;        // expression in k with values in (0, 1)
  std::string kind;       // renorm instance
  int n = 1;
  int m = 2;
  int d = 2;
  int d_max = 8;
  int pmax = 10;
  int imax = 5;
  int order = 2;
  int grid = 0;

  std::string dims_file;
  std::string theta_file;
  std::string f_file;
  std::string g_file;
  std::string phi_file;
  std::string list_file;

  bool expect_fail = false;
};

/// Rendered table. Cells are already formatted.
struct Table {
  std::string title;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Report {
  Json result = Json::object();
  std::vector<Table> tables;
  bool contract_holds = true;  // the inequality or property being asserted
  bool sound = true;           // self-checks of the computation itself
  std::string witness;         // printed when the contract fails
};

// ---------------------------------------------------------------------------
// formatting

inline Json log_json(LogValue v) {
  if (v.is_zero()) return nullptr;
  return v.log();
}

inline Json log_json(const std::optional<LogValue>& v) {
  return v ? log_json(*v) : Json(nullptr);
}

inline std::string fmt_double(double x, int digits = 10) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

/// Plain decimal while it fits comfortably, e^x beyond.
inline std::string fmt_log(LogValue v) {
  if (v.is_zero()) return "0";
  if (std::abs(v.log()) < 690.0) return fmt_double(v.to_double());
  return "e^" + fmt_double(v.log());
}

inline std::string fmt_opt_log(const std::optional<LogValue>& v) {
  return v ? fmt_log(*v) : "-";
}

inline std::string fmt_bool(bool b) { return b ? "yes" : "no"; }

inline std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline std::string md_cell(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

inline Json config_json(const RunConfig& c) {
  Json j;
  j["subcommand"] = c.subcommand;
  if (!c.example.empty()) j["example"] = c.example;
  j["K"] = c.k;
  j["trials"] = c.trials;
  auto put = [&](const char* key, const std::string& v) {
    if (!v.empty()) j[key] = v;
  };
  put("family", c.family);
  put("sigma", c.sigma);
  put("dims", c.dims);
  put("chi", c.chi);
  put("kind", c.kind);
  put("dims_file", c.dims_file);
  put("theta_file", c.theta_file);
  put("f_file", c.f_file);
  put("g_file", c.g_file);
  put("phi_file", c.phi_file);
  put("list_file", c.list_file);
  j["expect_fail"] = c.expect_fail;
  return j;
}

inline void render(const RunConfig& c, const Report& r, std::ostream& out) {
  if (c.format == "json") {
    Json doc;
    doc["schema"] = kSchemaVersion;
    doc["command"] = c.subcommand;
    doc["seed"] = c.seed;
    doc["config"] = config_json(c);
    doc["contract_holds"] = r.contract_holds;
    doc["sound"] = r.sound;
    if (!r.contract_holds) doc["witness"] = r.witness;
    doc["result"] = r.result;
    out << doc.dump(2) << '\n';
    return;
  }
  if (c.format == "csv") {
    out << "# schema " << kSchemaVersion << ", seed " << c.seed << '\n';
    bool first = true;
    for (const auto& t : r.tables) {
      if (!first) out << '\n';
      first = false;
      out << "# " << t.title << '\n';
      for (std::size_t i = 0; i < t.header.size(); ++i) {
        out << (i ? "," : "") << csv_cell(t.header[i]);
      }
      out << '\n';
      for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
          out << (i ? "," : "") << csv_cell(row[i]);
        }
        out << '\n';
      }
    }
    return;
  }
  // markdown
  out << "# " << c.subcommand << (c.example.empty() ? "" : " " + c.example)
      << "\n\nseed " << c.seed << ", schema " << kSchemaVersion << "\n";
  for (const auto& t : r.tables) {
    out << "\n## " << t.title << "\n\n|";
    for (const auto& h : t.header) out << ' ' << md_cell(h) << " |";
    out << "\n|";
    for (std::size_t i = 0; i < t.header.size(); ++i) out << "---|";
    out << '\n';
    for (const auto& row : t.rows) {
      out << '|';
      for (const auto& cell : row) out << ' ' << md_cell(cell) << " |";
      out << '\n';
    }
  }
  out << "\ncontract holds: " << fmt_bool(r.contract_holds)
      << ", self-checks sound: " << fmt_bool(r.sound) << '\n';
}

// ---------------------------------------------------------------------------
// inputs

inline std::size_t prefix_or(const RunConfig& c, std::size_t fallback) {
  return c.k == 0 ? fallback : c.k;
}

inline DimensionSequence load_dims(const RunConfig& c, std::size_t k_default,
                                   const std::string& expr_default = "") {
  if (!c.dims_file.empty()) {
    if (!c.dims.empty()) throw ParseError("give --dims or --dims-file, not both");
    auto d = io::read_dims_file(c.dims_file);
    if (c.k != 0) {
      if (c.k > d.size()) {
        throw DomainError("K = " + std::to_string(c.k) +
                          " exceeds the dimension fixture");
      }
      d = d.prefix(c.k);
    }
    return d;
  }
  const std::string text = c.dims.empty() ? expr_default : c.dims;
  if (text.empty()) throw ParseError("--dims or --dims-file is required");
  return DimensionSequence::from_expression(parse_expression(text),
                                            prefix_or(c, k_default));
}

inline Enumeration load_theta(const RunConfig& c, std::size_t k) {
  if (c.theta_file.empty()) return Enumeration::identity();
  auto table = io::read_index_list_file(c.theta_file);
  if (table.size() < k) throw DomainError("ϑ fixture shorter than the prefix");
  table.resize(k);
  return Enumeration::from_forward(table, "theta");
}

inline const std::string& need(const std::string& v, const char* flag) {
  if (v.empty()) throw ParseError(std::string(flag) + " is required");
  return v;
}

inline Json summability_json(const SummabilityEntry& e) {
  Json j;
  j["n"] = e.n;
  j["m"] = e.m;
  j["partial_sum_log"] = log_json(e.partial_sum);
  if (e.tail_bound) j["tail_bound_log"] = log_json(*e.tail_bound);
  j["method"] = to_string(e.method);
  j["verdict"] = to_string(e.verdict);
  return j;
}

inline Table summability_table(const std::vector<SummabilityEntry>& entries,
                                std::string title) {
  Table t{std::move(title),
          {"n", "m", "partial sum", "tail bound", "method", "verdict"},
          {}};
  for (const auto& e : entries) {
    t.rows.push_back({std::to_string(e.n), std::to_string(e.m),
                      fmt_log(e.partial_sum), fmt_opt_log(e.tail_bound),
                      to_string(e.method), to_string(e.verdict)});
  }
  return t;
}

inline void summability_contract(const SummabilityReport& rep, Report& r) {
  for (const auto& e : rep.entries) {
    if (e.verdict == SummabilityVerdict::kRefutedTrend) {
      r.contract_holds = false;
      r.witness = "n = " + std::to_string(e.n) + ": partial sums keep growing "
                  "for every m up to max_m (last m = " + std::to_string(e.m) +
                  ", sum " + fmt_log(e.partial_sum) + ")";
      return;
    }
  }
}

// ---------------------------------------------------------------------------
// subcommands

inline Report cmd_summability(const RunConfig& c) {
  const auto family = ScaleFamily::parse(need(c.family, "--family"), c.max_m);
  const auto k = prefix_or(c, 10000);
  SummabilityOptions opt;
  opt.ns = c.ns;
  opt.max_m = c.max_m;
  const auto rep = summability_check(family, Prefix::dense(k), opt);
  Report r;
  r.result["prefix_size"] = rep.prefix_size;
  r.result["entries"] = Json::array();
  for (const auto& e : rep.entries) r.result["entries"].push_back(summability_json(e));
  r.tables.push_back(summability_table(rep.entries, "Σ σ_n/σ_m, K = " + std::to_string(k)));
  summability_contract(rep, r);
  return r;
}

inline Report cmd_p_summability(const RunConfig& c) {
  const auto family = ScaleFamily::parse(need(c.family, "--family"), c.max_m);
  const auto p = load_dims(c, 10000);
  SummabilityOptions opt;
  opt.ns = c.ns;
  opt.max_m = c.max_m;
  const auto rep = p_summability_check(family, p, Prefix::dense(p.size()), opt);
  Report r;
  r.result["prefix_size"] = rep.prefix_size;
  r.result["entries"] = Json::array();
  for (const auto& e : rep.entries) r.result["entries"].push_back(summability_json(e));
  r.tables.push_back(summability_table(
      rep.entries, "Σ p² ℓ_n/ℓ_m, K = " + std::to_string(p.size())));
  summability_contract(rep, r);
  return r;
}

inline Report cmd_growth(const RunConfig& c) {
  const auto p = load_dims(c, 1000);
  const auto theta = load_theta(c, p.size());
  const auto rep = growth_condition_check(p, theta, c.d_max);
  Report r;
  r.result["K"] = rep.k;
  r.result["d_max"] = rep.d_max;
  r.result["consistent"] = rep.consistent;
  r.result["holds"] = rep.holds();
  r.result["conditions"] = Json::array();
  Table t{"growth condition, K = " + std::to_string(rep.k),
          {"condition", "least d", "constant", "verdict"},
          {}};
  for (const auto& g : rep.conditions) {
    Json j;
    j["name"] = g.name;
    j["d"] = g.d ? Json(*g.d) : Json(nullptr);
    j["constant_log"] = log_json(g.report.last.constant);
    j["verdict"] = g.holds() ? "dominated-with-constant" : "refuted-by-trend";
    r.result["conditions"].push_back(j);
    t.rows.push_back({g.name, g.d ? std::to_string(*g.d) : "-",
                      fmt_log(g.report.last.constant),
                      g.holds() ? "dominated-with-constant" : "refuted-by-trend"});
  }
  r.tables.push_back(std::move(t));
  r.sound = rep.consistent;
  r.contract_holds = rep.holds();
  if (!r.contract_holds) {
    const auto& last = rep.conditions[0].report.last;
    r.witness = "p / l_min^" + std::to_string(rep.d_max) +
                " keeps rising; largest at rank " +
                std::to_string(last.argmax + 1) + " with ratio " +
                fmt_log(last.constant);
  }
  return r;
}

inline Report cmd_ideal_check(const RunConfig& c) {
  const auto family = ScaleFamily::parse(need(c.family, "--family"), c.max_n);
  constexpr double kTol = 1e-9;
  Report r;
  r.result["tolerance"] = kTol;
  if (c.dims.empty() && c.dims_file.empty()) {
    const auto k = prefix_or(c, 200);
    const auto rep = ideal_inequality_check(family, c.trials, k, c.seed);
    r.result["instance"] = "pointwise";
    Table t{"‖fg‖_n / (‖f‖_n ‖g‖_∞), " + std::to_string(c.trials) + " trials",
            {"n", "worst l1", "worst sup"},
            {}};
    r.result["per_n"] = Json::array();
    for (const auto& x : rep.per_n) {
      r.result["per_n"].push_back({{"n", x.n}, {"worst_l1", x.worst_l1},
                                   {"worst_sup", x.worst_sup}});
      t.rows.push_back({std::to_string(x.n), fmt_double(x.worst_l1),
                        fmt_double(x.worst_sup)});
    }
    if (!c.f_file.empty() || !c.g_file.empty()) {
      const auto f = io::read_sparse_file<Index>(need(c.f_file, "--f"));
      const auto g = io::read_sparse_file<Index>(need(c.g_file, "--g"));
      const auto fg = pointwise_mul(f, g);
      const LogValue g_inf = LogValue::from_double(g.sup_abs());
      Table ft{"fixture pair", {"n", "ratio l1", "ratio sup"}, {}};
      r.result["fixture"] = Json::array();
      for (int n = 0; n <= family.max_index(); ++n) {
        const double a =
            (norm_l1(fg, family, n) / (norm_l1(f, family, n) * g_inf)).to_double();
        const double b =
            (norm_sup(fg, family, n) / (norm_sup(f, family, n) * g_inf)).to_double();
        r.result["fixture"].push_back({{"n", n}, {"ratio_l1", a}, {"ratio_sup", b}});
        ft.rows.push_back({std::to_string(n), fmt_double(a), fmt_double(b)});
        if (std::max(a, b) > 1 + kTol) {
          r.contract_holds = false;
          r.witness = "fixture pair at n = " + std::to_string(n) +
                      ": ratio " + fmt_double(std::max(a, b));
        }
      }
      r.tables.push_back(std::move(t));
      r.tables.push_back(std::move(ft));
    } else {
      r.tables.push_back(std::move(t));
    }
    r.result["worst"] = rep.worst();
    if (rep.worst() > 1 + kTol) {
      r.contract_holds = false;
      r.witness = "random trials reach ratio " + fmt_double(rep.worst());
    }
    return r;
  }
  const auto p = load_dims(c, 8);
  const auto rep = two_sided_ideal_check(family, p, c.trials, c.seed);
  r.result["instance"] = "block-socle";
  Table t{"two-sided ideal ratios, " + std::to_string(c.trials) + " trials",
          {"n", "worst ‖fφ‖/(‖f‖_B‖φ‖)", "worst ‖φf‖/(‖φ‖‖f‖_B)"},
          {}};
  r.result["per_n"] = Json::array();
  for (const auto& x : rep.per_n) {
    r.result["per_n"].push_back({{"n", x.n}, {"worst_left", x.worst_left},
                                 {"worst_right", x.worst_right}});
    t.rows.push_back({std::to_string(x.n), fmt_double(x.worst_left),
                      fmt_double(x.worst_right)});
  }
  r.tables.push_back(std::move(t));
  if (!c.f_file.empty() || !c.g_file.empty()) {
    const auto f = io::read_blocks_file(need(c.f_file, "--f"), p);
    const auto phi = io::read_blocks_file(need(c.g_file, "--g"), p);
    const LogValue fb = cstar_norm(f);
    Table ft{"fixture pair (f, φ)", {"n", "left", "right"}, {}};
    r.result["fixture"] = Json::array();
    for (int n = 0; n <= family.max_index(); ++n) {
      const LogValue pn = socle_norm_op(phi, family, n);
      const double left = (socle_norm_op(block_mul(f, phi), family, n) / (fb * pn)).to_double();
      const double right = (socle_norm_op(block_mul(phi, f), family, n) / (pn * fb)).to_double();
      r.result["fixture"].push_back({{"n", n}, {"left", left}, {"right", right}});
      ft.rows.push_back({std::to_string(n), fmt_double(left), fmt_double(right)});
      if (std::max(left, right) > 1 + kTol) {
        r.contract_holds = false;
        r.witness = "fixture pair at n = " + std::to_string(n) + ": ratio " +
                    fmt_double(std::max(left, right));
      }
    }
    r.tables.push_back(std::move(ft));
  }
  r.result["worst"] = rep.worst();
  if (rep.worst() > 1 + kTol) {
    r.contract_holds = false;
    r.witness = "random trials reach ratio " + fmt_double(rep.worst());
  }
  return r;
}

template <RenormInstance I>
Report renorm_report(const I& inst, const RunConfig& c) {
  const auto rep = verify_renorm_contract(inst, c.trials, c.seed);
  Report r;
  r.result["kind"] = rep.kind;
  r.result["trials"] = rep.trials;
  r.result["tolerance"] = rep.tolerance;
  r.result["zeroth_preserved"] = rep.zeroth_preserved;
  r.result["monotone"] = rep.monotone;
  r.result["sampling_sound"] = rep.sampling_sound;
  r.result["attained_gap"] = rep.attained_gap;
  r.result["domination_ratio"] = rep.domination_ratio;
  r.result["per_n"] = Json::array();
  Table t{"renormalized inequalities (" + rep.kind + "), worst ratios",
          {"n", "inequality", "worst ratio"},
          {}};
  for (const auto& x : rep.per_n) {
    Json j;
    j["n"] = x.n;
    j["worst"] = Json::object();
    for (const auto& [name, w] : x.worst) {
      j["worst"][name] = w;
      t.rows.push_back({std::to_string(x.n), name, fmt_double(w)});
    }
    r.result["per_n"].push_back(j);
  }
  r.tables.push_back(std::move(t));
  r.tables.push_back({"checks",
                      {"check", "value"},
                      {{"zeroth norm preserved", fmt_bool(rep.zeroth_preserved)},
                       {"monotone in n", fmt_bool(rep.monotone)},
                       {"sampled sup below exact", fmt_bool(rep.sampling_sound)},
                       {"witness gap", fmt_double(rep.attained_gap)},
                       {"domination ratio", fmt_double(rep.domination_ratio)}}});
  r.contract_holds = rep.passed();
  if (!r.contract_holds) {
    r.witness = "worst renormalized ratio " + fmt_double(rep.worst());
  }
  return r;
}

inline Report cmd_renorm(const RunConfig& c) {
  const std::string kind = c.kind.empty() ? "pointwise" : c.kind;
  const auto k = prefix_or(c, 30);
  if (kind == "paired") {
    return renorm_report(
        PairedB2(Scale::parse(c.sigma.empty() ? "k" : c.sigma), c.max_n, k), c);
  }
  const auto family = ScaleFamily::parse(
      c.family.empty() ? "pow(k,n)" : c.family, c.max_n);
  if (kind == "pointwise") return renorm_report(PointwiseC0(family, k), c);
  if (kind == "trivial") return renorm_report(TrivialProduct(family, k), c);
  if (kind == "block") return renorm_report(BlockSocle(family, load_dims(c, 8, "k")), c);
  throw ParseError("unknown --kind '" + kind +
                   "' (pointwise, paired, block, trivial)");
}

inline Report cmd_classify(const RunConfig& c) {
  const auto p = load_dims(c, 200);
  const auto theta = load_theta(c, p.size());
  const auto rep = standard_schwartz_classify(p, theta, c.d_max);
  Report r;
  r.result["K"] = p.size();
  r.result["growth_holds"] = rep.growth.holds();
  r.result["growth_consistent"] = rep.growth.consistent;
  r.result["gamma_built"] = rep.gamma.has_value();
  r.result["sandwich"] = rep.sandwich;
  r.result["gamma_power"] = rep.gamma_power ? Json(*rep.gamma_power) : Json(nullptr);
  r.result["standard"] = rep.standard();
  Table t{"standard Schwartz classification", {"check", "value"}, {}};
  t.rows.push_back({"growth condition", fmt_bool(rep.growth.holds())});
  for (const auto& g : rep.growth.conditions) {
    t.rows.push_back({"  " + g.name, g.d ? "d = " + std::to_string(*g.d) : "refuted"});
  }
  t.rows.push_back({"γ built", fmt_bool(rep.gamma.has_value())});
  if (rep.gamma) {
    t.rows.push_back({"|X| on the prefix", std::to_string(rep.gamma->total())});
    r.result["total"] = rep.gamma->total();
  }
  t.rows.push_back({"ℓ_min <= γ <= ℓ_max²", fmt_bool(rep.sandwich)});
  t.rows.push_back({"least d with γ <~ ℓ_min^d",
                    rep.gamma_power ? std::to_string(*rep.gamma_power) : "-"});
  t.rows.push_back({"standard", fmt_bool(rep.standard())});
  r.tables.push_back(std::move(t));
  r.sound = rep.growth.consistent;
  r.contract_holds = rep.standard();
  if (!r.contract_holds) {
    r.witness = rep.growth.holds() ? "γ escapes the ℓ_min/ℓ_max² sandwich"
                                   : "growth condition refuted on the prefix";
  }
  return r;
}

// ---- counterexamples

inline Report ce_b1(const RunConfig& c) {
  const auto p = load_dims(c, 8, "exp(pow(k,k))");
  const auto rep = b1_blowup(p, c.n, c.m, p.size());
  Report r;
  r.result["n"] = rep.n;
  r.result["m"] = rep.m;
  r.result["growth_holds"] = rep.growth_holds;
  if (rep.warning) r.result["warning"] = *rep.warning;
  r.result["exceeds_bound"] = rep.exceeds_bound;
  r.result["strictly_increasing"] = rep.strictly_increasing;
  r.result["trend"] = to_string(rep.trend.verdict);
  r.result["entries"] = Json::array();
  Table t{"‖S_K T_K‖_n / (‖S_K‖_B ‖T_K‖_m)",
          {"K", "‖S_K‖_n", "‖T_K‖_m", "ratio", "bound", "power sum"},
          {}};
  for (const auto& e : rep.entries) {
    r.result["entries"].push_back({{"K", e.k},
                                   {"s_norm_log", log_json(e.s_norm)},
                                   {"t_norm_log", log_json(e.t_norm)},
                                   {"ratio_log", log_json(e.ratio)},
                                   {"bound_log", log_json(e.bound)},
                                   {"power_sum", to_string(e.sum_method)}});
    t.rows.push_back({std::to_string(e.k), fmt_log(e.s_norm), fmt_log(e.t_norm),
                      fmt_log(e.ratio), fmt_log(e.bound), to_string(e.sum_method)});
  }
  r.tables.push_back(std::move(t));
  r.sound = rep.exceeds_bound;
  r.contract_holds = rep.trend.dominated();
  if (!r.contract_holds) {
    r.witness = "ratio reaches " + fmt_log(rep.entries.back().ratio) +
                " at K = " + std::to_string(rep.entries.back().k) +
                " and keeps rising";
  }
  return r;
}

inline Report ce_b2(const RunConfig& c) {
  const auto rep = b2_pair_algebra(Scale::parse(c.sigma.empty() ? "k" : c.sigma),
                                   prefix_or(c, 1000));
  Report r;
  r.result["max_rel_error"] = rep.max_rel_error;
  r.result["trend"] = to_string(rep.trend.verdict);
  r.result["entries"] = Json::array();
  Table t{"pair algebra norms",
          {"k", "σ", "‖δ_2k‖", "‖δ_2k+1‖", "‖δ₊‖", "‖δ₋‖", "ratio"},
          {}};
  const std::size_t stride = std::max<std::size_t>(1, rep.entries.size() / 20);
  for (std::size_t i = 0; i < rep.entries.size(); ++i) {
    const auto& e = rep.entries[i];
    r.result["entries"].push_back({{"k", e.k},
                                   {"sigma", e.sigma},
                                   {"delta_even", e.delta_even},
                                   {"delta_odd", e.delta_odd},
                                   {"delta_plus", e.delta_plus},
                                   {"delta_minus", e.delta_minus},
                                   {"ratio", e.ratio}});
    if (i % stride == 0 || i + 1 == rep.entries.size()) {
      t.rows.push_back({std::to_string(e.k), fmt_double(e.sigma),
                        fmt_double(e.delta_even), fmt_double(e.delta_odd),
                        fmt_double(e.delta_plus), fmt_double(e.delta_minus),
                        fmt_double(e.ratio)});
    }
  }
  r.tables.push_back(std::move(t));
  r.sound = rep.max_rel_error <= 1e-12;
  r.contract_holds = !rep.unbounded();
  if (!r.contract_holds) {
    r.witness = "‖δ₊δ₋‖ / (‖δ₊‖‖δ₋‖_∞) = σ(k) reaches " +
                fmt_double(rep.entries.back().ratio);
  }
  return r;
}

inline FinSuppVector chi_on_prefix(const std::string& text, std::size_t k) {
  const auto e = parse_expression(text);
  FinSuppVector chi;
  for (Index x = 1; x <= k; ++x) chi.set(x, expr::evaluate(*e, x).to_double());
  return chi;
}

inline Report ce_b4(const RunConfig& c) {
  const auto k = prefix_or(c, 200);
  const auto chi = chi_on_prefix(c.chi.empty() ? "1/(1+k)" : c.chi, k);
  const auto rep = theta_homomorphism_check(chi, c.trials, c.seed);
  Report r;
  r.result["points"] = k;
  r.result["trials"] = rep.trials;
  r.result["max_defect"] = rep.max_defect;
  r.result["contraction"] = rep.contraction;
  r.tables.push_back({"θ_χ on " + std::to_string(k) + " points",
                      {"check", "value"},
                      {{"max ‖θ(f*g) - θ(f)θ(g)‖_∞", fmt_double(rep.max_defect)},
                       {"‖θ(f)‖_∞ <= ‖f‖_1", fmt_bool(rep.contraction)}}});
  r.contract_holds = rep.max_defect <= 1e-12 && rep.contraction;
  if (!r.contract_holds) {
    r.witness = "homomorphism defect " + fmt_double(rep.max_defect);
  }
  return r;
}

inline Report ce_b5(const RunConfig& c) {
  SeqVector f;
  if (c.f_file.empty()) {
    f.set(1, 1.0);
    f.set(2, -1.0);
  } else {
    f = io::read_sparse_file<Index>(c.f_file);
  }
  const auto family = ScaleFamily::parse(c.family.empty() ? "pow(k,n)" : c.family,
                                         std::max(c.d, 0));
  const auto rep = b5_not_in_schwartz(
      f, parse_expression(c.chi.empty() ? "1/(1+k)" : c.chi), family, c.d,
      prefix_or(c, 200));
  Report r;
  r.result["p"] = rep.p;
  r.result["d"] = rep.d;
  r.result["exceptional"] = rep.exceptional;
  r.result["chain_holds"] = rep.chain_holds;
  r.result["trend"] = to_string(rep.trend.verdict);
  Table t{"σ_d |θ_χ f| off the exceptional set",
          {"x", "exceptional", "σ_d|θf|", "σ_d χ^p |f(p)|/2"},
          {}};
  const std::size_t stride = std::max<std::size_t>(1, rep.entries.size() / 20);
  r.result["entries"] = Json::array();
  for (std::size_t i = 0; i < rep.entries.size(); ++i) {
    const auto& e = rep.entries[i];
    r.result["entries"].push_back({{"x", e.x},
                                   {"exceptional", e.exceptional},
                                   {"weighted_log", log_json(e.weighted)},
                                   {"lower_log", log_json(e.lower)}});
    if (i % stride == 0 || i + 1 == rep.entries.size()) {
      t.rows.push_back({std::to_string(e.x), fmt_bool(e.exceptional),
                        fmt_log(e.weighted), fmt_log(e.lower)});
    }
  }
  r.tables.push_back(std::move(t));
  r.sound = rep.chain_holds;
  r.contract_holds = !rep.unbounded();
  if (!r.contract_holds) {
    r.witness = "σ_d|θf| reaches " + fmt_log(rep.entries.back().weighted) +
                " at x = " + std::to_string(rep.entries.back().x) +
                " and keeps rising";
  }
  return r;
}

inline Report ce_b7(const RunConfig& c) {
  const auto list =
      c.list_file.empty() ? b7_default_list() : io::read_index_list_file(c.list_file);
  const auto rep = b7_enumerations(list, c.imax, c.d_max);
  Report r;
  r.result["bounded_by_gamma1_plus_one"] = rep.bounded_by_gamma1_plus_one;
  r.result["injective_on_list"] = rep.injective_on_list;
  r.result["points"] = Json::array();
  Table pts{"γ₁ and γ₂ on the evaluation list", {"γ₁", "γ₂", "special"}, {}};
  for (const auto& p : rep.points) {
    r.result["points"].push_back({{"gamma1_log", log_json(p.gamma1)},
                                  {"gamma2_log", log_json(p.gamma2)},
                                  {"special", p.special}});
    if (p.special || p.gamma1.log() > std::log(50.0)) {
      pts.rows.push_back({fmt_log(p.gamma1), fmt_log(p.gamma2), fmt_bool(p.special)});
    }
  }
  Table dom{"γ₁ <= C γ₂^d", {"d", "constant", "verdict"}, {}};
  r.result["per_d"] = Json::array();
  for (std::size_t i = 0; i < rep.per_d.size(); ++i) {
    const auto& x = rep.per_d[i];
    r.result["per_d"].push_back({{"d", i + 1},
                                 {"constant_log", log_json(x.constant)},
                                 {"verdict", to_string(x.verdict)}});
    dom.rows.push_back({std::to_string(i + 1), fmt_log(x.constant), to_string(x.verdict)});
  }
  r.tables.push_back(std::move(pts));
  r.tables.push_back(std::move(dom));
  r.sound = rep.bounded_by_gamma1_plus_one && rep.injective_on_list;
  r.contract_holds = !rep.all_refuted();
  if (!r.contract_holds) {
    r.witness = "no d <= " + std::to_string(c.d_max) +
                " has γ₁ <= C γ₂^d; ratio keeps rising at the special points";
  }
  return r;
}

inline Report ce_cantor(const RunConfig& c) {
  const auto rep = cantor_scale(c.pmax);
  Report r;
  r.result["p_max"] = rep.p_max;
  r.result["count"] = rep.count;
  r.result["bijective"] = rep.bijective;
  r.result["sandwich"] = rep.sandwich;
  r.result["equivalent"] = rep.equivalent;
  r.result["c_sigma_gamma"] = rep.c_sigma_gamma.to_double();
  r.result["c_gamma_sigma"] = rep.c_gamma_sigma.to_double();
  r.result["inverse_square_sum"] = rep.inverse_square_sum;
  r.result["summability"] = Json::array();
  for (const auto& e : rep.summability) r.result["summability"].push_back(summability_json(e));
  r.tables.push_back({"dyadic scale, p <= " + std::to_string(rep.p_max),
                      {"check", "value"},
                      {{"dyadics", std::to_string(rep.count)},
                       {"γ bijective onto 1..2^p_max", fmt_bool(rep.bijective)},
                       {"γ <= σ <= 2γ", fmt_bool(rep.sandwich)},
                       {"max σ/γ", fmt_log(rep.c_sigma_gamma)},
                       {"max γ/σ", fmt_log(rep.c_gamma_sigma)},
                       {"Σ 1/σ²", fmt_double(rep.inverse_square_sum)}}});
  r.tables.push_back(summability_table(rep.summability, "Σ σ^n/σ^m"));
  bool certified_all = true;
  for (int n = 0; n <= 2; ++n) {
    bool found = false;
    for (const auto& e : rep.summability) {
      found = found || (e.n == n && e.verdict == SummabilityVerdict::kCertified);
    }
    certified_all = certified_all && found;
  }
  r.contract_holds = rep.bijective && rep.sandwich && certified_all;
  if (!r.contract_holds) r.witness = "dyadic enumeration checks failed";
  return r;
}

inline Report ce_torus(const RunConfig& c) {
  FourierVector phi;
  if (c.phi_file.empty()) {
    phi.set(-3, 1.0);
    phi.set(1, Complex(0.0, 0.5));
    phi.set(4, 0.25);
  } else {
    phi = io::read_sparse_file<std::int64_t>(c.phi_file);
  }
  std::int64_t kmax = 1;
  for (const auto& [k, v] : phi) kmax = std::max(kmax, k < 0 ? -k : k);
  const int grid = c.grid > 0 ? c.grid : static_cast<int>(64 * kmax);
  const auto d = fourier_seminorm_demo(phi, c.order, grid);
  Report r;
  r.result["order"] = c.order;
  r.result["grid"] = grid;
  r.result["lhs"] = d.lhs;
  r.result["rhs"] = d.rhs;
  r.result["error_bound"] = d.error_bound;
  r.result["holds"] = d.holds;
  r.tables.push_back({"sup_k |k^i φ̂(k)| vs sup |∂^i φ|",
                      {"i", "coefficient seminorm", "grid sup", "grid error", "holds"},
                      {{std::to_string(c.order), fmt_double(d.lhs), fmt_double(d.rhs),
                        fmt_double(d.error_bound), fmt_bool(d.holds)}}});
  r.contract_holds = d.holds;
  if (!d.holds) r.witness = "coefficient seminorm exceeds the sampled sup";
  return r;
}

inline Report cmd_counterexample(const RunConfig& c) {
  static const std::map<std::string, std::function<Report(const RunConfig&)>> table{
      {"b1", ce_b1}, {"b2", ce_b2},       {"b4", ce_b4},       {"b5", ce_b5},
      {"b7", ce_b7}, {"cantor", ce_cantor}, {"torus", ce_torus}};
  auto it = table.find(c.example);
  if (it == table.end()) {
    throw ParseError("unknown counterexample '" + c.example + "'");
  }
  return it->second(c);
}

// ---------------------------------------------------------------------------

/// Runs one configured subcommand. Exit 0 iff the asserted contract holds
/// (flipped by expect_fail) and the self-checks pass; 1 for violations;
/// 2 for input errors.
inline int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  RunConfig c = config;
  c.seed = resolve_seed(c.seed);
  if (c.format != "json" && c.format != "csv" && c.format != "md") {
    err << "error: unknown format '" << c.format << "'\n";
    return kExitInput;
  }
  Report r;
  try {
    if (c.subcommand == "summability") {
      r = cmd_summability(c);
    } else if (c.subcommand == "p-summability") {
      r = cmd_p_summability(c);
    } else if (c.subcommand == "growth") {
      r = cmd_growth(c);
    } else if (c.subcommand == "ideal-check") {
      r = cmd_ideal_check(c);
    } else if (c.subcommand == "renorm") {
      r = cmd_renorm(c);
    } else if (c.subcommand == "counterexample") {
      r = cmd_counterexample(c);
    } else if (c.subcommand == "classify-standard-schwartz") {
      r = cmd_classify(c);
    } else {
      err << "error: unknown subcommand '" << c.subcommand << "'\n";
      return kExitInput;
    }
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitInput;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitInput;
  } catch (const ContractError& e) {
    err << "contract violation: " << e.what() << '\n';
    return kExitViolation;
  } catch (const ConvergenceError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitViolation;
  }
  render(c, r, out);
  if (!r.sound) {
    err << "self-check failed: the computation disagrees with its own "
           "closed forms or invariants\n";
    return kExitViolation;
  }
  if (!r.contract_holds) err << "violated: " << r.witness << '\n';
  const bool ok = r.contract_holds != c.expect_fail;
  if (!ok && r.contract_holds) {
    err << "expected a violation, but the contract holds\n";
  }
  return ok ? kExitOk : kExitViolation;
}

// ---------------------------------------------------------------------------
// argument parsing

/// Parses argv into a RunConfig. Returns an exit code when the program
/// should stop (help or a usage error).
inline std::optional<int> parse_args(int argc, const char* const* argv,
                                     RunConfig& c, std::ostream& out,
                                     std::ostream& err) {
  CLI::App app{"Scale, summability and ideal-inequality checks"};
  app.require_subcommand(1, 1);
  auto common = [&](CLI::App* s) {
    s->add_option("--K", c.k, "prefix length");
    s->add_option("--format", c.format, "json, csv or md")
        ->check(CLI::IsMember({"json", "csv", "md"}));
    s->add_option("--seed", c.seed, "RNG seed (SCALEKIT_SEED overrides)");
    s->add_flag("--expect-fail", c.expect_fail,
                "exit 0 only when the asserted contract is violated");
  };
  auto* sum = app.add_subcommand("summability", "Σ σ_n/σ_m over a scale family");
  common(sum);
  sum->add_option("--family", c.family, "family in k and n")->required();
  sum->add_option("--max-m", c.max_m, "largest m searched");
  sum->add_option("--n", c.ns, "values of n")->delimiter(',');

  auto* psum = app.add_subcommand("p-summability", "Σ p² ℓ_n/ℓ_m for block dimensions");
  common(psum);
  psum->add_option("--family", c.family, "family in k and n")->required();
  psum->add_option("--dims", c.dims, "dimension expression in k");
  psum->add_option("--dims-file", c.dims_file, "dimension fixture");
  psum->add_option("--max-m", c.max_m, "largest m searched");
  psum->add_option("--n", c.ns, "values of n")->delimiter(',');

  auto* growth = app.add_subcommand("growth", "growth condition on block dimensions");
  common(growth);
  growth->add_option("--dims", c.dims, "dimension expression in k");
  growth->add_option("--dims-file", c.dims_file, "dimension fixture");
  growth->add_option("--theta-file", c.theta_file, "ϑ forward table");
  growth->add_option("--d-max", c.d_max, "largest power tried");

  auto* ideal = app.add_subcommand("ideal-check", "randomized ideal inequalities");
  common(ideal);
  ideal->add_option("--family", c.family, "family in k and n")->required();
  ideal->add_option("--max-n", c.max_n, "largest n");
  ideal->add_option("--trials", c.trials, "random trials");
  ideal->add_option("--dims", c.dims, "block dimensions (block-socle instance)");
  ideal->add_option("--dims-file", c.dims_file, "dimension fixture");
  ideal->add_option("--f", c.f_file, "fixture for f");
  ideal->add_option("--g", c.g_file, "fixture for g (or φ)");

  auto* renorm = app.add_subcommand("renorm", "renormalized m-convex norms");
  common(renorm);
  renorm->add_option("--kind", c.kind, "pointwise, paired, block or trivial");
  renorm->add_option("--family", c.family, "family in k and n");
  renorm->add_option("--sigma", c.sigma, "scale for the paired instance");
  renorm->add_option("--dims", c.dims, "block dimensions");
  renorm->add_option("--dims-file", c.dims_file, "dimension fixture");
  renorm->add_option("--max-n", c.max_n, "largest n");
  renorm->add_option("--trials", c.trials, "random trials");

  auto* ce = app.add_subcommand("counterexample", "worked examples and counterexamples");
  common(ce);
  ce->add_option("name", c.example, "b1, b2, b4, b5, b7, cantor or torus")
      ->required()
      ->check(CLI::IsMember({"b1", "b2", "b4", "b5", "b7", "cantor", "torus"}));
  ce->add_option("--dims", c.dims, "block dimensions (b1)");
  ce->add_option("--dims-file", c.dims_file, "dimension fixture (b1)");
  ce->add_option("--n", c.n, "n (b1)");
  ce->add_option("--m", c.m, "m (b1)");
  ce->add_option("--sigma", c.sigma, "scale (b2)");
  ce->add_option("--chi", c.chi, "χ in (0, 1) (b4, b5)");
  ce->add_option("--family", c.family, "family in k and n (b5)");
  ce->add_option("--d", c.d, "family member (b5)");
  ce->add_option("--f", c.f_file, "sparse f (b5)");
  ce->add_option("--trials", c.trials, "random pairs (b4)");
  ce->add_option("--imax", c.imax, "last special index (b7)");
  ce->add_option("--d-max", c.d_max, "largest power tried (b7)");
  ce->add_option("--list-file", c.list_file, "evaluation list (b7)");
  ce->add_option("--pmax", c.pmax, "largest dyadic level (cantor)");
  ce->add_option("--phi", c.phi_file, "Fourier coefficients (torus)");
  ce->add_option("--order", c.order, "derivative order (torus)");
  ce->add_option("--grid", c.grid, "sample points (torus)");

  auto* cls = app.add_subcommand("classify-standard-schwartz",
                                 "standard Schwartz test for block ideals");
  common(cls);
  cls->add_option("--dims", c.dims, "dimension expression in k");
  cls->add_option("--dims-file", c.dims_file, "dimension fixture");
  cls->add_option("--theta-file", c.theta_file, "ϑ forward table");
  cls->add_option("--d-max", c.d_max, "largest power tried");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }
  for (auto* s : app.get_subcommands()) c.subcommand = s->get_name();
  return std::nullopt;
}

inline int main(int argc, const char* const* argv, std::ostream& out,
                std::ostream& err) {
  RunConfig c;
  if (auto code = parse_args(argc, argv, c, out, err)) return *code;
  return run(c, out, err);
}

}  // namespace scalekit::cli
