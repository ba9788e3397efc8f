#include "pk/harness.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <json.hpp>
#include <sstream>

#include "pk/errors.hpp"
#include "pk/kepler.hpp"
#include "pk/lucas.hpp"
#include "pk/monothetic.hpp"

namespace pk {

using json = nlohmann::ordered_json;

std::set<Cell> enumerate_region(const Region& r, prime_t p, long n) {
  if (n < 1 || n > kMaxEnumerationDepth) {
    throw InvalidArgument("cost guard exceeded: enumeration depth must be in 1.." +
                          std::to_string(kMaxEnumerationDepth));
  }
  if (!r.field().is_qp() || r.field().p() != p) throw InvalidArgument("enumeration needs a region over Q_p");
  std::set<Cell> out;
  for (const Cell& c : all_cells(p, n)) {
    if (r.intersects(cell_term(c, p, n))) out.insert(c);
  }
  return out;
}

OracleReport residue_oracle(const Region& r, const std::vector<Point>& samples, prime_t p, long n) {
  OracleReport rep;
  rep.p = p;
  rep.depth = n;
  const std::set<Cell> met = enumerate_region(r, p, n);
  std::set<Cell> hit;
  for (const Point& z : samples) hit.insert(cell_of(z, p, n));
  rep.residues_checked = all_cells(p, n).size();
  for (const Cell& c : hit) {
    if (!met.count(c)) rep.mismatches.push_back("+" + c.to_string());
  }
  for (const Cell& c : met) {
    if (hit.count(c)) {
      ++rep.visited;
    } else {
      ++rep.unvisited;
      rep.mismatches.push_back("-" + c.to_string());
    }
  }
  return rep;
}

long default_precision_cap() {
  const char* env = std::getenv("KEPLER_MAX_PREC");
  if (env == nullptr || *env == '\0') return kDefaultPrecisionCap;
  Integer v = parse_integer(env);
  if (v < 8 || v > 1 << 20) throw InvalidArgument("KEPLER_MAX_PREC must be in 8..1048576");
  return v.get_si();
}

namespace {

struct Common {
  bool json = false;
  long prec = 0;  // 0: default cap
  long cap() const { return prec != 0 ? prec : default_precision_cap(); }
};

struct RecurrenceArgs {
  std::string p = "3";
  std::string r;
  std::string s;
  std::string a0;
  std::string a1;

  RecurrenceSpec spec(long cap) const {
    RecurrenceSpec out;
    out.p = parse_prime(p);
    out.r = parse_rational(r);
    out.s = parse_rational(s);
    out.a0 = parse_rational(a0);
    out.a1 = parse_rational(a1);
    out.max_precision = cap;
    out.validate();
    return out;
  }

  static prime_t parse_prime(const std::string& text) {
    Integer v = parse_integer(text);
    if (v < 2 || !v.fits_ulong_p()) throw InvalidArgument("p must be an odd prime");
    prime_t p = v.get_ui();
    require_odd_prime(p);
    return p;
  }

  void attach(CLI::App* cmd) {
    cmd->add_option("--p", p, "odd prime")->required();
    cmd->add_option("--r", r, "recurrence coefficient r (rational)")->required();
    cmd->add_option("--s", s, "recurrence coefficient s (rational, nonzero)")->required();
    cmd->add_option("--a0", a0, "initial term a0 (rational)")->required();
    cmd->add_option("--a1", a1, "initial term a1 (rational)")->required();
  }

  json input() const { return {{"p", p}, {"r", r}, {"s", s}, {"a0", a0}, {"a1", a1}}; }
};

i64 parse_small(const std::string& text, const char* what) {
  Integer v = parse_integer(text);
  if (!v.fits_slong_p()) throw InvalidArgument(std::string(what) + " out of range");
  return v.get_si();
}

std::string variant_name(KeplerDescription::Variant v) {
  switch (v) {
    case KeplerDescription::Variant::ExactRegion:
      return "region";
    case KeplerDescription::Variant::FinitePeriodic:
      return "periodic";
    case KeplerDescription::Variant::ConvergentTail:
      return "convergent";
    case KeplerDescription::Variant::Degenerate:
      return "degenerate";
  }
  return "";
}

json points_json(const std::vector<Point>& pts) {
  json arr = json::array();
  for (const Point& z : pts) arr.push_back(z.to_string());
  return arr;
}

json terms_json(const Region& r) {
  json arr = json::array();
  for (const RegionTerm& t : r.terms()) {
    if (const auto* b = std::get_if<Ball>(&t)) {
      arr.push_back({{"type", "ball"}, {"center", b->center.to_string()}, {"exponent", b->m}});
    } else if (const auto* cb = std::get_if<CoBall>(&t)) {
      arr.push_back({{"type", "complement"}, {"center", cb->removed.center.to_string()}, {"exponent", cb->removed.m}});
    } else {
      arr.push_back({{"type", "point"}, {"value", std::get<Point>(t).to_string()}});
    }
  }
  return arr;
}

std::string emit(const json& j) { return j.dump(2) + "\n"; }

CliResult cmd_kepler(const RecurrenceArgs& ra, const Common& c, bool moebius, long depth) {
  const RecurrenceSpec spec = ra.spec(c.cap());
  CliResult res;
  if (moebius) {
    Region r = kepler_set_via_moebius(spec);
    if (c.json) {
      res.out = emit({{"schema", 1},
                      {"command", "kepler"},
                      {"input", ra.input()},
                      {"route", "moebius"},
                      {"description", r.to_string()},
                      {"terms", terms_json(r)}});
    } else {
      res.out = r.to_string() + "\n";
    }
    return res;
  }
  const KeplerDescription kd = kepler_set(spec, depth);
  if (c.json) {
    json j = {{"schema", 1},
              {"command", "kepler"},
              {"input", ra.input()},
              {"case", to_string(kd.tag)},
              {"variant", variant_name(kd.variant)},
              {"field", kd.field.kind() == LocalField::Kind::Base ? "Qp" : "Qp(sqrt(" + to_string(kd.field.d()) + "))"},
              {"description", kd.to_string()}};
    if (kd.region) j["terms"] = terms_json(*kd.region);
    if (!kd.points.empty()) j["points"] = points_json(kd.points);
    if (kd.limit) {
      j["limit"] = kd.limit->to_string();
      j["tail_start"] = kd.tail_start;
      j["tail_depth"] = kd.tail_depth;
    }
    if (kd.l != 0) j["l"] = kd.l;
    if (kd.l != 0) j["k"] = kd.k.to_string();
    if (kd.s) j["s"] = *kd.s;
    res.out = emit(j);
  } else {
    res.out = kd.to_string() + "\ncase: " + to_string(kd.tag) + "\n";
  }
  return res;
}

CliResult cmd_verify(const RecurrenceArgs& ra, const Common& c, unsigned long n, long depth) {
  const RecurrenceSpec spec = ra.spec(c.cap());
  const VerifyReport rep = verify(spec, n, depth);
  CliResult res;
  res.status = rep.ok() ? 0 : 1;
  if (c.json) {
    json terms = json::array();
    for (const TermVisit& t : rep.terms) terms.push_back({{"term", t.term}, {"visits", t.visits}});
    json viol = json::array();
    for (unsigned long i : rep.violations) viol.push_back(i);
    res.out = emit({{"schema", 1},
                    {"command", "verify"},
                    {"input", ra.input()},
                    {"case", to_string(rep.tag)},
                    {"checked", rep.checked},
                    {"depth", depth},
                    {"violations", viol},
                    {"terms", terms},
                    {"unvisited_balls", rep.unvisited_balls},
                    {"cells_met", rep.cells_met},
                    {"cells_hit", rep.cells_hit},
                    {"pass", rep.ok()}});
    return res;
  }
  std::ostringstream os;
  os << "case: " << to_string(rep.tag) << "\n";
  os << "checked: " << rep.checked << " ratios\n";
  os << "violations: " << rep.violations.size();
  for (std::size_t i = 0; i < std::min<std::size_t>(rep.violations.size(), 10); ++i) {
    os << (i == 0 ? " (n = " : ", ") << rep.violations[i];
  }
  os << (rep.violations.empty() ? "" : ")") << "\n";
  for (const TermVisit& t : rep.terms) os << "term " << t.term << ": " << t.visits << " visits\n";
  os << "cells at depth " << depth << ": " << rep.cells_hit << " hit of " << rep.cells_met << " met\n";
  os << "result: " << (rep.ok() ? "PASS" : "FAIL") << "\n";
  res.out = os.str();
  return res;
}

CliResult cmd_closure(const std::string& p_text, const std::string& lambda_text, const Common& c) {
  const prime_t p = RecurrenceArgs::parse_prime(p_text);
  const QuadElement lambda = parse_quad(lambda_text);
  LocalField f = lambda.is_rational() ? LocalField::qp(p, c.cap()) : LocalField::of(classify(p, Rational(lambda.d())), c.cap());
  const ClosureDescriptor cl = closure_of(lambda, f);
  CliResult res;
  const std::optional<Integer> index = cl.index();
  if (c.json) {
    json reps = json::array();
    for (const QuadElement& r : cl.coset_reps) reps.push_back(r.to_string());
    res.out = emit({{"schema", 1},
                    {"command", "closure"},
                    {"input", {{"p", p_text}, {"lambda", lambda_text}}},
                    {"ambient", to_string(cl.ambient)},
                    {"l", cl.l},
                    {"k", cl.k.to_string()},
                    {"coset_reps", reps},
                    {"norm_constrained", cl.norm_constrained},
                    {"full_group", cl.full_group},
                    {"index", index ? json(to_string(*index)) : json(nullptr)},
                    {"description", cl.to_string()}});
    return res;
  }
  std::ostringstream os;
  os << cl.to_string() << "\n";
  os << "ambient: " << to_string(cl.ambient) << "\n";
  os << "l: " << cl.l << ", k: " << cl.k.to_string() << "\n";
  os << "index: " << (index ? to_string(*index) : std::string("inf")) << "\n";
  if (cl.full_group) os << "full group\n";
  res.out = os.str();
  return res;
}

std::string alpha_text(const std::optional<u64>& a) { return a ? std::to_string(*a) : std::string("inf"); }

CliResult cmd_rank(const std::string& p_text, const std::string& a_text, const std::string& b_text, bool full_field,
                   const Common& c) {
  const prime_t p = RecurrenceArgs::parse_prime(p_text);
  const LucasParams lp{parse_small(a_text, "a"), parse_small(b_text, "b")};
  const std::optional<u64> alpha = rank_of_appearance(p, lp);
  CliResult res;
  std::optional<FullFieldReport> ff;
  if (full_field) {
    ff = theorem4_full_field(p, lp);
    if (ff->verdict == FullFieldVerdict::Inapplicable) res.status = 2;
  }
  if (c.json) {
    json j = {{"schema", 1},
              {"command", "rank"},
              {"input", {{"p", p_text}, {"a", a_text}, {"b", b_text}}},
              {"alpha", alpha ? json(*alpha) : json("inf")}};
    if (ff) {
      j["full_field"] = {{"verdict", to_string(ff->verdict)},
                         {"criterion", ff->criterion},
                         {"reason", ff->reason},
                         {"kepler_full", ff->kepler_full}};
    }
    res.out = emit(j);
    return res;
  }
  res.out = "alpha: " + alpha_text(alpha) + "\n";
  if (ff) res.out += "full-field: " + to_string(ff->verdict) + " (" + ff->reason + ")\n";
  return res;
}

CliResult cmd_wss(const std::string& p_text, const Common& c) {
  const prime_t p = RecurrenceArgs::parse_prime(p_text);
  const bool w = is_wall_sun_sun(p);
  CliResult res;
  if (c.json) {
    res.out = emit({{"schema", 1},
                    {"command", "wss"},
                    {"input", {{"p", p_text}}},
                    {"alpha", alpha_text(rank_of_appearance(p, LucasParams{1, 1}))},
                    {"wall_sun_sun", w}});
  } else {
    res.out = std::string("wall-sun-sun: ") + (w ? "true" : "false") + "\n";
  }
  return res;
}

CliResult cmd_census(const std::string& limit_text, const std::string& first_text, const std::string& a_text,
                     const std::string& b_text, bool windows, unsigned threads, const std::string& window_text,
                     const Common& c) {
  CensusOptions opt;
  opt.a = parse_small(a_text, "a");
  opt.b = parse_small(b_text, "b");
  opt.threads = threads;
  opt.window = parse_integer(window_text, true).get_ui();
  CensusReport rep;
  if (!first_text.empty()) {
    Integer n = parse_integer(first_text, true);
    if (!n.fits_ulong_p()) throw InvalidArgument("prime count out of range");
    opt.cap = 20000000;
    rep = census_first_primes(n.get_ui(), opt);
  } else {
    Integer n = parse_integer(limit_text, true);
    if (!n.fits_ulong_p()) throw InvalidArgument("census limit exceeds the cap " + std::to_string(opt.cap));
    rep = census(n.get_ui(), opt);
  }
  CliResult res;
  if (c.json) {
    json j = {{"schema", 1},
              {"command", "census"},
              {"input", {{"a", opt.a}, {"b", opt.b}}},
              {"limit", rep.row.limit},
              {"primes", rep.row.primes_total},
              {"satisfying", rep.row.primes_satisfying},
              {"proportion", rep.row.proportion_text()}};
    if (windows) {
      j["window"] = rep.window;
      j["window_counts"] = rep.window_counts;
      j["window_sizes"] = rep.window_sizes;
    }
    res.out = emit(j);
    return res;
  }
  std::ostringstream os;
  os << "limit primes satisfying proportion\n";
  os << rep.row.limit << " " << rep.row.primes_total << " " << rep.row.primes_satisfying << " "
     << rep.row.proportion_text() << "\n";
  if (windows) {
    for (std::size_t i = 0; i < rep.window_counts.size(); ++i) {
      os << "window " << i << ": " << rep.window_counts[i] << " of " << rep.window_sizes[i] << "\n";
    }
  }
  res.out = os.str();
  return res;
}

CliResult cmd_tworow(const std::string& p_text, const std::string& a_text, unsigned long samples, const Common& c) {
  const prime_t p = RecurrenceArgs::parse_prime(p_text);
  const TwoRowReport rep = two_row_union(p, parse_small(a_text, "a"), samples);
  CliResult res;
  if (!rep.applicable) res.status = 2;
  if (c.json) {
    json j = {{"schema", 1},
              {"command", "tworow"},
              {"input", {{"p", p_text}, {"a", a_text}}},
              {"applicable", rep.applicable},
              {"alpha", alpha_text(rep.alpha)}};
    if (!rep.applicable) {
      j["reason"] = rep.reason;
    } else {
      j["rows"] = {rep.m1, rep.m2};
      j["small_shifts"] = rep.small_shifts;
      j["K1"] = rep.k1->to_string();
      j["K2"] = rep.k2->to_string();
      j["union_is_qp"] = rep.union_is_qp;
      j["samples"] = rep.samples;
      j["sample_violations"] = rep.sample_violations;
      j["cells_hit"] = rep.cells_hit;
      j["cells_total"] = rep.cells_total;
    }
    res.out = emit(j);
    return res;
  }
  std::ostringstream os;
  os << "alpha: " << alpha_text(rep.alpha) << "\n";
  if (!rep.applicable) {
    os << "inapplicable: " << rep.reason << "\n";
    res.out = os.str();
    return res;
  }
  os << "K_" << rep.m1 << ": " << rep.k1->to_string() << "\n";
  os << "K_" << rep.m2 << ": " << rep.k2->to_string() << "\n";
  os << "union: " << (rep.union_is_qp ? "Qp" : "not Qp") << "\n";
  os << "samples: " << rep.samples << " per row, " << rep.sample_violations << " outside, " << rep.cells_hit << " of "
     << rep.cells_total << " cells mod p^2 hit\n";
  res.out = os.str();
  return res;
}

}  // namespace

CliResult run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Kepler sets of second-order recurrences over Q_p", "pkepler"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_flag("--json", common.json, "emit JSON");
  app.add_option("--prec", common.prec, "precision cap in digits (default 256, or KEPLER_MAX_PREC)")
      ->check(CLI::Range(8L, 1L << 20));

  RecurrenceArgs kep;
  bool moebius = false;
  long depth = kDefaultTailDepth;
  CLI::App* kepler = app.add_subcommand("kepler", "Kepler set of a_{n+1} = r a_n + s a_{n-1}");
  kep.attach(kepler);
  kepler->add_flag("--moebius", moebius, "compute through the Moebius image of the closure");
  kepler->add_option("--tail-depth", depth, "ball depth for convergent tails")->check(CLI::Range(1L, 64L));

  RecurrenceArgs ver;
  unsigned long n_max = 2000;
  long vdepth = 3;
  CLI::App* verify_cmd = app.add_subcommand("verify", "check ratios against the computed description");
  ver.attach(verify_cmd);
  verify_cmd->add_option("--n", n_max, "largest ratio index")->check(CLI::Range(1UL, 1000000UL));
  verify_cmd->add_option("--depth", vdepth, "residue depth")->check(CLI::Range(1L, 12L));

  std::string p_text;
  std::string lambda_text;
  CLI::App* closure = app.add_subcommand("closure", "closed subgroup generated by a unit");
  closure->add_option("--p", p_text, "odd prime")->required();
  closure->add_option("--lambda", lambda_text, "unit, e.g. 2 + sqrt(5) or 4/7")->required();

  std::string a_text = "1";
  std::string b_text = "1";
  bool full_field = false;
  CLI::App* rank = app.add_subcommand("rank", "rank of appearance of p in L(a,b)");
  rank->add_option("--p", p_text, "odd prime")->required();
  rank->add_option("--a", a_text, "Lucas parameter a");
  rank->add_option("--b", b_text, "Lucas parameter b");
  rank->add_flag("--full-field", full_field, "also decide whether the Kepler set is Q_p");

  CLI::App* wss = app.add_subcommand("wss", "Wall-Sun-Sun test");
  wss->add_option("--p", p_text, "odd prime")->required();

  std::string limit_text = "1e6";
  std::string first_text;
  std::string window_text = "1e5";
  bool windows = false;
  unsigned threads = 0;
  CLI::App* census_cmd = app.add_subcommand("census", "count primes with alpha_L(p) = p + 1");
  census_cmd->add_option("--limit", limit_text, "largest prime, e.g. 1e6");
  census_cmd->add_option("--first-primes", first_text, "use the first N primes instead of a limit");
  census_cmd->add_option("--a", a_text, "Lucas parameter a");
  census_cmd->add_option("--b", b_text, "Lucas parameter b");
  census_cmd->add_flag("--windows", windows, "per-window counts");
  census_cmd->add_option("--window", window_text, "primes per window");
  census_cmd->add_option("--threads", threads, "worker threads (0: all cores)");

  unsigned long samples = 2000;
  CLI::App* tworow = app.add_subcommand("tworow", "union of two shifted-ratio closures of L(a,1)");
  tworow->add_option("--p", p_text, "odd prime")->required();
  tworow->add_option("--a", a_text, "Lucas parameter a");
  tworow->add_option("--samples", samples, "sampled ratios per row")->check(CLI::Range(1UL, 100000UL));

  CliResult res;
  std::ostringstream out;
  std::ostringstream err;
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    res.status = app.exit(e, out, err) == 0 ? 0 : 1;
    res.out = out.str();
    res.err = err.str();
    return res;
  }

  try {
    if (kepler->parsed()) return cmd_kepler(kep, common, moebius, depth);
    if (verify_cmd->parsed()) return cmd_verify(ver, common, n_max, vdepth);
    if (closure->parsed()) return cmd_closure(p_text, lambda_text, common);
    if (rank->parsed()) return cmd_rank(p_text, a_text, b_text, full_field, common);
    if (wss->parsed()) return cmd_wss(p_text, common);
    if (census_cmd->parsed()) {
      return cmd_census(limit_text, first_text, a_text, b_text, windows, threads, window_text, common);
    }
    if (tworow->parsed()) return cmd_tworow(p_text, a_text, samples, common);
  } catch (const Inapplicable& e) {
    res.status = 2;
    res.err = std::string("inapplicable: ") + e.what() + "\n";
    return res;
  } catch (const std::exception& e) {
    res.status = 1;
    res.err = std::string("error: ") + e.what() + "\n";
    return res;
  }
  res.status = 1;
  res.err = "error: no subcommand\n";
  return res;
}

}  // namespace pk
