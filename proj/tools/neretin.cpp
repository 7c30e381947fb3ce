// Command-line front end: builds complexes, runs the connectivity and
// descending-link checks, group arithmetic and the cell-trading staircase.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unistd.h>

#include "neretin/neretin.hpp"

namespace fs = std::filesystem;
using namespace neretin;

namespace {

constexpr const char* kVersion = "0.3.0";

enum Exit { kOk = 0, kCheck = 1, kUsage = 2, kGuard = 3, kSchedule = 4 };

class GuardExceeded : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Parameters echoed into every output header. std::map keeps them sorted.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> params;
  std::vector<std::string> inputs;
  std::string output;
  std::uint64_t seed = 0;

  Json json() const {
    Json j;
    j["command"] = command;
    Json p = Json::object();
    for (const auto& [k, v] : params) p[k] = v;
    j["params"] = p;
    j["inputs"] = inputs;
    j["output"] = output.empty() ? "-" : output;
    j["seed"] = seed;
    j["version"] = kVersion;
    return j;
  }
  std::string csv_header() const {
    std::ostringstream out;
    out << "# neretin " << kVersion << " " << command << "\n";
    for (const auto& [k, v] : params) out << "# " << k << "=" << v << "\n";
    for (const auto& in : inputs) out << "# input=" << in << "\n";
    out << "# output=" << (output.empty() ? "-" : output) << "\n";
    out << "# seed=" << seed << "\n";
    return out.str();
  }
};

struct Common {
  std::string out;
  std::uint64_t seed = 0;
};

// --out as given, else a file named after the command in NERETIN_OUT_DIR,
// else stdout (empty).
std::string resolve_output(const std::string& flag, const std::string& default_name) {
  const char* dir = std::getenv("NERETIN_OUT_DIR");
  if (!flag.empty()) {
    if (flag == "-") return "";
    fs::path p(flag);
    if (p.is_relative() && dir && *dir) p = fs::path(dir) / p;
    return p.string();
  }
  if (dir && *dir) return (fs::path(dir) / default_name).string();
  return "";
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << content;
    if (!f.flush()) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, target);
}

Json read_json_arg(const std::string& arg) {
  std::string text = arg;
  if (!arg.empty() && arg.front() != '{' && arg.front() != '[') {
    std::ifstream f(arg);
    if (!f) throw InvalidArgument("cannot read '" + arg + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    text = ss.str();
  }
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(std::string("malformed JSON: ") + e.what());
  }
}

Config make_config(int q, const std::string& subgroup, int r = 1) {
  if (q < 2) throw InvalidArgument("q must be >= 2");
  if (q > 9) throw InvalidArgument("q must be <= 9");
  return Config(q, r, parse_subgroup(q, subgroup));
}

// Invariant factors with multiplicity, e.g. "2*3^4".
std::string torsion_summary(const DegreeHomology& h) {
  std::map<std::string, std::size_t> mult;
  std::vector<std::string> order;
  for (const auto& f : h.torsion)
    if (mult[f.str()]++ == 0) order.push_back(f.str());
  std::string s;
  for (const auto& f : order) s += (s.empty() ? "" : "*") + f + (mult[f] > 1 ? "^" + std::to_string(mult[f]) : "");
  return s;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string vertex_label(const DecoratedVertex& v) {
  std::string s;
  for (auto x : v.support) s += (s.empty() ? "" : " ") + std::to_string(x);
  return s + "|" + v.decoration.str();
}

// ---------------------------------------------------------------------------

struct BuildCn {
  int q = 2, n = 0;
  std::string subgroup = "sym", format = "json";
};

int run_build_cn(const BuildCn& o, const Common& c) {
  auto config = make_config(o.q, o.subgroup);
  auto cn = build_Cn(config, o.n);
  RunManifest m{"build-cn",
                {{"q", std::to_string(o.q)}, {"subgroup", o.subgroup}, {"D_order", std::to_string(config.D.order())},
                 {"n", std::to_string(o.n)}, {"format", o.format}},
                {}, "", c.seed};
  m.output = resolve_output(c.out, "build-cn-q" + std::to_string(o.q) + "-n" + std::to_string(o.n) + "." + o.format);
  std::string text;
  if (o.format == "json") {
    Json j;
    j["manifest"] = m.json();
    j["complex"] = to_json(cn);
    text = dump(j);
  } else {
    std::ostringstream out;
    out << m.csv_header() << "# vertices=" << cn.vertices.size() << "\n# edges=" << cn.edges.size() << "\n";
    out << "u,u_label,v,v_label\n";
    for (auto [a, b] : cn.edges)
      out << a << "," << vertex_label(cn.vertices[a]) << "," << b << "," << vertex_label(cn.vertices[b]) << "\n";
    text = out.str();
  }
  write_output(m.output, text);
  return kOk;
}

// ---------------------------------------------------------------------------

struct VerifyNu {
  int q = 2, nmax = 0;
  std::string subgroup = "sym";
  std::size_t pi1_budget = 200000;
  std::size_t cell_budget = 100000;  // top cells allowed for the extra degree nu+1
  int guard = 0;                     // 0: default for q
};

constexpr int kExtraTopDimension = 3;

int default_guard(int q) { return q == 2 ? 11 : q == 3 ? 9 : 2 * q + 1; }

int run_verify_nu(const VerifyNu& o, const Common& c) {
  auto config = make_config(o.q, o.subgroup);
  const int guard = o.guard > 0 ? o.guard : default_guard(o.q);
  if (o.nmax > guard)
    throw GuardExceeded("nmax=" + std::to_string(o.nmax) + " exceeds the resource guard " + std::to_string(guard) +
                        " (raise with --guard)");
  RunManifest m{"verify-nu",
                {{"q", std::to_string(o.q)}, {"subgroup", o.subgroup}, {"D_order", std::to_string(config.D.order())},
                 {"nmax", std::to_string(o.nmax)}, {"pi1_budget", std::to_string(o.pi1_budget)},
                 {"guard", std::to_string(guard)}, {"cell_budget", std::to_string(o.cell_budget)}},
                {}, "", c.seed};
  m.output = resolve_output(c.out, "verify-nu-q" + std::to_string(o.q) + ".csv");
  std::ostringstream out;
  out << m.csv_header() << "n,nu,vertices,nonempty,reduced_betti,torsion,verdict,pi1,degree_nu_plus_1\n";
  bool all_pass = true;
  for (int n = 1; n <= o.nmax; ++n) {
    const int nu = nu_bound(config, n);
    auto cn = build_Cn(config, n);
    // degrees through nu decide the verdict; nu+1 is reported when its
    // boundary fits the budget (Smith forms of 4-cell boundaries blow up)
    int through = std::max(nu + 1, 0);
    const bool cheap = through + 1 <= kExtraTopDimension;
    auto cx = cn.flag(cheap ? through + 1 : through);
    std::string extra = nu + 1 >= 0 ? "computed" : "n/a";
    if (nu >= 0 && (!cheap || cx.size(through + 1) > o.cell_budget)) {
      through = nu;
      cx = cx.truncated(through + 1);
      extra = "skipped";
    }
    auto h = reduced_homology(cx, through);
    bool pass = true;
    if (nu >= -1) pass = !h.empty;
    if (nu >= 0) pass = pass && h.vanishes_through(nu);
    all_pass = all_pass && pass;

    std::string betti, torsion;
    for (std::size_t d = 0; d < h.degrees.size(); ++d) {
      betti += (d ? ";" : "") + std::to_string(h.degrees[d].betti);
      torsion += (d ? ";" : "") + torsion_summary(h.degrees[d]);
    }
    std::string pi1 = "n/a";
    if (!h.empty && h.at(0).vanishes()) pi1 = to_string(pi1_report(cn.flag(2), o.pi1_budget).verdict);
    out << n << "," << nu << "," << cn.vertices.size() << "," << (h.empty ? "no" : "yes") << "," << (h.empty ? "" : betti)
        << "," << (h.empty ? "" : torsion) << "," << (nu < -1 ? "n/a" : pass ? "pass" : "fail") << "," << pi1 << "," << extra << "\n";
  }
  write_output(m.output, out.str());
  return all_pass ? kOk : kCheck;
}

// ---------------------------------------------------------------------------

struct DescLink {
  int q = 2, r = 1, n = 0, cap = kDescLinkCap;
  std::string subgroup = "sym", csv;
  bool star = false, full = false;
};

Json homology_json(const HomologyResult& h) {
  Json out = Json::array();
  if (h.empty) out.push_back({{"dim", -1}, {"betti", 1}, {"torsion", Json::array()}});
  for (const auto& d : h.degrees) {
    Json t = Json::array();
    for (const auto& x : d.torsion) t.push_back(x.str());
    out.push_back({{"dim", d.dim}, {"betti", d.betti}, {"torsion", t}});
  }
  return out;
}

struct PosetReport {
  Json json;
  HomologyResult homology;
};

int top_degree(const DescLinkPoset& lk) { return lk.poset.empty() ? 0 : height(lk.poset); }

PosetReport describe(const DescLinkPoset& lk, int top) {
  PosetReport r;
  r.homology = reduced_homology(order_complex(lk.poset, top + 1), top);
  Json comps = Json::array();
  for (const auto& comp : connected_components(lk.poset)) {
    auto sub = lk.poset.full_subcategory(comp);
    auto h = reduced_homology(order_complex(sub, height(sub) + 1), height(sub));
    comps.push_back({{"size", comp.size()}, {"acyclic", !h.empty && h.vanishes_through(height(sub))}});
  }
  r.json["objects"] = lk.poset.size();
  r.json["poset"] = to_json(lk.poset);
  r.json["homology"] = homology_json(r.homology);
  r.json["components"] = comps;
  return r;
}

bool same_homology(const HomologyResult& a, const HomologyResult& b) {
  if (a.empty != b.empty) return false;
  const std::size_t n = std::max(a.degrees.size(), b.degrees.size());
  for (std::size_t d = 0; d < n; ++d) {
    const bool za = d >= a.degrees.size() || a.degrees[d].vanishes();
    const bool zb = d >= b.degrees.size() || b.degrees[d].vanishes();
    if (za != zb) return false;
    if (!za && (a.degrees[d].betti != b.degrees[d].betti || a.degrees[d].torsion != b.degrees[d].torsion)) return false;
  }
  return true;
}

int run_desclink(DescLink o, const Common& c) {
  if (!o.star && !o.full) o.full = true;
  auto config = make_config(o.q, o.subgroup, o.r);
  RunManifest m{"desclink",
                {{"q", std::to_string(o.q)}, {"r", std::to_string(o.r)}, {"subgroup", o.subgroup},
                 {"D_order", std::to_string(config.D.order())}, {"n", std::to_string(o.n)},
                 {"cap", std::to_string(o.cap)}, {"models", std::string(o.full ? "full" : "") + (o.full && o.star ? "," : "") + (o.star ? "star" : "")}},
                {}, "", c.seed};
  m.output = resolve_output(c.out, "desclink-q" + std::to_string(o.q) + "-n" + std::to_string(o.n) + ".json");
  Json j;
  j["manifest"] = m.json();
  const std::string csv_path = o.csv.empty() ? "" : resolve_output(o.csv, o.csv);
  std::ostringstream csv;
  {
    RunManifest cm = m;
    cm.output = csv_path;
    csv << cm.csv_header();
  }
  bool header = true;
  std::optional<PosetReport> full, star;
  std::optional<DescLinkPoset> full_lk, star_lk;
  if (o.full) full_lk = enumerate_desc_link(config, o.n, o.cap);
  if (o.star) star_lk = enumerate_desc_link_star(config, o.n, o.cap);
  // both models are reported through the same degree
  const int top = std::max(full_lk ? top_degree(*full_lk) : 0, star_lk ? top_degree(*star_lk) : 0);
  if (full_lk) {
    full = describe(*full_lk, top);
    j["full"] = full->json;
    write_betti_csv(csv, "full", full->homology, header);
    header = false;
  }
  if (star_lk) {
    star = describe(*star_lk, top);
    j["star"] = star->json;
    write_betti_csv(csv, "star", star->homology, header);
  }
  bool ok = true;
  if (full && star) {
    star_inclusion(*star_lk, *full_lk);  // throws if lk* is not a full subposet
    ok = same_homology(full->homology, star->homology);
    j["comparison"] = {{"full_subposet", true}, {"same_homology", ok}};
  }
  write_output(m.output, dump(j));
  if (!csv_path.empty()) write_output(csv_path, csv.str());
  return ok ? kOk : kCheck;
}

// ---------------------------------------------------------------------------

struct GroupCmd {
  std::string op, a, b;
  int k = 0;
};

int run_group(const GroupCmd& o, const Common& c) {
  RunManifest m{"group " + o.op, {}, {}, "", c.seed};
  if (o.op == "subnormal") m.params["k"] = std::to_string(o.k);
  Json result;
  auto need = [](const std::string& s, const char* name) {
    if (s.empty()) throw InvalidArgument(std::string("group: missing --") + name);
    return spheromorphism_from_json(read_json_arg(s));
  };
  if (o.op == "compose") {
    m.inputs = {o.a, o.b};
    auto g = need(o.a, "a"), h = need(o.b, "b");
    result = to_json(canonical_form(compose(g, h)));
  } else if (o.op == "inverse") {
    m.inputs = {o.a};
    result = to_json(canonical_form(inverse(need(o.a, "a"))));
  } else if (o.op == "canon") {
    m.inputs = {o.a};
    result = to_json(canonical_form(need(o.a, "a")));
  } else if (o.op == "stab") {
    m.inputs = {o.a, o.b};
    auto phi = need(o.a, "a"), gamma = need(o.b, "b");
    result = {{"stabilizes", stabilizer_test(gamma, phi)},
              {"conjugate", to_string(classify_arrow(compose(inverse(phi), compose(gamma, phi))))}};
  } else if (o.op == "subnormal") {
    m.inputs = {o.a};
    if (o.k < 0) throw InvalidArgument("k must be >= 0");
    result = {{"kprime", subnormal_depth(need(o.a, "a"), o.k)}};
  } else {
    throw InvalidArgument("unknown group operation '" + o.op + "'");
  }
  m.output = resolve_output(c.out, "group-" + o.op + ".json");
  Json j;
  j["manifest"] = m.json();
  j["result"] = result;
  write_output(m.output, dump(j));
  return kOk;
}

// ---------------------------------------------------------------------------

struct Trade {
  std::string schedule;
  std::size_t prefix = 0;  // 0: whole sparsified schedule
};

Json euler_json(const EulerCharacteristic& e) {
  Json per = Json::object();
  for (const auto& [l, v] : e.per_label) per[l] = v;
  return {{"per_label", per}, {"total", e.total}};
}

int run_trade(const Trade& o, const Common& c) {
  auto input = schedule_from_json(read_json_arg(o.schedule));
  auto sp = sparsify(input);
  const std::size_t L = o.prefix == 0 ? sp.schedule.size() : o.prefix;
  if (L > sp.schedule.size())
    throw InvalidArgument("prefix " + std::to_string(L) + " exceeds the " + std::to_string(sp.schedule.size()) +
                          " sparsified stages");
  auto r = run_staircase(sp.schedule, L);
  RunManifest m{"trade", {{"prefix", std::to_string(L)}}, {o.schedule}, "", c.seed};
  m.output = resolve_output(c.out, "trade.json");
  Json j;
  j["manifest"] = m.json();
  j["sparsified_indices"] = sp.indices;
  j["final"] = to_json(r.final);
  j["log"] = to_json(r.log);
  j["euler_before"] = euler_json(euler_characteristic(sp.schedule.total(L)));
  j["euler_after"] = euler_json(euler_characteristic(r.final));
  write_output(m.output, dump(j));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neretin group complexes: connectivity, descending links, group arithmetic, cell trading"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--out,-o", common.out, "output file ('-' for stdout; relative paths resolve under NERETIN_OUT_DIR)");
  app.add_option("--seed", common.seed, "seed recorded in the manifest");

  BuildCn bc;
  auto* build = app.add_subcommand("build-cn", "write the decorated complex C_n");
  build->add_option("--q", bc.q, "tree branching")->required();
  build->add_option("--subgroup", bc.subgroup, "sym, triv or comma-separated generator words");
  build->add_option("--n", bc.n, "number of leaves")->required()->check(CLI::NonNegativeNumber);
  build->add_option("--format", bc.format)->check(CLI::IsMember({"json", "csv"}));

  VerifyNu vn;
  auto* verify = app.add_subcommand("verify-nu", "check the connectivity bound on C_n for n <= nmax");
  verify->add_option("--q", vn.q)->required();
  verify->add_option("--subgroup", vn.subgroup);
  verify->add_option("--nmax", vn.nmax)->required()->check(CLI::PositiveNumber);
  verify->add_option("--pi1-budget", vn.pi1_budget, "letter operations for the fundamental group search");
  verify->add_option("--cell-budget", vn.cell_budget, "largest top-dimensional cell count for the degree nu+1 column (computed only when nu+2 <= 3)");
  verify->add_option("--guard", vn.guard, "largest n allowed (default 11 for q=2, 9 for q=3)");

  DescLink dl;
  auto* desc = app.add_subcommand("desclink", "enumerate the descending link lk and/or its model lk*");
  desc->add_option("--q", dl.q)->required();
  desc->add_option("--subgroup", dl.subgroup);
  desc->add_option("--r", dl.r)->check(CLI::PositiveNumber);
  desc->add_option("--n", dl.n)->required()->check(CLI::PositiveNumber);
  desc->add_option("--cap", dl.cap, "largest n enumerated");
  desc->add_flag("--star", dl.star);
  desc->add_flag("--full", dl.full);
  desc->add_option("--csv", dl.csv, "also write the homology table here");

  GroupCmd gc;
  auto* group = app.add_subcommand("group", "element arithmetic on JSON elements (inline or file)");
  group->add_option("op", gc.op)->required()->check(CLI::IsMember({"compose", "inverse", "canon", "stab", "subnormal"}));
  group->add_option("--a,--phi", gc.a, "first element (compose: applied second)");
  group->add_option("--b,--gamma", gc.b, "second element");
  group->add_option("--k", gc.k);

  Trade tr;
  auto* trade = app.add_subcommand("trade", "sparsify a schedule and run the trading staircase");
  trade->add_option("--schedule", tr.schedule)->required();
  trade->add_option("--prefix", tr.prefix, "stages of the sparsified schedule to use (default all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*build) return run_build_cn(bc, common);
    if (*verify) return run_verify_nu(vn, common);
    if (*desc) return run_desclink(dl, common);
    if (*group) return run_group(gc, common);
    if (*trade) return run_trade(tr, common);
  } catch (const ScheduleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSchedule;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const CapExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kGuard;
  } catch (const GuardExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kGuard;
  } catch (const CheckFailed& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return kCheck;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheck;
  }
  return kUsage;
}
