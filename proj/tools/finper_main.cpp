// Command-line workbench: group information, character tables, Bessel tables,
// matching across the quadratic extension, and the named verification suites.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "finper/verify.hpp"

using namespace finper;

namespace {

std::string mat_str(const Mat& m) {
  std::string s = "[";
  for (int i = 0; i < m.n; ++i) {
    if (i) s += "; ";
    for (int j = 0; j < m.n; ++j) {
      if (j) s += " ";
      s += std::to_string(m.at(i, j));
    }
  }
  return s + "]";
}

struct CommonOpts {
  int n = 2, p = 3, k = 1;
  bool tower = false;
  std::string mode = "exact";
  double tol = 1e-9;
  std::string cache_dir;
  int threads = 0;
  uint64_t seed = 20240901;
  long budget = kDefaultBudget;
  bool exploratory = false;
};

void add_group_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--n", o.n, "matrix size")->check(CLI::Range(2, 3));
  cmd->add_option("--p", o.p, "characteristic")->check(CLI::Range(2, 97));
  cmd->add_option("--k", o.k, "degree of the base field over the prime field")->check(CLI::Range(1, 4));
  cmd->add_option("--budget", o.budget, "group enumeration budget");
}

void add_run_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--mode", o.mode, "arithmetic mode")->check(CLI::IsMember({"exact", "float"}));
  cmd->add_option("--tol", o.tol, "float-mode tolerance");
  cmd->add_option("--cache-dir", o.cache_dir, "directory for character-table caches");
  cmd->add_option("--threads", o.threads, "worker threads (0 = hardware)");
  cmd->add_option("--seed", o.seed, "random seed for the modular algebra");
  cmd->add_flag("--exploratory", o.exploratory, "enable the unitary side in characteristic two");
}

VerifyConfig to_config(const CommonOpts& o) {
  VerifyConfig c;
  c.n = o.n;
  c.p = o.p;
  c.k = o.k;
  c.mode = o.mode;
  c.tol = o.tol;
  c.cache_dir = o.cache_dir;
  c.threads = o.threads;
  c.seed = o.seed;
  c.budget = o.budget;
  c.exploratory = o.exploratory;
  return c;
}

int cmd_group_info(const CommonOpts& o) {
  if (o.tower) {
    FieldTower tw(o.p, o.k);
    GLContext c = make_tower_context(tw, o.n, o.budget);
    std::printf("group %s over the quadratic extension F_%ld / F_%ld\n", c.G.name.c_str(), tw.qt, tw.q);
    std::printf("order %ld, classes %ld\n", c.G.size(), c.G.num_classes());
    std::printf("|N| %ld  |A| %ld  |W| %ld  |P| %ld\n", c.N.size(), c.A.size(), c.W.size(), c.P.size());
    std::printf("fixed groups: |G^sigma| %ld  |G^tau| %ld\n", c.Gsig.size(), c.Gtau.size());
    std::printf("unipotent fixed parts: |N^sigma| %ld  |N^tau| %ld\n", c.Nsig.size(), c.Ntau.size());
    std::printf("norm-one sets: |X_sigma| %ld  |X_tau| %ld\n", c.Xsig.size(), c.Xtau.size());
    Rat cst = Rat(c.G.size()) / Rat(c.Gsig.size() * c.Gtau.size());
    std::printf("|G| / (|G^sigma||G^tau|) = %s\n", rat_str(cst).c_str());
  } else {
    FiniteField K(o.p, o.k);
    GLContext c = make_split_context(K, o.n, o.budget);
    std::printf("group %s\n", c.G.name.c_str());
    std::printf("order %ld, classes %ld\n", c.G.size(), c.G.num_classes());
    std::printf("|N| %ld  |A| %ld  |W| %ld  |P| %ld\n", c.N.size(), c.A.size(), c.W.size(), c.P.size());
  }
  return 0;
}

int cmd_char_table(const CommonOpts& o) {
  Session S(to_config(o));
  const Group* G = nullptr;
  std::unique_ptr<FieldTower> tw;
  std::unique_ptr<FiniteField> K;
  std::unique_ptr<Group> held;
  if (o.tower) {
    tw = std::make_unique<FieldTower>(o.p, o.k);
    held = std::make_unique<Group>(Group::general_linear(tw->E, o.n, o.budget));
  } else {
    K = std::make_unique<FiniteField>(o.p, o.k);
    held = std::make_unique<Group>(Group::general_linear(*K, o.n, o.budget));
  }
  G = held.get();
  const CharTable& T = S.table(*G);
  for (const std::string& w : S.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::printf("group %s: %ld irreducible characters\n", G->name.c_str(), T.num_chars());
  std::map<long, long> hist;
  for (long d : T.degrees) hist[d]++;
  for (const auto& [d, cnt] : hist) std::printf("degree %ld: %ld characters\n", d, cnt);
  std::printf("modular certificate: ell=%llu unity_order=%ld\n", static_cast<unsigned long long>(T.ell), T.unity_order);
  return 0;
}

int cmd_bessel(const CommonOpts& o) {
  Session S(to_config(o));
  std::unique_ptr<FieldTower> tw;
  std::unique_ptr<FiniteField> K;
  std::unique_ptr<GLContext> ctx;
  std::unique_ptr<PsiN> psi;
  if (o.tower) {
    tw = std::make_unique<FieldTower>(o.p, o.k);
    ctx = std::make_unique<GLContext>(make_tower_context(*tw, o.n, o.budget));
    psi = std::make_unique<PsiN>(tower_psiN(*tw, o.n, true));
  } else {
    K = std::make_unique<FiniteField>(o.p, o.k);
    ctx = std::make_unique<GLContext>(make_split_context(*K, o.n, o.budget));
    psi = std::make_unique<PsiN>(split_psiN(*K, o.n));
  }
  BesselEnv env = make_bessel_env(*ctx, *psi);
  const CharTable& T = S.table(ctx->G);
  for (const std::string& w : S.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::printf("group %s: %ld relevant cells\n", ctx->G.name.c_str(), env.cells.size());
  for (long c = 0; c < env.cells.size(); ++c)
    std::printf("cell %ld: %s\n", c, mat_str(env.cells.cells[static_cast<size_t>(c)].m).c_str());
  for (int i : generic_indices(env, T)) {
    std::vector<Cyc> B = bessel_via_character(env, T, i);
    std::printf("chi=%d deg=%ld:", i, T.degrees[static_cast<size_t>(i)]);
    for (long c = 0; c < env.cells.size(); ++c) {
      const Cyc& v = B[static_cast<size_t>(c)];
      if (o.mode == "float" && v.is_rational())
        std::printf(" %s", float_str(rat_to_double(v.as_rational())).c_str());
      else
        std::printf(" %s", cyc_str(v).c_str());
      if (c + 1 < env.cells.size()) std::printf(";");
    }
    std::printf("\n");
  }
  return 0;
}

int cmd_basechange(const CommonOpts& o) {
  Session S(to_config(o));
  TowerBundle& b = S.tower_bundle(o.p, o.k, o.n);
  ensure_tables(S, b);
  const CharTable& T = S.table(b.ctx.G);
  for (const std::string& w : S.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::vector<char> sides = {'s'};
  if (o.p % 2 == 1 || o.exploratory) sides.push_back('t');
  for (char kappa : sides) {
    const Group& F = b.fixed(kappa);
    const CharTable& Tf = S.table(F);
    const BesselEnv& env = b.env_for_match(kappa);
    const auto& tabs = b.tabs_of(env);
    std::printf("side kappa=%c: matching against %s\n", kappa, F.name.c_str());
    for (size_t kk = 0; kk < b.gen.size(); ++kk) {
      int i = b.gen[kk];
      if (!char_fixed_by(b.ctx.G, T.chars[static_cast<size_t>(i)], b.ctx.involution_map(kappa))) continue;
      long deg = T.degrees[static_cast<size_t>(i)];
      BaseChangePair pair = match_by_twisted_trace(env, tabs[kk], deg, i, kappa, F, Tf, b.p2(kappa));
      Rat lam = lambda_form(env, tabs[kk], opposite_involution(kappa)).as_rational();
      std::printf("chi=%d deg=%ld lambda=%s -> rho=%d dim=%ld status=%d\n", i, deg, rat_str(lam).c_str(), pair.rho,
                  pair.dim_rho, pair.status);
    }
  }
  return 0;
}

void write_csv(std::ostream& os, const std::vector<VerifyRow>& rows) {
  os << "suite,anchor,params,lhs,rhs,pass,micros\n";
  for (const VerifyRow& r : rows)
    os << r.suite << "," << r.anchor << "," << r.params << "," << r.lhs << "," << r.rhs << ","
       << (r.pass ? "1" : "0") << "," << r.micros << "\n";
}

Json summary_json(const Session& S, const std::string& suite) {
  Json j;
  Json cfg;
  cfg["n"] = S.cfg.n;
  cfg["p"] = S.cfg.p;
  cfg["k"] = S.cfg.k;
  cfg["mode"] = S.cfg.mode;
  cfg["tol"] = S.cfg.tol;
  cfg["suite"] = suite;
  cfg["cache_dir"] = S.cfg.cache_dir;
  cfg["threads"] = S.cfg.threads;
  cfg["seed"] = S.cfg.seed;
  cfg["budget"] = S.cfg.budget;
  cfg["exploratory"] = S.cfg.exploratory;
  j["config"] = std::move(cfg);
  long passed = 0;
  std::map<std::string, std::pair<long, long>> per;
  Json failures = Json::array();
  for (const VerifyRow& r : S.rows) {
    per[r.suite].second++;
    if (r.pass) {
      ++passed;
      per[r.suite].first++;
    } else {
      failures.push_back(r.suite + "/" + r.anchor + "/" + r.params);
    }
  }
  j["rows"] = S.rows.size();
  j["passed"] = passed;
  j["failed"] = static_cast<long>(S.rows.size()) - passed;
  Json suites;
  for (const auto& [name, pr] : per) {
    Json s;
    s["passed"] = pr.first;
    s["rows"] = pr.second;
    suites[name] = std::move(s);
  }
  j["suites"] = std::move(suites);
  j["failures"] = std::move(failures);
  j["warnings"] = S.warnings;
  j["all_pass"] = S.all_pass();
  return j;
}

int cmd_verify(const CommonOpts& o, const std::string& suite, const std::string& csv_path,
               const std::string& json_path) {
  Session S(to_config(o));
  run_suites(S, suite);
  if (csv_path.empty()) {
    write_csv(std::cout, S.rows);
  } else {
    std::ofstream out(csv_path);
    if (!out) {
      std::fprintf(stderr, "cannot write %s\n", csv_path.c_str());
      return 2;
    }
    write_csv(out, S.rows);
  }
  Json j = summary_json(S, suite);
  std::ofstream jout(json_path);
  if (!jout) {
    std::fprintf(stderr, "cannot write %s\n", json_path.c_str());
    return 2;
  }
  jout << j.dump(1) << "\n";
  for (const std::string& w : S.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::fprintf(stderr, "%ld rows, %s\n", static_cast<long>(S.rows.size()), S.all_pass() ? "all passed" : "FAILURES");
  return S.all_pass() ? 0 : 1;
}

int cmd_report(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) {
    std::fprintf(stderr, "cannot read %s\n", csv_path.c_str());
    return 2;
  }
  std::string line;
  std::getline(in, line);  // header
  long rows = 0, passed = 0;
  std::map<std::string, std::pair<long, long>> per;
  Json failures = Json::array();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (f.size() < 7) continue;
    ++rows;
    per[f[0]].second++;
    if (f[5] == "1") {
      ++passed;
      per[f[0]].first++;
    } else {
      failures.push_back(f[0] + "/" + f[1] + "/" + f[2]);
    }
  }
  Json j;
  j["rows"] = rows;
  j["passed"] = passed;
  j["failed"] = rows - passed;
  Json suites;
  for (const auto& [name, pr] : per) {
    Json s;
    s["passed"] = pr.first;
    s["rows"] = pr.second;
    suites[name] = std::move(s);
  }
  j["suites"] = std::move(suites);
  j["failures"] = std::move(failures);
  j["all_pass"] = (rows == passed);
  std::cout << j.dump(1) << "\n";
  return rows == passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finper: periods of Bessel functions over finite fields"};
  app.require_subcommand(1);
  CommonOpts o;

  CLI::App* gi = app.add_subcommand("group-info", "orders and class data of the groups in play");
  add_group_flags(gi, o);
  gi->add_flag("--tower", o.tower, "use the quadratic-extension context");

  CLI::App* ct = app.add_subcommand("char-table", "character table summary (cached when --cache-dir is set)");
  add_group_flags(ct, o);
  add_run_flags(ct, o);
  ct->add_flag("--tower", o.tower, "use the quadratic-extension context");

  CLI::App* be = app.add_subcommand("bessel", "Bessel tables of the generic characters on the relevant cells");
  add_group_flags(be, o);
  add_run_flags(be, o);
  be->add_flag("--tower", o.tower, "use the quadratic-extension context");

  CLI::App* bc = app.add_subcommand("basechange", "match stable generic characters with the opposite fixed group");
  add_group_flags(bc, o);
  add_run_flags(bc, o);

  CLI::App* vf = app.add_subcommand("verify", "run verification suites and emit a CSV report");
  add_group_flags(vf, o);
  add_run_flags(vf, o);
  std::string suite = "all", csv_path, json_path = "finper_summary.json";
  vf->add_option("--suite", suite, "suite to run")
      ->check(CLI::IsMember({"main", "scalar", "reg", "split", "spectral", "bz", "all"}));
  vf->add_option("--csv", csv_path, "write the CSV report here instead of stdout");
  vf->add_option("--json", json_path, "path of the JSON summary");

  CLI::App* rp = app.add_subcommand("report", "summarize an existing CSV report as JSON");
  std::string report_csv;
  rp->add_option("csv", report_csv, "CSV report to summarize")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gi->parsed()) return cmd_group_info(o);
    if (ct->parsed()) return cmd_char_table(o);
    if (be->parsed()) return cmd_bessel(o);
    if (bc->parsed()) return cmd_basechange(o);
    if (vf->parsed()) return cmd_verify(o, suite, csv_path, json_path);
    if (rp->parsed()) return cmd_report(report_csv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
