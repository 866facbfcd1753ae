#include <catch_amalgamated.hpp>

#include <algorithm>

#include "finper/gelfand_graev.hpp"

using namespace finper;

namespace {
const FieldTower& tower21() {
  static FieldTower t(2, 1);
  return t;
}
const FieldTower& tower31() {
  static FieldTower t(3, 1);
  return t;
}
const GLContext& ctx21() {
  static GLContext c = make_tower_context(tower21(), 2);
  return c;
}
const GLContext& ctx31() {
  static GLContext c = make_tower_context(tower31(), 2);
  return c;
}
const CharTable& table21() {
  static CharTable t = dixon_character_table(ctx21().G);
  return t;
}
const CharTable& table31() {
  static CharTable t = dixon_character_table(ctx31().G);
  return t;
}
const PsiN& psi21_tau() {
  static PsiN p = tower_psiN(tower21(), 2, true);
  return p;
}
const PsiN& psi31_tau() {
  static PsiN p = tower_psiN(tower31(), 2, true);
  return p;
}
const BesselEnv& env21() {
  static BesselEnv e = make_bessel_env(ctx21(), psi21_tau());
  return e;
}
const BesselEnv& env31() {
  static BesselEnv e = make_bessel_env(ctx31(), psi31_tau());
  return e;
}

std::vector<std::vector<Cyc>> all_tables(const BesselEnv& env, const CharTable& T, std::vector<int>* chis = nullptr) {
  std::vector<std::vector<Cyc>> tabs;
  for (int i : generic_indices(env, T)) {
    tabs.push_back(bessel_via_character(env, T, i));
    REQUIRE(!tabs.back().empty());
    if (chis) chis->push_back(i);
  }
  return tabs;
}

bool char_stable(const GLContext& c, const std::vector<Cyc>& chi, const std::vector<int32_t>& map) {
  for (long cls = 0; cls < c.G.num_classes(); ++cls) {
    long im = c.G.class_of[static_cast<size_t>(map[static_cast<size_t>(c.G.class_rep[static_cast<size_t>(cls)])])];
    if (!(chi[static_cast<size_t>(im)] == chi[static_cast<size_t>(cls)])) return false;
  }
  return true;
}
}  // namespace

TEST_CASE("relevant cell counts", "[gelfand]") {
  FiniteField f2(2, 1);
  CHECK(relevant_cells(f2, 2).size() == 2);
  CHECK(relevant_cells(tower21().E, 2).size() == 12);
  CHECK(relevant_cells(tower21().E, 3).size() == 48);
  CHECK(relevant_cells(f2, 3).size() == 4);
  CHECK(relevant_cells(tower31().E, 2).size() == 72);
  // monomials are invertible, distinct, and include the identity
  CellSystem cs = relevant_cells(tower21().E, 3);
  for (const RelevantCell& c : cs.cells) CHECK(mat_det(tower21().E, c.m) != 0);
  CHECK(cs.cells[static_cast<size_t>(cs.id_cell)].m == mat_identity(tower21().E, 3));
}

TEST_CASE("GL_2(F_2) Bessel oracles", "[gelfand]") {
  FiniteField f2(2, 1);
  GLContext c = make_split_context(f2, 2);
  CharTable t = dixon_character_table(c.G);
  PsiN psi = split_psiN(f2, 2);
  BesselEnv env = make_bessel_env(c, psi);
  std::vector<int> gen = generic_indices(env, t);
  REQUIRE(gen.size() == 2);
  Mat w0 = mat_antidiag_J(f2, 2);
  int32_t cw0 = env.cells.cell_of(w0);
  REQUIRE(cw0 >= 0);
  for (int i : gen) {
    std::vector<Cyc> B = bessel_via_character(env, t, i);
    REQUIRE(B.size() == 2);
    CHECK(B[static_cast<size_t>(env.cells.id_cell)] == Cyc(1));
    long deg = t.degrees[static_cast<size_t>(i)];
    if (deg == 2) {
      // Steinberg: value 1/2 at the Weyl element
      CHECK(B[static_cast<size_t>(cw0)].as_rational() == Rat(1, 2));
    } else {
      // the sign character of S_3
      CHECK(B[static_cast<size_t>(cw0)].as_rational() == -1);
    }
    CHECK(dim_from_bessel(env, B) == Rat(deg));
  }
  // the trivial character is not generic: empty table
  for (long i = 0; i < t.num_chars(); ++i)
    if (t.degrees[static_cast<size_t>(i)] == 1 && std::find(gen.begin(), gen.end(), static_cast<int>(i)) == gen.end())
      CHECK(bessel_via_character(env, t, static_cast<int>(i)).empty());
}

TEST_CASE("evaluator equals the defining average everywhere (GL_2(F_4))", "[gelfand]") {
  const BesselEnv& env = env21();
  const CharTable& t = table21();
  std::vector<int> chis;
  std::vector<std::vector<Cyc>> tabs = all_tables(env, t, &chis);
  REQUIRE(tabs.size() == 12);
  for (size_t k = 0; k < tabs.size(); ++k)
    for (long g = 0; g < env.ctx->G.size(); ++g) {
      Cyc lhs = bessel_value(env, tabs[k], static_cast<int32_t>(g));
      Cyc rhs = bessel_monomial_sum(env, t, chis[k], env.ctx->G.elems[static_cast<size_t>(g)]);
      CHECK((lhs - rhs).is_zero());
    }
}

TEST_CASE("support is exactly the relevant cells (all monomials, n=2)", "[gelfand]") {
  const BesselEnv& env = env21();
  const CharTable& t = table21();
  const GLContext& c = ctx21();
  std::vector<int> gen = generic_indices(env, t);
  for (int32_t ia : c.A.idx)
    for (int32_t iw : c.W.idx) {
      Mat m = mat_mul(*c.K, c.G.elems[static_cast<size_t>(ia)], c.G.elems[static_cast<size_t>(iw)]);
      if (env.cells.cell_of(m) >= 0) continue;
      for (int i : gen) CHECK(bessel_monomial_sum(env, t, i, m).is_zero());
    }
}

TEST_CASE("transformation under N on both sides", "[gelfand]") {
  const BesselEnv& env = env21();
  const GLContext& c = ctx21();
  std::vector<std::vector<Cyc>> tabs = all_tables(env, table21());
  Rng rng(7);
  for (int it = 0; it < 50; ++it) {
    int32_t g = static_cast<int32_t>(rng.below(static_cast<uint64_t>(c.G.size())));
    int32_t u1 = c.N.idx[rng.below(static_cast<uint64_t>(c.N.size()))];
    int32_t u2 = c.N.idx[rng.below(static_cast<uint64_t>(c.N.size()))];
    int32_t y = c.G.mul(u1, c.G.mul(g, u2));
    int e = (env.psi->exponent(c.G.elems[static_cast<size_t>(u1)]) + env.psi->exponent(c.G.elems[static_cast<size_t>(u2)])) %
            env.psi->p();
    for (const auto& B : tabs)
      CHECK((bessel_value(env, B, y) - Cyc::root(e, env.psi->p()) * bessel_value(env, B, g)).is_zero());
  }
}

TEST_CASE("dimension recovery (GL_2(F_4))", "[gelfand]") {
  const BesselEnv& env = env21();
  const CharTable& t = table21();
  for (int i : generic_indices(env, t)) {
    std::vector<Cyc> B = bessel_via_character(env, t, i);
    CHECK(dim_from_bessel(env, B) == Rat(t.degrees[static_cast<size_t>(i)]));
  }
}

TEST_CASE("symmetries: inverse conjugate and the outer automorphism", "[gelfand]") {
  const BesselEnv& env = env21();
  const GLContext& c = ctx21();
  std::vector<std::vector<Cyc>> tabs = all_tables(env, table21());
  for (const auto& B : tabs)
    for (long g = 0; g < c.G.size(); ++g) {
      CHECK((bessel_value(env, B, c.G.inv_of[static_cast<size_t>(g)]) -
             bessel_value(env, B, static_cast<int32_t>(g)).conj())
                .is_zero());
      Mat th = mat_split_theta(*c.K, c.G.elems[static_cast<size_t>(g)]);
      CHECK((bessel_value(env, B, c.G.idx(th)) - bessel_value(env, B, static_cast<int32_t>(g)).conj()).is_zero());
    }
}

TEST_CASE("cell convolution algebra certifies the tables (GL_2(F_4))", "[gelfand]") {
  const BesselEnv& env = env21();
  std::vector<std::vector<Cyc>> tabs = all_tables(env, table21());
  HeckeData H = build_hecke(env);
  HeckeCertificate cert = hecke_cross_validate(env, H, table21(), tabs);
  CHECK(cert.commutative);
  CHECK(cert.unital);
  CHECK(cert.eigen_sets_match);
  CHECK(cert.mod_certified);
  CHECK(cert.exact_certified);
  CHECK(cert.eigenvalues_distinct);
}

TEST_CASE("cell convolution algebra certifies the tables (GL_2(F_9))", "[gelfand]") {
  const BesselEnv& env = env31();
  std::vector<std::vector<Cyc>> tabs = all_tables(env, table31());
  REQUIRE(tabs.size() == 72);
  HeckeData H = build_hecke(env);
  HeckeCertificate cert = hecke_cross_validate(env, H, table31(), tabs);
  CHECK(cert.commutative);
  CHECK(cert.unital);
  CHECK(cert.eigen_sets_match);
  CHECK(cert.mod_certified);
  CHECK(cert.exact_certified);
  CHECK(cert.eigenvalues_distinct);
}

TEST_CASE("cell convolution algebra on GL_3(F_2)", "[gelfand]") {
  FiniteField f2(2, 1);
  GLContext c = make_split_context(f2, 3);
  CharTable t = dixon_character_table(c.G);
  PsiN psi = split_psiN(f2, 3);
  BesselEnv env = make_bessel_env(c, psi);
  std::vector<int> chis;
  std::vector<std::vector<Cyc>> tabs = all_tables(env, t, &chis);
  REQUIRE(tabs.size() == 4);
  long degsum = 0;
  for (int i : chis) degsum += t.degrees[static_cast<size_t>(i)];
  CHECK(degsum == c.G.size() / c.N.size());
  for (size_t k = 0; k < tabs.size(); ++k)
    CHECK(dim_from_bessel(env, tabs[k]) == Rat(t.degrees[static_cast<size_t>(chis[k])]));
  HeckeData H = build_hecke(env);
  HeckeCertificate cert = hecke_cross_validate(env, H, t, tabs);
  CHECK(cert.commutative);
  CHECK(cert.eigen_sets_match);
  CHECK(cert.exact_certified);
  CHECK(cert.eigenvalues_distinct);
}

TEST_CASE("whittaker model, intertwiner, twisted trace (GL_2(F_4))", "[gelfand]") {
  const CharTable& t = table21();
  struct ModeCase {
    bool tau_mode;
    char iota;
  };
  for (ModeCase mc : {ModeCase{true, 't'}, ModeCase{false, 's'}}) {
    const GLContext& c = ctx21();
    PsiN psi = tower_psiN(tower21(), 2, mc.tau_mode);
    BesselEnv env = make_bessel_env(c, psi);
    const std::vector<int32_t>& imap = c.involution_map(mc.iota);
    int found = 0;
    for (int i : generic_indices(env, t)) {
      if (!char_stable(c, t.chars[static_cast<size_t>(i)], imap)) continue;
      ++found;
      long deg = t.degrees[static_cast<size_t>(i)];
      std::vector<Cyc> B = bessel_via_character(env, t, i);
      // stability at the level of the Bessel function: B(g^iota) = B(g)
      for (long g = 0; g < c.G.size(); ++g)
        CHECK((bessel_value(env, B, imap[static_cast<size_t>(g)]) - bessel_value(env, B, static_cast<int32_t>(g)))
                  .is_zero());
      WhittakerModel W = whittaker_model(env, t, B, deg);
      std::vector<uint64_t> T = W.intertwiner(mc.iota);
      // T^2 = 1
      std::vector<uint64_t> T2 = W.mat_product(T, T);
      for (long a = 0; a < deg; ++a)
        for (long b = 0; b < deg; ++b)
          CHECK(T2[static_cast<size_t>(a) * static_cast<size_t>(deg) + static_cast<size_t>(b)] ==
                static_cast<uint64_t>(a == b ? 1 : 0));
      Rng rng(42 + static_cast<uint64_t>(i));
      for (int it = 0; it < 5; ++it) {
        int32_t h = static_cast<int32_t>(rng.below(static_cast<uint64_t>(c.G.size())));
        // homomorphism property of the model action
        int32_t h2 = static_cast<int32_t>(rng.below(static_cast<uint64_t>(c.G.size())));
        CHECK(W.mat_product(W.action_matrix(h), W.action_matrix(h2)) == W.action_matrix(c.G.mul(h, h2)));
        // intertwining: pi(h) T = T pi(h^iota)
        CHECK(W.mat_product(W.action_matrix(h), T) == W.mat_product(T, W.action_matrix(imap[static_cast<size_t>(h)])));
        // closed twisted-trace formula against the model
        int32_t x = static_cast<int32_t>(rng.below(static_cast<uint64_t>(c.G.size())));
        uint64_t via_model = W.mat_trace(W.mat_product(W.action_matrix(x), T));
        Cyc via_formula = twisted_trace_formula(env, B, deg, mc.iota, x);
        CHECK(via_model == W.reduce(via_formula));
      }
    }
    CHECK(found > 0);
  }
}

TEST_CASE("twisted trace is constant on twisted classes (GL_2(F_9))", "[gelfand]") {
  const BesselEnv& env = env31();
  const CharTable& t = table31();
  const GLContext& c = ctx31();
  // pick one tau-stable generic character
  int pick = -1;
  for (int i : generic_indices(env, t))
    if (char_stable(c, t.chars[static_cast<size_t>(i)], c.tau_of)) {
      pick = i;
      break;
    }
  REQUIRE(pick >= 0);
  std::vector<Cyc> B = bessel_via_character(env, t, pick);
  long deg = t.degrees[static_cast<size_t>(pick)];
  Rng rng(19);
  for (int it = 0; it < 3; ++it) {
    int32_t x = static_cast<int32_t>(rng.below(static_cast<uint64_t>(c.G.size())));
    int32_t h = static_cast<int32_t>(rng.below(static_cast<uint64_t>(c.G.size())));
    // twisted conjugation x -> h^{-1} x h^tau
    int32_t y = c.G.mul(c.G.inv_of[static_cast<size_t>(h)], c.G.mul(x, c.tau_of[static_cast<size_t>(h)]));
    Cyc a = twisted_trace_formula(env, B, deg, 't', x);
    Cyc b = twisted_trace_formula(env, B, deg, 't', y);
    CHECK((a - b).is_zero());
  }
}
