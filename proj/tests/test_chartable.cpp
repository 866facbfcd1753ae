#include <catch_amalgamated.hpp>

#include <algorithm>
#include <map>

#include "finper/chartable.hpp"

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
}  // namespace

TEST_CASE("GL_2(F_2) is S_3: degrees 1,1,2", "[chartable]") {
  FiniteField f2(2, 1);
  GLContext c = make_split_context(f2, 2);
  REQUIRE(c.G.size() == 6);
  CharTable t = dixon_character_table(c.G);
  REQUIRE(t.num_chars() == 3);
  std::vector<long> degs = t.degrees;
  std::sort(degs.begin(), degs.end());
  CHECK(degs == std::vector<long>{1, 1, 2});
  // textbook S_3 oracle: classes id (1), transpositions (3), 3-cycles (2)
  // identify classes by size
  std::map<long, int> by_size;
  for (long cls = 0; cls < c.G.num_classes(); ++cls) by_size[c.G.class_size[static_cast<size_t>(cls)]] = static_cast<int>(cls);
  REQUIRE(by_size.size() == 3);
  int cid = by_size[1], ctrans = by_size[3], c3 = by_size[2];
  for (long i = 0; i < 3; ++i) {
    const std::vector<Cyc>& chi = t.chars[static_cast<size_t>(i)];
    if (t.degrees[static_cast<size_t>(i)] == 2) {
      CHECK(chi[static_cast<size_t>(ctrans)] == Cyc(0));
      CHECK(chi[static_cast<size_t>(c3)] == Cyc(-1));
    } else {
      // trivial or sign
      CHECK((chi[static_cast<size_t>(ctrans)] == Cyc(1) || chi[static_cast<size_t>(ctrans)] == Cyc(-1)));
      CHECK(chi[static_cast<size_t>(c3)] == Cyc(1));
    }
    CHECK(chi[static_cast<size_t>(cid)] == Cyc(t.degrees[static_cast<size_t>(i)]));
  }
}

TEST_CASE("GL_2(F_4) degrees", "[chartable]") {
  const CharTable& t = table21();
  REQUIRE(t.num_chars() == 15);
  std::map<long, int> mult;
  for (long d : t.degrees) mult[d]++;
  CHECK(mult == std::map<long, int>{{1, 3}, {3, 6}, {4, 3}, {5, 3}});
  long sq = 0;
  for (long d : t.degrees) sq += d * d;
  CHECK(sq == 180);
}

TEST_CASE("GL_2(F_9) table", "[chartable]") {
  const CharTable& t = table31();
  REQUIRE(t.num_chars() == 80);
  long sq = 0;
  for (long d : t.degrees) sq += d * d;
  CHECK(sq == 5760);
}

TEST_CASE("full exact orthogonality on GL_2(F_4)", "[chartable]") {
  const CharTable& t = table21();
  const Group& G = ctx21().G;
  for (long i = 0; i < t.num_chars(); ++i)
    for (long j = 0; j < t.num_chars(); ++j) {
      Cyc ip = t.inner(t.chars[static_cast<size_t>(i)], t.chars[static_cast<size_t>(j)]);
      if (i == j)
        CHECK(ip.as_rational() == 1);
      else
        CHECK(ip.is_zero());
    }
  // column orthogonality
  for (long c1 = 0; c1 < G.num_classes(); ++c1)
    for (long c2 = 0; c2 < G.num_classes(); ++c2) {
      Cyc acc;
      for (long i = 0; i < t.num_chars(); ++i)
        acc += t.chars[static_cast<size_t>(i)][static_cast<size_t>(c1)] *
               t.chars[static_cast<size_t>(i)][static_cast<size_t>(c2)].conj();
      if (c1 == c2)
        CHECK(acc.as_rational() == Rat(G.size(), G.class_size[static_cast<size_t>(c1)]));
      else
        CHECK(acc.is_zero());
    }
}

TEST_CASE("genericity: counts and degree sum", "[chartable]") {
  struct Case {
    const GLContext* c;
    const CharTable* t;
    long expect_generic;
  };
  for (const Case& cs : {Case{&ctx21(), &table21(), 12}, Case{&ctx31(), &table31(), 72}}) {
    PsiN psi = tower_psiN(*cs.c->tw, 2, true);
    long count = 0, degsum = 0;
    for (long i = 0; i < cs.t->num_chars(); ++i) {
      Rat m = genericity_multiplicity(*cs.c, cs.t->chars[static_cast<size_t>(i)], psi);
      REQUIRE((m == 0 || m == 1));  // Gelfand-Graev multiplicity-freeness
      if (m == 1) {
        ++count;
        degsum += cs.t->degrees[static_cast<size_t>(i)];
      }
    }
    CHECK(count == cs.expect_generic);
    CHECK(degsum == cs.c->G.size() / cs.c->N.size());
  }
}

TEST_CASE("subgroup tables: U(2) and GL_2(F) via the same engine", "[chartable]") {
  const GLContext& c = ctx31();
  Group u2 = Group::subgroup(c.G, c.Gtau.idx, "U(2,F_9/F_3)");
  Group gl2f = Group::subgroup(c.G, c.Gsig.idx, "GL_2(F_3)");
  CharTable tu = dixon_character_table(u2);
  CharTable tf = dixon_character_table(gl2f);
  long squ = 0, sqf = 0;
  for (long d : tu.degrees) squ += d * d;
  for (long d : tf.degrees) sqf += d * d;
  CHECK(squ == 96);
  CHECK(sqf == 48);
  // GL_2(F_3) has 8 classes; known degree multiset {1,1,2,2,2,3,3,4}
  std::vector<long> df = tf.degrees;
  std::sort(df.begin(), df.end());
  CHECK(df == std::vector<long>{1, 1, 2, 2, 2, 3, 3, 4});
}

TEST_CASE("parabolic induction 1 x 1 on GL_2", "[chartable]") {
  FiniteField f2(2, 1);
  GLContext c = make_split_context(f2, 2);
  CharTable t = dixon_character_table(c.G);
  Group g1 = Group::general_linear(f2, 1);
  std::vector<Cyc> triv1(static_cast<size_t>(g1.num_classes()), Cyc(1));
  std::vector<Cyc> ind = parabolic_induce(c.G, g1, g1, triv1, triv1);
  // degree 3 = trivial + Steinberg
  CHECK(ind[static_cast<size_t>(c.G.id_class)].as_rational() == 3);
  long found = 0;
  for (long i = 0; i < t.num_chars(); ++i) {
    long m = t.multiplicity(ind, static_cast<int>(i));
    REQUIRE(m >= 0);
    if (m > 0) {
      found += m * t.degrees[static_cast<size_t>(i)];
      CHECK(m == 1);
      CHECK((t.degrees[static_cast<size_t>(i)] == 1 || t.degrees[static_cast<size_t>(i)] == 2));
    }
  }
  CHECK(found == 3);
}

TEST_CASE("parabolic induction commutes and Ps(chi1,chi2) is irreducible", "[chartable]") {
  const GLContext& c = ctx31();
  const CharTable& t = table31();
  Group g1 = Group::general_linear(tower31().E, 1);
  REQUIRE(g1.size() == 8);
  CharTable t1 = dixon_character_table(g1);
  // two distinct characters of E^x
  const std::vector<Cyc>&chi1 = t1.chars[1], &chi2 = t1.chars[3];
  std::vector<Cyc> ab = parabolic_induce(c.G, g1, g1, chi1, chi2);
  std::vector<Cyc> ba = parabolic_induce(c.G, g1, g1, chi2, chi1);
  for (long k = 0; k < c.G.num_classes(); ++k) CHECK(ab[static_cast<size_t>(k)] == ba[static_cast<size_t>(k)]);
  CHECK(ab[static_cast<size_t>(c.G.id_class)].as_rational() == 10);  // q~ + 1
  CHECK(t.inner(ab, ab).as_rational() == 1);                          // irreducible
  CHECK(t.find_char(ab) >= 0);
}

TEST_CASE("restriction to the trivial subgroup gives the degree", "[chartable]") {
  const GLContext& c = ctx21();
  const CharTable& t = table21();
  std::vector<int32_t> triv{c.G.id_idx};
  for (long i = 0; i < t.num_chars(); ++i)
    CHECK(invariant_dim(c.G, triv, t.chars[static_cast<size_t>(i)]) == t.degrees[static_cast<size_t>(i)]);
}

TEST_CASE("distinction flags: Gow equivalences and multiplicity one", "[chartable]") {
  const GLContext& c = ctx31();
  const CharTable& t = table31();
  long n_dist_sigma = 0, n_tau_stable = 0;
  for (long i = 0; i < t.num_chars(); ++i) {
    const std::vector<Cyc>& chi = t.chars[static_cast<size_t>(i)];
    Rat dim_sig = invariant_dim(c.G, c.Gsig.idx, chi);
    Rat dim_tau = invariant_dim(c.G, c.Gtau.idx, chi);
    REQUIRE((dim_sig == 0 || dim_sig == 1));  // multiplicity <= 1
    REQUIRE((dim_tau == 0 || dim_tau == 1));
    // chi twisted by tau / sigma
    bool tau_stable = true, sigma_stable = true;
    for (long cls = 0; cls < c.G.num_classes() && (tau_stable || sigma_stable); ++cls) {
      int32_t rep = c.G.class_rep[static_cast<size_t>(cls)];
      long ct = c.G.class_of[static_cast<size_t>(c.tau_of[static_cast<size_t>(rep)])];
      long cr = c.G.class_of[static_cast<size_t>(c.sigma_of[static_cast<size_t>(rep)])];
      if (!(chi[static_cast<size_t>(ct)] == chi[static_cast<size_t>(cls)])) tau_stable = false;
      if (!(chi[static_cast<size_t>(cr)] == chi[static_cast<size_t>(cls)])) sigma_stable = false;
    }
    CHECK((dim_sig == 1) == tau_stable);
    CHECK((dim_tau == 1) == sigma_stable);
    n_dist_sigma += (dim_sig == 1);
    n_tau_stable += tau_stable;
  }
  CHECK(n_dist_sigma == n_tau_stable);
  CHECK(n_dist_sigma > 0);
}
