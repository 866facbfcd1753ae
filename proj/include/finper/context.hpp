#pragma once

// Group contexts: GL_n over a single field (split mode) or over the top of a
// quadratic tower, with the distinguished subgroups, involutions, norm-one
// sets, and the non-degenerate characters of N.

#include <functional>
#include <vector>

#include "finper/group.hpp"

namespace finper {

inline bool is_upper_unitriangular(const FiniteField& K, const Mat& m) {
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) {
      if (i == j && m.at(i, j) != K.one()) return false;
      if (i > j && m.at(i, j) != 0) return false;
    }
  return true;
}

inline bool is_diagonal(const Mat& m) {
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j)
      if (i != j && m.at(i, j) != 0) return false;
  return true;
}

inline bool is_permutation_matrix(const FiniteField& K, const Mat& m) {
  for (int i = 0; i < m.n; ++i) {
    int ones = 0;
    for (int j = 0; j < m.n; ++j) {
      if (m.at(i, j) == K.one())
        ++ones;
      else if (m.at(i, j) != 0)
        return false;
    }
    if (ones != 1) return false;
  }
  return true;
}

inline bool is_mirabolic(const FiniteField& K, const Mat& m) {
  for (int j = 0; j < m.n - 1; ++j)
    if (m.at(m.n - 1, j) != 0) return false;
  return m.at(m.n - 1, m.n - 1) == K.one();
}

inline bool entries_in_F(const FieldTower& tw, const Mat& m) {
  for (int i = 0; i < m.n * m.n; ++i)
    if (!tw.in_F(m.a[static_cast<size_t>(i)])) return false;
  return true;
}

struct GLContext {
  const FiniteField* K = nullptr;  // entry field (E in tower mode)
  const FieldTower* tw = nullptr;  // null in split mode
  int n = 0;
  Group G;
  Subset N, A, W, P;
  // tower mode only:
  Subset Gsig, Gtau, Nsig, Ntau, PF, Xsig, Xtau;
  std::vector<int32_t> sigma_of, tau_of;

  const Subset& fixed_points(char iota) const { return iota == 's' ? Gsig : Gtau; }
  const Subset& norm_one(char kappa) const { return kappa == 's' ? Xsig : Xtau; }
  const std::vector<int32_t>& involution_map(char iota) const { return iota == 's' ? sigma_of : tau_of; }
};

inline GLContext make_split_context(const FiniteField& K, int n, long budget = kDefaultBudget) {
  GLContext c;
  c.K = &K;
  c.n = n;
  c.G = Group::general_linear(K, n, budget);
  c.N = Subset::from_predicate(c.G, [&](const Mat& m) { return is_upper_unitriangular(K, m); });
  c.A = Subset::from_predicate(c.G, [&](const Mat& m) { return is_diagonal(m); });
  c.W = Subset::from_predicate(c.G, [&](const Mat& m) { return is_permutation_matrix(K, m); });
  c.P = Subset::from_predicate(c.G, [&](const Mat& m) { return is_mirabolic(K, m); });
  long q = K.q, nn = n;
  long nsz = 1;
  for (long i = 0; i < nn * (nn - 1) / 2; ++i) nsz *= q;
  if (c.N.size() != nsz || c.W.size() != (n == 1 ? 1 : n == 2 ? 2 : 6)) throw std::logic_error("subgroup order mismatch");
  return c;
}

inline GLContext make_tower_context(const FieldTower& tw, int n, long budget = kDefaultBudget) {
  GLContext c = make_split_context(tw.E, n, budget);
  c.tw = &tw;
  const FiniteField& E = tw.E;
  c.Gsig = Subset::from_predicate(c.G, [&](const Mat& m) { return entries_in_F(tw, m); });
  c.Gtau = Subset::from_predicate(c.G, [&](const Mat& m) { return mat_tau(tw, m) == m; });
  c.Nsig = Subset::from_predicate(c.G, [&](const Mat& m) { return is_upper_unitriangular(E, m) && entries_in_F(tw, m); });
  c.Ntau = Subset::from_predicate(c.G, [&](const Mat& m) { return is_upper_unitriangular(E, m) && mat_tau(tw, m) == m; });
  c.PF = Subset::from_predicate(c.G, [&](const Mat& m) { return is_mirabolic(E, m) && entries_in_F(tw, m); });
  Mat id = mat_identity(E, n);
  c.Xsig = Subset::from_predicate(c.G, [&](const Mat& m) { return mat_mul(E, m, mat_frobenius(tw, m)) == id; });
  c.Xtau = Subset::from_predicate(c.G, [&](const Mat& m) { return mat_mul(E, m, mat_tau(tw, m)) == id; });
  c.sigma_of.resize(static_cast<size_t>(c.G.size()));
  c.tau_of.resize(static_cast<size_t>(c.G.size()));
  for (long i = 0; i < c.G.size(); ++i) {
    c.sigma_of[static_cast<size_t>(i)] = c.G.idx(mat_frobenius(tw, c.G.elems[static_cast<size_t>(i)]));
    c.tau_of[static_cast<size_t>(i)] = c.G.idx(mat_tau(tw, c.G.elems[static_cast<size_t>(i)]));
  }
  // closed-form order checks
  long q = tw.q;
  long utau = 1;
  for (int i = 0; i < n * (n - 1) / 2; ++i) utau *= q;
  long qi = 1;
  for (int i = 1; i <= n; ++i) {
    qi *= q;
    utau *= (qi - (i % 2 == 1 ? -1 : 1) * 1L) * 1L;
  }
  if (c.Gsig.size() != Group::closed_form_gl_order(q, n)) throw std::logic_error("|G_sigma| mismatch");
  if (c.Gtau.size() != utau) throw std::logic_error("|G_tau| mismatch");
  if (c.Xsig.size() * c.Gsig.size() != c.G.size() || c.Xtau.size() * c.Gtau.size() != c.G.size())
    throw std::logic_error("|X_kappa| != |G|/|G_kappa|");
  return c;
}

// Non-degenerate character of N: psi(u) = prod_i psi_{c_i}(u_{i,i+1}) with
// every slot twist c_i nonzero.
struct PsiN {
  const FiniteField* K = nullptr;
  int n = 0;
  std::vector<AdditiveCharacter> slot;  // size n-1

  PsiN() = default;
  PsiN(const FiniteField& field, int n_, const std::vector<int>& twists) : K(&field), n(n_) {
    if (static_cast<int>(twists.size()) != n - 1) throw std::invalid_argument("need n-1 slot twists");
    for (int t : twists) {
      if (t == 0) throw std::invalid_argument("degenerate psi: zero slot twist");
      slot.emplace_back(field, t);
    }
  }

  int p() const { return K->p; }
  int exponent(const Mat& u) const {
    int e = 0;
    for (int i = 0; i + 1 < n; ++i) e += slot[static_cast<size_t>(i)].exponent(u.at(i, i + 1));
    return e % K->p;
  }
  Cyc value(const Mat& u) const { return Cyc::root(exponent(u), K->p); }
  Cyc value_inv(const Mat& u) const { return Cyc::root(-exponent(u), K->p); }
};

// canonical psi of N for a tower context: all slots the mode's twist
inline PsiN tower_psiN(const FieldTower& tw, int n, bool tau_mode) {
  return PsiN(tw.E, n, std::vector<int>(static_cast<size_t>(n - 1), tau_mode ? tw.delta : tw.E.one()));
}

inline PsiN split_psiN(const FiniteField& K, int n) {
  return PsiN(K, n, std::vector<int>(static_cast<size_t>(n - 1), K.one()));
}

}  // namespace finper
