#pragma once

// Character-level calculus on the mirabolic tower: the two raising functors
// (inflation and theta-twisted induction), their averaging adjoints,
// derivatives, the resulting filtration of a mirabolic restriction, and a
// monomial model of the induced Whittaker representation for module-level
// spot checks.

#include "finper/chartable.hpp"

namespace finper {

// groups P_1 < P_2 < ... < P_n and GL_0, ..., GL_gmax over one field, with a
// fixed nondegenerate additive-character datum shared by every level
struct BZTower {
  const FiniteField* K = nullptr;
  int n = 0;
  PsiN psi;              // n-slot psi; all slots carry the same twist
  std::vector<Group> P;  // P[k] = mirabolic P_k for k >= 2; P[1] trivial
  std::vector<Group> G;  // G[k] = GL_k for 1 <= k <= gmax; G[0] trivial
};

inline BZTower make_bz_tower(const FiniteField& K, int n, int twist, int gmax, long budget = kDefaultBudget) {
  if (n < 2 || gmax < 1 || gmax > n) throw std::invalid_argument("bad tower shape");
  BZTower t;
  t.K = &K;
  t.n = n;
  t.psi = PsiN(K, n, std::vector<int>(static_cast<size_t>(n - 1), twist));
  t.G.resize(static_cast<size_t>(gmax) + 1);
  t.P.resize(static_cast<size_t>(n) + 1);
  t.G[1] = Group::general_linear(K, 1, budget);
  t.G[0] = Group::subgroup(t.G[1], {t.G[1].id_idx}, "GL_0(F_" + std::to_string(K.q) + ")");
  for (int k = 2; k <= gmax; ++k) t.G[static_cast<size_t>(k)] = Group::general_linear(K, k, budget);
  t.P[1] = Group::subgroup(t.G[1], {t.G[1].id_idx}, "P_1(F_" + std::to_string(K.q) + ")");
  for (int k = 2; k <= n; ++k) t.P[static_cast<size_t>(k)] = Group::mirabolic(K, k, budget);
  return t;
}

// theta_k(u) = psi(u_{k-1,k}); every slot has the same twist, so slot 0 serves
inline int theta_exponent(const BZTower& t, const Mat& m, int k) {
  return t.psi.slot[0].exponent(m.at(k - 2, k - 1));
}

// top-left block a padded with an identity corner to size k
inline Mat corner_embed(const FiniteField& K, const Mat& a, int k) {
  Mat m;
  m.n = k;
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j) m.at(i, j) = a.at(i, j);
  for (int i = a.n; i < k; ++i) m.at(i, i) = static_cast<int16_t>(K.one());
  return m;
}

inline Mat top_left_block(const Mat& m, int s) {
  Mat a;
  a.n = s;
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) a.at(i, j) = m.at(i, j);
  return a;
}

// (1/|G|) sum_c |C_c| f1(c) conj(f2(c)) without needing a character table
inline Cyc class_inner(const Group& G, const std::vector<Cyc>& f1, const std::vector<Cyc>& f2) {
  Cyc acc;
  for (long c = 0; c < G.num_classes(); ++c)
    acc += Rat(G.class_size[static_cast<size_t>(c)]) *
           (f1[static_cast<size_t>(c)] * f2[static_cast<size_t>(c)].conj());
  return acc.scaled(Rat(1, G.size()));
}

inline std::vector<Cyc> dual_character(const Group& G, const std::vector<Cyc>& chi) {
  std::vector<Cyc> out(static_cast<size_t>(G.num_classes()));
  for (long c = 0; c < G.num_classes(); ++c)
    out[static_cast<size_t>(c)] = chi[static_cast<size_t>(G.inv_class[static_cast<size_t>(c)])];
  return out;
}

inline std::vector<Cyc> char_sum(const std::vector<Cyc>& f1, const std::vector<Cyc>& f2) {
  std::vector<Cyc> out(f1.size());
  for (size_t c = 0; c < f1.size(); ++c) out[c] = f1[c] + f2[c];
  return out;
}

inline bool char_eq(const std::vector<Cyc>& f1, const std::vector<Cyc>& f2) {
  if (f1.size() != f2.size()) return false;
  for (size_t c = 0; c < f1.size(); ++c)
    if (!(f1[c] - f2[c]).is_zero()) return false;
  return true;
}

inline bool char_is_zero(const std::vector<Cyc>& f) {
  for (const Cyc& v : f)
    if (!v.is_zero()) return false;
  return true;
}

// inflation R(GL_{k-1}) -> R(P_k) through the quotient killing the last column
inline std::vector<Cyc> psi_plus(const BZTower& t, int k, const std::vector<Cyc>& chi) {
  const Group& Pk = t.P[static_cast<size_t>(k)];
  if (k == 1) return {chi.at(0)};
  const Group& Gm = t.G[static_cast<size_t>(k) - 1];
  if (chi.size() != static_cast<size_t>(Gm.num_classes())) throw std::invalid_argument("psi_plus size mismatch");
  std::vector<Cyc> out(static_cast<size_t>(Pk.num_classes()));
  for (long c = 0; c < Pk.num_classes(); ++c) {
    Mat a = top_left_block(Pk.elems[static_cast<size_t>(Pk.class_rep[static_cast<size_t>(c)])], k - 1);
    out[static_cast<size_t>(c)] = chi[static_cast<size_t>(Gm.class_of[static_cast<size_t>(Gm.idx(a))])];
  }
  return out;
}

// theta-twisted induction R(P_{k-1}) -> R(P_k) from the subgroup P_{k-1} U_k
inline std::vector<Cyc> phi_plus(const BZTower& t, int k, const std::vector<Cyc>& tau) {
  if (k < 2) throw std::invalid_argument("phi_plus needs k >= 2");
  const Group& Pk = t.P[static_cast<size_t>(k)];
  const Group& Pm = t.P[static_cast<size_t>(k) - 1];
  if (tau.size() != static_cast<size_t>(Pm.num_classes())) throw std::invalid_argument("phi_plus size mismatch");
  int p = t.K->p;
  long hsize = Pm.size();
  for (int i = 0; i < k - 1; ++i) hsize *= t.K->q;
  std::vector<Cyc> acc(static_cast<size_t>(Pk.num_classes()));
  for (long x = 0; x < Pk.size(); ++x) {
    const Mat& m = Pk.elems[static_cast<size_t>(x)];
    // membership in P_{k-1} U_k: the top-left block is itself mirabolic
    bool in_h = (m.at(k - 2, k - 2) == t.K->one());
    for (int j = 0; j < k - 2 && in_h; ++j) in_h = (m.at(k - 2, j) == 0);
    if (!in_h) continue;
    // the U_k-part of the factorization contributes psi of the corner entry
    Mat a = top_left_block(m, k - 1);
    acc[static_cast<size_t>(Pk.class_of[static_cast<size_t>(x)])] +=
        Cyc::root(theta_exponent(t, m, k), p) *
        tau[static_cast<size_t>(Pm.class_of[static_cast<size_t>(Pm.idx(a))])];
  }
  for (long c = 0; c < Pk.num_classes(); ++c)
    acc[static_cast<size_t>(c)] =
        acc[static_cast<size_t>(c)].scaled(Rat(Pk.size(), hsize * Pk.class_size[static_cast<size_t>(c)]));
  return acc;
}

namespace detail {
// average over the last-column unipotent subgroup against theta^{-e_scale}
inline Cyc column_average(const BZTower& t, int k, const std::vector<Cyc>& chi, int32_t g, bool twisted) {
  const Group& Pk = t.P[static_cast<size_t>(k)];
  int p = t.K->p;
  long usize = 1;
  for (int i = 0; i < k - 1; ++i) usize *= t.K->q;
  Cyc acc;
  for (long xv = 0; xv < usize; ++xv) {
    Mat u = mat_identity(*t.K, k);
    long v = xv;
    for (int i = 0; i < k - 1; ++i) {
      u.at(i, k - 1) = static_cast<int16_t>(v % t.K->q);
      v /= t.K->q;
    }
    int e = twisted ? theta_exponent(t, u, k) : 0;
    int32_t y = Pk.mul(g, Pk.idx(u));
    acc += Cyc::root(-e, p) * chi[static_cast<size_t>(Pk.class_of[static_cast<size_t>(y)])];
  }
  return acc.scaled(Rat(1, usize));
}
}  // namespace detail

// invariants under the last-column subgroup, R(P_k) -> R(GL_{k-1})
inline std::vector<Cyc> psi_minus(const BZTower& t, int k, const std::vector<Cyc>& chi) {
  const Group& Pk = t.P[static_cast<size_t>(k)];
  if (chi.size() != static_cast<size_t>(Pk.num_classes())) throw std::invalid_argument("psi_minus size mismatch");
  if (k == 1) return {chi.at(0)};
  const Group& Gm = t.G[static_cast<size_t>(k) - 1];
  std::vector<Cyc> out(static_cast<size_t>(Gm.num_classes()));
  for (long c = 0; c < Gm.num_classes(); ++c) {
    Mat g = corner_embed(*t.K, Gm.elems[static_cast<size_t>(Gm.class_rep[static_cast<size_t>(c)])], k);
    out[static_cast<size_t>(c)] = detail::column_average(t, k, chi, Pk.idx(g), false);
  }
  return out;
}

// theta-eigenvectors under the last-column subgroup, R(P_k) -> R(P_{k-1})
inline std::vector<Cyc> phi_minus(const BZTower& t, int k, const std::vector<Cyc>& chi) {
  if (k < 2) throw std::invalid_argument("phi_minus needs k >= 2");
  const Group& Pk = t.P[static_cast<size_t>(k)];
  const Group& Pm = t.P[static_cast<size_t>(k) - 1];
  if (chi.size() != static_cast<size_t>(Pk.num_classes())) throw std::invalid_argument("phi_minus size mismatch");
  std::vector<Cyc> out(static_cast<size_t>(Pm.num_classes()));
  for (long c = 0; c < Pm.num_classes(); ++c) {
    Mat g = corner_embed(*t.K, Pm.elems[static_cast<size_t>(Pm.class_rep[static_cast<size_t>(c)])], k);
    out[static_cast<size_t>(c)] = detail::column_average(t, k, chi, Pk.idx(g), true);
  }
  return out;
}

// values of a class function of the top GL on the classes of P_n
inline std::vector<Cyc> mirabolic_restrict(const BZTower& t, const Group& Gn, const std::vector<Cyc>& chi) {
  const Group& Pn = t.P[static_cast<size_t>(t.n)];
  std::vector<Cyc> out(static_cast<size_t>(Pn.num_classes()));
  for (long c = 0; c < Pn.num_classes(); ++c)
    out[static_cast<size_t>(c)] =
        chi[static_cast<size_t>(Gn.class_of[static_cast<size_t>(Gn.idx(
            Pn.elems[static_cast<size_t>(Pn.class_rep[static_cast<size_t>(c)])]))])];
  return out;
}

// j-th derivative of a P_from character: the plain average after j-1 twisted
// ones, landing on GL_{from-j}; from defaults to the top of the tower
inline std::vector<Cyc> bz_derivative(const BZTower& t, std::vector<Cyc> tau, int j, int from = 0) {
  int k = from ? from : t.n;
  if (j < 1 || j > k) throw std::invalid_argument("derivative order out of range");
  for (int s = 0; s < j - 1; ++s) {
    tau = phi_minus(t, k, tau);
    --k;
  }
  return psi_minus(t, k, tau);
}

// (j-1)-fold twisted induction of an inflation, R(GL_{to-j}) -> R(P_to);
// to defaults to the top of the tower
inline std::vector<Cyc> bz_raise(const BZTower& t, std::vector<Cyc> rho, int j, int to = 0) {
  int top = to ? to : t.n;
  if (j < 1 || j > top) throw std::invalid_argument("raise order out of range");
  int k = top - j + 1;
  rho = psi_plus(t, k, rho);
  while (k < top) rho = phi_plus(t, ++k, rho);
  return rho;
}

// character of the psi-induced representation of P_n from the full upper
// unitriangular subgroup
inline std::vector<Cyc> whittaker_induced(const BZTower& t) {
  const Group& Pn = t.P[static_cast<size_t>(t.n)];
  int p = t.K->p;
  long nsize = 1;
  for (int i = 0; i < t.n * (t.n - 1) / 2; ++i) nsize *= t.K->q;
  std::vector<Cyc> acc(static_cast<size_t>(Pn.num_classes()));
  for (long x = 0; x < Pn.size(); ++x) {
    const Mat& m = Pn.elems[static_cast<size_t>(x)];
    if (!is_upper_unitriangular(*t.K, m)) continue;
    acc[static_cast<size_t>(Pn.class_of[static_cast<size_t>(x)])] += Cyc::root(t.psi.exponent(m), p);
  }
  for (long c = 0; c < Pn.num_classes(); ++c)
    acc[static_cast<size_t>(c)] =
        acc[static_cast<size_t>(c)].scaled(Rat(Pn.size(), nsize * Pn.class_size[static_cast<size_t>(c)]));
  return acc;
}

// cuspidality: invariants vanish under every standard block unipotent radical
inline bool is_cuspidal(const Group& Gn, const std::vector<Cyc>& chi) {
  const FiniteField& K = *Gn.K;
  for (int split = 1; split < Gn.n; ++split) {
    Subset rad = Subset::from_predicate(Gn, [&](const Mat& m) {
      for (int i = 0; i < Gn.n; ++i)
        for (int j = 0; j < Gn.n; ++j) {
          bool diag = (i == j);
          bool upper_block = (i < split && j >= split);
          if (diag && m.at(i, j) != K.one()) return false;
          if (!diag && !upper_block && m.at(i, j) != 0) return false;
        }
      return true;
    });
    if (invariant_dim(Gn, rad.idx, chi) != 0) return false;
  }
  return true;
}

// --- monomial model of the psi-induced representation ---

// basis indexed by cosets of the unitriangular subgroup; each group element
// acts by a one-entry-per-row matrix whose entries are p-th roots of unity
struct MonomialModule {
  const Group* grp = nullptr;
  long dim = 0;
  int p = 0;
  std::vector<int32_t> coset_of;  // element -> coset index
  std::vector<int> exp_of;        // psi-exponent of the unitriangular part
  std::vector<int32_t> rep;       // coset -> chosen element index
};

inline MonomialModule kirillov_module(const BZTower& t) {
  const Group& Pn = t.P[static_cast<size_t>(t.n)];
  MonomialModule M;
  M.grp = &Pn;
  M.p = t.K->p;
  M.coset_of.assign(static_cast<size_t>(Pn.size()), -1);
  M.exp_of.assign(static_cast<size_t>(Pn.size()), 0);
  std::vector<int32_t> nidx;
  for (long x = 0; x < Pn.size(); ++x)
    if (is_upper_unitriangular(*t.K, Pn.elems[static_cast<size_t>(x)])) nidx.push_back(static_cast<int32_t>(x));
  for (long x = 0; x < Pn.size(); ++x) {
    if (M.coset_of[static_cast<size_t>(x)] >= 0) continue;
    int32_t ci = static_cast<int32_t>(M.rep.size());
    M.rep.push_back(static_cast<int32_t>(x));
    for (int32_t u : nidx) {
      int32_t y = Pn.mul(u, static_cast<int32_t>(x));
      M.coset_of[static_cast<size_t>(y)] = ci;
      M.exp_of[static_cast<size_t>(y)] = t.psi.exponent(Pn.elems[static_cast<size_t>(u)]);
    }
  }
  M.dim = static_cast<long>(M.rep.size());
  return M;
}

// right-translation action in row -> (column, exponent) form
struct MonoMat {
  std::vector<int32_t> col;
  std::vector<int> exp;
};

inline MonoMat module_matrix(const MonomialModule& M, int32_t g) {
  MonoMat m;
  m.col.resize(static_cast<size_t>(M.dim));
  m.exp.resize(static_cast<size_t>(M.dim));
  for (long i = 0; i < M.dim; ++i) {
    int32_t y = M.grp->mul(M.rep[static_cast<size_t>(i)], g);
    m.col[static_cast<size_t>(i)] = M.coset_of[static_cast<size_t>(y)];
    m.exp[static_cast<size_t>(i)] = M.exp_of[static_cast<size_t>(y)];
  }
  return m;
}

inline MonoMat mono_compose(const MonoMat& a, const MonoMat& b, int p) {
  MonoMat m;
  m.col.resize(a.col.size());
  m.exp.resize(a.col.size());
  for (size_t i = 0; i < a.col.size(); ++i) {
    int32_t j = a.col[i];
    m.col[i] = b.col[static_cast<size_t>(j)];
    m.exp[i] = (a.exp[i] + b.exp[static_cast<size_t>(j)]) % p;
  }
  return m;
}

inline Cyc mono_trace(const MonoMat& m, int p) {
  Cyc acc;
  for (size_t i = 0; i < m.col.size(); ++i)
    if (m.col[i] == static_cast<int32_t>(i)) acc += Cyc::root(m.exp[i], p);
  return acc;
}

}  // namespace finper
