#pragma once

// Bessel functions of generic characters.  A Bessel function is supported on
// the "relevant" Bruhat cells (anti-block-diagonal monomials with scalar
// blocks) and is determined by one value per cell.  Two independent routes
// compute those values: a psi-twisted average of character values over N, and
// simultaneous eigenfunctions of the cell convolution algebra; the second is
// certified against the first both modulo ell and exactly.  Small contexts
// additionally get explicit Whittaker models with intertwining operators,
// cross-checking the closed twisted-trace formula.

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "finper/chartable.hpp"
#include "finper/context.hpp"

namespace finper {

struct RelevantCell {
  std::vector<int> comp;   // composition of n, block sizes top to bottom
  std::vector<int> torus;  // nonzero scalar per block
  Mat m;                   // the monomial: block i is torus[i] * I placed anti-diagonally
};

struct CellSystem {
  const FiniteField* K = nullptr;
  int n = 0;
  std::vector<RelevantCell> cells;
  int32_t id_cell = -1;

  long size() const { return static_cast<long>(cells.size()); }
  int32_t cell_of(const Mat& monomial) const {
    auto it = index_.find(mat_encode(*K, monomial));
    return it == index_.end() ? -1 : it->second;
  }

  friend CellSystem relevant_cells(const FiniteField& K, int n);

 private:
  std::unordered_map<uint64_t, int32_t> index_;
};

inline CellSystem relevant_cells(const FiniteField& K, int n) {
  CellSystem cs;
  cs.K = &K;
  cs.n = n;
  std::vector<int> comp;
  std::function<void(int)> rec = [&](int rest) {
    if (rest == 0) {
      // all nonzero torus tuples for this composition
      std::vector<int> torus(comp.size(), 1);
      for (;;) {
        RelevantCell cell;
        cell.comp = comp;
        cell.torus = torus;
        cell.m.n = n;
        int row = 0;
        for (size_t b = 0; b < comp.size(); ++b) {
          int sz = comp[b];
          for (int t = 0; t < sz; ++t) cell.m.at(row + t, n - row - sz + t) = static_cast<int16_t>(torus[b]);
          row += sz;
        }
        cs.index_.emplace(mat_encode(K, cell.m), static_cast<int32_t>(cs.cells.size()));
        cs.cells.push_back(std::move(cell));
        size_t d = 0;
        while (d < torus.size() && torus[d] == K.q - 1) torus[d++] = 1;
        if (d == torus.size()) break;
        torus[d]++;
      }
      return;
    }
    for (int part = 1; part <= rest; ++part) {
      comp.push_back(part);
      rec(rest - part);
      comp.pop_back();
    }
  };
  rec(n);
  Mat id = mat_identity(K, n);
  cs.id_cell = cs.cell_of(id);
  if (cs.id_cell < 0) throw std::logic_error("identity cell missing");
  return cs;
}

// Per-context data: where each group element sits relative to the relevant
// cells.  For g = n1 * m * n2 with m a cell monomial, psiexp_g is the
// exponent of psi(n1)psi(n2); off the relevant support cell_of_g is -1.
struct BesselEnv {
  const GLContext* ctx = nullptr;
  const PsiN* psi = nullptr;
  CellSystem cells;
  std::vector<int32_t> mono_idx;   // cell -> element index of its monomial
  std::vector<int32_t> cell_of_g;  // element -> cell, -1 off support
  std::vector<int8_t> psiexp_g;
};

inline BesselEnv make_bessel_env(const GLContext& ctx, const PsiN& psi) {
  BesselEnv env;
  env.ctx = &ctx;
  env.psi = &psi;
  env.cells = relevant_cells(*ctx.K, ctx.n);
  for (const RelevantCell& c : env.cells.cells) env.mono_idx.push_back(ctx.G.idx(c.m));
  env.cell_of_g.resize(static_cast<size_t>(ctx.G.size()));
  env.psiexp_g.assign(static_cast<size_t>(ctx.G.size()), 0);
  for (long i = 0; i < ctx.G.size(); ++i) {
    Bruhat b = bruhat_decompose(*ctx.K, ctx.G.elems[static_cast<size_t>(i)]);
    int32_t c = env.cells.cell_of(bruhat_monomial(*ctx.K, b, ctx.n));
    env.cell_of_g[static_cast<size_t>(i)] = c;
    if (c >= 0)
      env.psiexp_g[static_cast<size_t>(i)] =
          static_cast<int8_t>((psi.exponent(b.n1) + psi.exponent(b.n2)) % psi.p());
  }
  return env;
}

// value at an element of a Bessel table (one Cyc per cell)
inline Cyc bessel_value(const BesselEnv& env, const std::vector<Cyc>& B, int32_t g) {
  int32_t c = env.cell_of_g[static_cast<size_t>(g)];
  if (c < 0) return Cyc();
  return Cyc::root(env.psiexp_g[static_cast<size_t>(g)], env.psi->p()) * B[static_cast<size_t>(c)];
}

// (1/|N|) sum_{u in N} chi(m u) psi(u)^{-1} for an arbitrary matrix m
inline Cyc bessel_monomial_sum(const BesselEnv& env, const CharTable& T, int chi, const Mat& m) {
  const GLContext& ctx = *env.ctx;
  int32_t mi = ctx.G.idx(m);
  std::vector<long> cnt(static_cast<size_t>(ctx.G.num_classes()) * static_cast<size_t>(env.psi->p()), 0);
  for (int32_t u : ctx.N.idx) {
    int32_t y = ctx.G.mul(mi, u);
    int e = env.psi->exponent(ctx.G.elems[static_cast<size_t>(u)]);
    cnt[static_cast<size_t>(ctx.G.class_of[static_cast<size_t>(y)]) * static_cast<size_t>(env.psi->p()) +
        static_cast<size_t>(e)]++;
  }
  Cyc acc;
  for (long c = 0; c < ctx.G.num_classes(); ++c)
    for (int e = 0; e < env.psi->p(); ++e) {
      long k = cnt[static_cast<size_t>(c) * static_cast<size_t>(env.psi->p()) + static_cast<size_t>(e)];
      if (k) acc += Cyc::root(-e, env.psi->p(), Rat(k)) * T.chars[static_cast<size_t>(chi)][static_cast<size_t>(c)];
    }
  return acc.scaled(Rat(1, ctx.N.size()));
}

// Bessel table of character chi via the psi-average; empty if chi is not
// generic (the average vanishes identically)
inline std::vector<Cyc> bessel_via_character(const BesselEnv& env, const CharTable& T, int chi) {
  std::vector<Cyc> vals(static_cast<size_t>(env.cells.size()));
  for (long c = 0; c < env.cells.size(); ++c)
    vals[static_cast<size_t>(c)] = bessel_monomial_sum(env, T, chi, env.cells.cells[static_cast<size_t>(c)].m);
  const Cyc& at_id = vals[static_cast<size_t>(env.cells.id_cell)];
  if (at_id.is_zero()) return {};
  if (!(at_id == Cyc(1))) throw std::logic_error("bessel value at the identity is neither 0 nor 1");
  return vals;
}

inline std::vector<int> generic_indices(const BesselEnv& env, const CharTable& T) {
  std::vector<int> out;
  for (long i = 0; i < T.num_chars(); ++i) {
    Rat m = genericity_multiplicity(*env.ctx, T.chars[static_cast<size_t>(i)], *env.psi);
    if (m == 1)
      out.push_back(static_cast<int>(i));
    else if (m != 0)
      throw std::logic_error("genericity multiplicity not 0 or 1");
  }
  return out;
}

// dim(pi) = |G| / sum_g B(g) B(g^{-1})  (Schur orthogonality for the
// normalized matrix coefficient)
inline Rat dim_from_bessel(const BesselEnv& env, const std::vector<Cyc>& B) {
  const GLContext& ctx = *env.ctx;
  int p = env.psi->p();
  long r = env.cells.size();
  std::vector<long> cnt(static_cast<size_t>(r) * static_cast<size_t>(r) * static_cast<size_t>(p), 0);
  for (long g = 0; g < ctx.G.size(); ++g) {
    int32_t c1 = env.cell_of_g[static_cast<size_t>(g)];
    if (c1 < 0) continue;
    int32_t gi = ctx.G.inv_of[static_cast<size_t>(g)];
    int32_t c2 = env.cell_of_g[static_cast<size_t>(gi)];
    if (c2 < 0) continue;
    int e = (env.psiexp_g[static_cast<size_t>(g)] + env.psiexp_g[static_cast<size_t>(gi)]) % p;
    cnt[(static_cast<size_t>(c1) * static_cast<size_t>(r) + static_cast<size_t>(c2)) * static_cast<size_t>(p) +
        static_cast<size_t>(e)]++;
  }
  Cyc s;
  for (long c1 = 0; c1 < r; ++c1)
    for (long c2 = 0; c2 < r; ++c2)
      for (int e = 0; e < p; ++e) {
        long k = cnt[(static_cast<size_t>(c1) * static_cast<size_t>(r) + static_cast<size_t>(c2)) * static_cast<size_t>(p) +
                     static_cast<size_t>(e)];
        if (k) s += Cyc::root(e, p, Rat(k)) * (B[static_cast<size_t>(c1)] * B[static_cast<size_t>(c2)]);
      }
  return Rat(ctx.G.size()) / s.as_rational();
}

// --- cell convolution algebra ---
// f_c = the N-bi-equivariant function supported on the coset of cell c with
// f_c(m_c) = 1; gamma_{c1,c2,c3} = (f_{c1} * f_{c2})(m_{c3}) where
// (f1 * f2)(g) = (1/|N|) sum_x f1(x) f2(x^{-1} g).
struct HeckeData {
  long r = 0;
  int p = 0;
  std::vector<int64_t> counts;  // [((c1*r + c2)*r + c3)*p + e]
  std::vector<Cyc> gamma;       // [(c1*r + c2)*r + c3]

  int64_t count_at(long c1, long c2, long c3, int e) const {
    return counts[((static_cast<size_t>(c1) * static_cast<size_t>(r) + static_cast<size_t>(c2)) * static_cast<size_t>(r) +
                   static_cast<size_t>(c3)) * static_cast<size_t>(p) + static_cast<size_t>(e)];
  }
  const Cyc& gamma_at(long c1, long c2, long c3) const {
    return gamma[(static_cast<size_t>(c1) * static_cast<size_t>(r) + static_cast<size_t>(c2)) * static_cast<size_t>(r) +
                 static_cast<size_t>(c3)];
  }
};

inline HeckeData build_hecke(const BesselEnv& env, int threads = 0) {
  const GLContext& ctx = *env.ctx;
  HeckeData H;
  H.r = env.cells.size();
  H.p = env.psi->p();
  size_t r = static_cast<size_t>(H.r), p = static_cast<size_t>(H.p);
  std::vector<std::vector<int32_t>> supp(r);
  for (long g = 0; g < ctx.G.size(); ++g)
    if (env.cell_of_g[static_cast<size_t>(g)] >= 0)
      supp[static_cast<size_t>(env.cell_of_g[static_cast<size_t>(g)])].push_back(static_cast<int32_t>(g));
  H.counts.assign(r * r * r * p, 0);
  parallel_for(r, threads, [&](size_t b, size_t e) {
    for (size_t c1 = b; c1 < e; ++c1)
      for (int32_t x : supp[c1]) {
        int ex = env.psiexp_g[static_cast<size_t>(x)];
        int32_t xi = ctx.G.inv_of[static_cast<size_t>(x)];
        for (size_t c3 = 0; c3 < r; ++c3) {
          int32_t y = ctx.G.mul(xi, env.mono_idx[c3]);
          int32_t c2 = env.cell_of_g[static_cast<size_t>(y)];
          if (c2 < 0) continue;
          int ee = (ex + env.psiexp_g[static_cast<size_t>(y)]) % H.p;
          H.counts[((c1 * r + static_cast<size_t>(c2)) * r + c3) * p + static_cast<size_t>(ee)]++;
        }
      }
  });
  H.gamma.resize(r * r * r);
  for (size_t i = 0; i < r * r * r; ++i) {
    Cyc acc;
    for (size_t e = 0; e < p; ++e)
      if (H.counts[i * p + e]) acc += Cyc::root(static_cast<long>(e), H.p, Rat(static_cast<long>(H.counts[i * p + e])));
    H.gamma[i] = acc.scaled(Rat(1, ctx.N.size()));
  }
  return H;
}

struct HeckeCertificate {
  bool commutative = false;         // gamma symmetric in (c1, c2), checked on raw counts
  bool unital = false;              // the identity cell is a two-sided unit
  bool eigen_sets_match = false;    // mod-ell eigenfunctions = reduced character-route tables
  bool mod_certified = false;       // every convolution operator fixes every line mod ell
  bool exact_certified = false;     // seeded exact combination has the tables as eigenvectors
  bool eigenvalues_distinct = false;
};

// Cross-validates the character-route Bessel tables against the convolution
// algebra, reusing the modulus data of the character table.
inline HeckeCertificate hecke_cross_validate(const BesselEnv& env, const HeckeData& H, const CharTable& T,
                                             const std::vector<std::vector<Cyc>>& tables, uint64_t seed = 20240902,
                                             int threads = 0) {
  const long r = H.r;
  const int p = H.p;
  const uint64_t ell = T.ell;
  if (static_cast<long>(tables.size()) != r)
    throw std::invalid_argument("number of generic characters must equal the number of relevant cells");
  if (T.unity_order % p != 0) throw std::logic_error("p does not divide the unity order");
  HeckeCertificate cert;

  cert.commutative = true;
  for (long c1 = 0; c1 < r && cert.commutative; ++c1)
    for (long c2 = 0; c2 < c1 && cert.commutative; ++c2)
      for (long c3 = 0; c3 < r && cert.commutative; ++c3)
        for (int e = 0; e < p; ++e)
          if (H.count_at(c1, c2, c3, e) != H.count_at(c2, c1, c3, e)) {
            cert.commutative = false;
            break;
          }

  long id = env.cells.id_cell;
  cert.unital = true;
  for (long c2 = 0; c2 < r && cert.unital; ++c2)
    for (long c3 = 0; c3 < r && cert.unital; ++c3) {
      const Cyc& v = H.gamma_at(id, c2, c3);
      cert.unital = (c2 == c3) ? (v == Cyc(1)) : v.is_zero();
    }

  // gamma mod ell, layout gm[c1][c3*r + c2] = matrix of "convolve by f_{c1}"
  std::vector<std::vector<uint64_t>> gm(static_cast<size_t>(r), std::vector<uint64_t>(static_cast<size_t>(r) * static_cast<size_t>(r)));
  uint64_t zp = modp::powmod(T.zroot, static_cast<uint64_t>(T.unity_order / p), ell);
  uint64_t ninv = modp::invmod(static_cast<uint64_t>(env.ctx->N.size()) % ell, ell);
  for (long c1 = 0; c1 < r; ++c1)
    for (long c2 = 0; c2 < r; ++c2)
      for (long c3 = 0; c3 < r; ++c3) {
        uint64_t acc = 0;
        for (int e = 0; e < p; ++e)
          acc = modp::addmod(acc,
                             modp::mulmod(static_cast<uint64_t>(H.count_at(c1, c2, c3, e)) % ell,
                                          modp::powmod(zp, static_cast<uint64_t>(e), ell), ell),
                             ell);
        gm[static_cast<size_t>(c1)][static_cast<size_t>(c3) * static_cast<size_t>(r) + static_cast<size_t>(c2)] =
            modp::mulmod(acc, ninv, ell);
      }

  Rng rng(seed);
  auto combo = [&](const std::vector<uint64_t>& coef) {
    std::vector<uint64_t> M(static_cast<size_t>(r) * static_cast<size_t>(r), 0);
    for (long c1 = 0; c1 < r; ++c1) {
      if (!coef[static_cast<size_t>(c1)]) continue;
      for (size_t i = 0; i < M.size(); ++i)
        M[i] = modp::addmod(M[i], modp::mulmod(coef[static_cast<size_t>(c1)], gm[static_cast<size_t>(c1)][i], ell), ell);
    }
    return M;
  };
  std::vector<std::vector<uint64_t>> eig = detail::split_common_eigenvectors(r, combo, r, ell, rng);
  for (auto& v : eig) {
    if (!v[static_cast<size_t>(id)]) throw std::logic_error("eigenfunction vanishes at the identity cell");
    uint64_t inv = modp::invmod(v[static_cast<size_t>(id)], ell);
    for (auto& x : v) x = modp::mulmod(x, inv, ell);
  }

  // reduce the character-route tables mod ell and compare as sets
  std::vector<std::vector<uint64_t>> tmod(static_cast<size_t>(r));
  for (long t = 0; t < r; ++t) {
    std::vector<uint64_t> v(static_cast<size_t>(r));
    for (long c = 0; c < r; ++c)
      v[static_cast<size_t>(c)] = modp::cyc_mod(tables[static_cast<size_t>(t)][static_cast<size_t>(c)], ell, T.zroot, T.unity_order);
    tmod[static_cast<size_t>(t)] = std::move(v);
  }
  {
    std::vector<std::vector<uint64_t>> a = eig, b = tmod;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    cert.eigen_sets_match = (a == b);
  }

  // every convolution operator must fix every character line mod ell
  std::vector<char> modok(static_cast<size_t>(r), 1);
  parallel_for(static_cast<size_t>(r), threads, [&](size_t b, size_t e) {
    for (size_t t = b; t < e; ++t) {
      const std::vector<uint64_t>& v = tmod[t];
      for (long c1 = 0; c1 < r && modok[t]; ++c1) {
        uint64_t lam = 0;
        for (long c2 = 0; c2 < r; ++c2)
          lam = modp::addmod(lam,
                             modp::mulmod(gm[static_cast<size_t>(c1)][static_cast<size_t>(id) * static_cast<size_t>(r) + static_cast<size_t>(c2)],
                                          v[static_cast<size_t>(c2)], ell),
                             ell);
        for (long c3 = 0; c3 < r; ++c3) {
          uint64_t acc = 0;
          for (long c2 = 0; c2 < r; ++c2)
            acc = modp::addmod(acc,
                               modp::mulmod(gm[static_cast<size_t>(c1)][static_cast<size_t>(c3) * static_cast<size_t>(r) + static_cast<size_t>(c2)],
                                            v[static_cast<size_t>(c2)], ell),
                               ell);
          if (acc != modp::mulmod(lam, v[static_cast<size_t>(c3)], ell)) {
            modok[t] = 0;
            break;
          }
        }
      }
    }
  });
  cert.mod_certified = std::all_of(modok.begin(), modok.end(), [](char c) { return c != 0; });

  // exact certification: a seeded integer combination of the convolution
  // operators has each table as an eigenvector, with pairwise distinct
  // eigenvalues (which pins the common eigenlines down exactly)
  std::vector<Rat> coefq(static_cast<size_t>(r));
  for (auto& c : coefq) c = Rat(static_cast<long>(rng.next() % 997 + 1));
  std::vector<Cyc> Mx(static_cast<size_t>(r) * static_cast<size_t>(r));
  for (long c3 = 0; c3 < r; ++c3)
    for (long c2 = 0; c2 < r; ++c2) {
      Cyc acc;
      for (long c1 = 0; c1 < r; ++c1) acc += coefq[static_cast<size_t>(c1)] * H.gamma_at(c1, c2, c3);
      Mx[static_cast<size_t>(c3) * static_cast<size_t>(r) + static_cast<size_t>(c2)] = std::move(acc);
    }
  std::vector<Cyc> etas(static_cast<size_t>(r));
  std::vector<char> exok(static_cast<size_t>(r), 1);
  parallel_for(static_cast<size_t>(r), threads, [&](size_t b, size_t e) {
    for (size_t t = b; t < e; ++t) {
      const std::vector<Cyc>& B = tables[t];
      std::vector<Cyc> w(static_cast<size_t>(r));
      for (long c3 = 0; c3 < r; ++c3) {
        Cyc acc;
        for (long c2 = 0; c2 < r; ++c2)
          acc += Mx[static_cast<size_t>(c3) * static_cast<size_t>(r) + static_cast<size_t>(c2)] * B[static_cast<size_t>(c2)];
        w[static_cast<size_t>(c3)] = std::move(acc);
      }
      etas[t] = w[static_cast<size_t>(id)];
      for (long c3 = 0; c3 < r && exok[t]; ++c3)
        if (!(w[static_cast<size_t>(c3)] == etas[t] * B[static_cast<size_t>(c3)])) exok[t] = 0;
    }
  });
  cert.exact_certified = std::all_of(exok.begin(), exok.end(), [](char c) { return c != 0; });
  cert.eigenvalues_distinct = true;
  for (long i = 0; i < r && cert.eigenvalues_distinct; ++i)
    for (long j = i + 1; j < r; ++j)
      if (etas[static_cast<size_t>(i)] == etas[static_cast<size_t>(j)]) {
        cert.eigenvalues_distinct = false;
        break;
      }
  return cert;
}

// --- explicit Whittaker models, realized mod ell ---
// Exact echelon arithmetic over Q(zeta) blows up coefficient sizes, so the
// model is realized over F_ell via the certified root of unity of a character
// table (ell never divides |G| since ell = 1 mod exponent).  The model serves
// as an independent cross-check of the closed twisted-trace formula, whose
// own values stay exact.

struct WhittakerModel {
  const BesselEnv* env = nullptr;
  uint64_t ell = 0, zroot = 0;
  long unity_order = 0;
  long dim = 0;
  std::vector<uint64_t> zp;       // powers of zeta_p mod ell
  std::vector<int32_t> reps;      // least-index representatives of N\G
  std::vector<int32_t> rep_pos;   // element -> coset position
  std::vector<int8_t> left_exp;   // element -> psi exponent of its N-part
  std::vector<std::vector<uint64_t>> basis;  // RREF rows of function values at reps
  std::vector<size_t> piv;

  // values at reps of the right translate rho(g)f
  std::vector<uint64_t> translate(const std::vector<uint64_t>& f, int32_t g) const {
    const Group& G = env->ctx->G;
    std::vector<uint64_t> out(reps.size());
    for (size_t i = 0; i < reps.size(); ++i) {
      int32_t y = G.mul(reps[i], g);
      out[i] = modp::mulmod(zp[static_cast<size_t>(left_exp[static_cast<size_t>(y)])],
                            f[static_cast<size_t>(rep_pos[static_cast<size_t>(y)])], ell);
    }
    return out;
  }

  // values at reps of f composed with the involution
  std::vector<uint64_t> compose_involution(const std::vector<uint64_t>& f, char iota) const {
    const std::vector<int32_t>& inv = env->ctx->involution_map(iota);
    std::vector<uint64_t> out(reps.size());
    for (size_t i = 0; i < reps.size(); ++i) {
      int32_t y = inv[static_cast<size_t>(reps[i])];
      out[i] = modp::mulmod(zp[static_cast<size_t>(left_exp[static_cast<size_t>(y)])],
                            f[static_cast<size_t>(rep_pos[static_cast<size_t>(y)])], ell);
    }
    return out;
  }

  // coordinates in the RREF basis; throws if outside the span
  std::vector<uint64_t> solve(std::vector<uint64_t> v) const {
    std::vector<uint64_t> coords(basis.size());
    for (size_t t = 0; t < basis.size(); ++t) {
      uint64_t c = v[piv[t]];
      coords[t] = c;
      if (c)
        for (size_t k = 0; k < v.size(); ++k) v[k] = modp::submod(v[k], modp::mulmod(c, basis[t][k], ell), ell);
    }
    for (uint64_t x : v)
      if (x) throw std::logic_error("function escaped the model");
    return coords;
  }

  // matrix of rho(g) in the basis, flattened M[i*dim + j]
  std::vector<uint64_t> action_matrix(int32_t g) const {
    std::vector<uint64_t> M(static_cast<size_t>(dim) * static_cast<size_t>(dim));
    for (long j = 0; j < dim; ++j) {
      std::vector<uint64_t> col = solve(translate(basis[static_cast<size_t>(j)], g));
      for (long i = 0; i < dim; ++i)
        M[static_cast<size_t>(i) * static_cast<size_t>(dim) + static_cast<size_t>(j)] = col[static_cast<size_t>(i)];
    }
    return M;
  }

  std::vector<uint64_t> intertwiner(char iota) const {
    std::vector<uint64_t> M(static_cast<size_t>(dim) * static_cast<size_t>(dim));
    for (long j = 0; j < dim; ++j) {
      std::vector<uint64_t> col = solve(compose_involution(basis[static_cast<size_t>(j)], iota));
      for (long i = 0; i < dim; ++i)
        M[static_cast<size_t>(i) * static_cast<size_t>(dim) + static_cast<size_t>(j)] = col[static_cast<size_t>(i)];
    }
    return M;
  }

  std::vector<uint64_t> mat_product(const std::vector<uint64_t>& A, const std::vector<uint64_t>& B) const {
    size_t d = static_cast<size_t>(dim);
    std::vector<uint64_t> C(d * d, 0);
    for (size_t i = 0; i < d; ++i)
      for (size_t k = 0; k < d; ++k) {
        uint64_t a = A[i * d + k];
        if (!a) continue;
        for (size_t j = 0; j < d; ++j) C[i * d + j] = modp::addmod(C[i * d + j], modp::mulmod(a, B[k * d + j], ell), ell);
      }
    return C;
  }

  uint64_t mat_trace(const std::vector<uint64_t>& A) const {
    uint64_t acc = 0;
    for (long i = 0; i < dim; ++i)
      acc = modp::addmod(acc, A[static_cast<size_t>(i) * static_cast<size_t>(dim) + static_cast<size_t>(i)], ell);
    return acc;
  }

  uint64_t reduce(const Cyc& v) const { return modp::cyc_mod(v, ell, zroot, unity_order); }
};

// spans the right translates of the Bessel function inside Ind_N^G psi,
// reduced mod the (certified) modulus of the character table
inline WhittakerModel whittaker_model(const BesselEnv& env, const CharTable& T, const std::vector<Cyc>& B,
                                      long degree) {
  WhittakerModel W;
  W.env = &env;
  W.ell = T.ell;
  W.zroot = T.zroot;
  W.unity_order = T.unity_order;
  int p = env.psi->p();
  if (T.unity_order % p != 0) throw std::logic_error("p does not divide the unity order");
  uint64_t z = modp::powmod(T.zroot, static_cast<uint64_t>(T.unity_order / p), T.ell);
  W.zp.resize(static_cast<size_t>(p));
  for (int e = 0; e < p; ++e) W.zp[static_cast<size_t>(e)] = modp::powmod(z, static_cast<uint64_t>(e), T.ell);
  const GLContext& ctx = *env.ctx;
  const Group& G = ctx.G;
  W.rep_pos.assign(static_cast<size_t>(G.size()), -1);
  W.left_exp.assign(static_cast<size_t>(G.size()), 0);
  for (long g = 0; g < G.size(); ++g) {
    if (W.rep_pos[static_cast<size_t>(g)] >= 0) continue;
    int32_t pos = static_cast<int32_t>(W.reps.size());
    W.reps.push_back(static_cast<int32_t>(g));
    for (int32_t u : ctx.N.idx) {
      int32_t y = G.mul(u, static_cast<int32_t>(g));
      W.rep_pos[static_cast<size_t>(y)] = pos;
      W.left_exp[static_cast<size_t>(y)] = static_cast<int8_t>(env.psi->exponent(G.elems[static_cast<size_t>(u)]));
    }
  }
  std::vector<uint64_t> bmod(B.size());
  for (size_t c = 0; c < B.size(); ++c) bmod[c] = W.reduce(B[c]);
  std::vector<uint64_t> f0(W.reps.size(), 0);
  for (size_t i = 0; i < W.reps.size(); ++i) {
    int32_t c = env.cell_of_g[static_cast<size_t>(W.reps[i])];
    if (c >= 0)
      f0[i] = modp::mulmod(W.zp[static_cast<size_t>(env.psiexp_g[static_cast<size_t>(W.reps[i])])],
                           bmod[static_cast<size_t>(c)], W.ell);
  }
  auto insert = [&](std::vector<uint64_t> v) {
    for (size_t t = 0; t < W.basis.size(); ++t) {
      uint64_t c = v[W.piv[t]];
      if (c)
        for (size_t k = 0; k < v.size(); ++k) v[k] = modp::submod(v[k], modp::mulmod(c, W.basis[t][k], W.ell), W.ell);
    }
    size_t pv = v.size();
    for (size_t k = 0; k < v.size(); ++k)
      if (v[k]) {
        pv = k;
        break;
      }
    if (pv == v.size()) return;
    uint64_t inv = modp::invmod(v[pv], W.ell);
    for (auto& x : v) x = modp::mulmod(x, inv, W.ell);
    for (size_t t = 0; t < W.basis.size(); ++t) {
      uint64_t c = W.basis[t][pv];
      if (c)
        for (size_t k = 0; k < v.size(); ++k)
          W.basis[t][k] = modp::submod(W.basis[t][k], modp::mulmod(c, v[k], W.ell), W.ell);
    }
    W.basis.push_back(std::move(v));
    W.piv.push_back(pv);
  };
  insert(f0);
  for (long g = 0; g < G.size() && static_cast<long>(W.basis.size()) < degree; ++g)
    insert(W.translate(f0, static_cast<int32_t>(g)));
  W.dim = static_cast<long>(W.basis.size());
  if (W.dim != degree) throw std::logic_error("whittaker model dimension mismatch");
  return W;
}

// Trace[pi(x) T_iota] = (dim/|G|) sum_g B((g x)^iota g^{-1}), with T_iota the
// intertwiner normalized by fixing the Bessel function
inline Cyc twisted_trace_formula(const BesselEnv& env, const std::vector<Cyc>& B, long dim, char iota, int32_t x) {
  const GLContext& ctx = *env.ctx;
  const std::vector<int32_t>& inv = ctx.involution_map(iota);
  int p = env.psi->p();
  long r = env.cells.size();
  std::vector<long> cnt(static_cast<size_t>(r) * static_cast<size_t>(p), 0);
  for (long g = 0; g < ctx.G.size(); ++g) {
    int32_t y = ctx.G.mul(inv[static_cast<size_t>(ctx.G.mul(static_cast<int32_t>(g), x))],
                          ctx.G.inv_of[static_cast<size_t>(g)]);
    int32_t c = env.cell_of_g[static_cast<size_t>(y)];
    if (c >= 0) cnt[static_cast<size_t>(c) * static_cast<size_t>(p) + static_cast<size_t>(env.psiexp_g[static_cast<size_t>(y)])]++;
  }
  Cyc acc;
  for (long c = 0; c < r; ++c)
    for (int e = 0; e < p; ++e) {
      long k = cnt[static_cast<size_t>(c) * static_cast<size_t>(p) + static_cast<size_t>(e)];
      if (k) acc += Cyc::root(e, p, Rat(k)) * B[static_cast<size_t>(c)];
    }
  return acc.scaled(Rat(dim, ctx.G.size()));
}

// the outer automorphism g -> J t(g)^{-1} J fixing (N, psi) up to conjugation
inline Mat mat_split_theta(const FiniteField& K, const Mat& g) {
  Mat j = mat_antidiag_J(K, g.n);
  return mat_mul(K, mat_mul(K, j, mat_transpose(mat_inv(K, g))), j);
}

}  // namespace finper
