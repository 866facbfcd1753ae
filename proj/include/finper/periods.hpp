#pragma once

// Period functionals evaluated on Bessel functions: averages over the
// fixed-point subgroups of the two involutions, over the norm-one sets, and
// over the F-points of the mirabolic, plus the spectral-projector machinery
// used to cross-check them.  All values are exact cyclotomics; the headline
// identities force them to be rational.

#include "finper/gelfand_graev.hpp"

namespace finper {

inline char opposite_involution(char iota) { return iota == 's' ? 't' : 's'; }

inline const Subset& unipotent_fixed(const GLContext& ctx, char iota) { return iota == 's' ? ctx.Nsig : ctx.Ntau; }

// the averaged forms only descend to cosets of the fixed unipotent subgroup
// when psi is trivial there
inline void require_psi_trivial_on(const BesselEnv& env, const Subset& nh) {
  for (int32_t u : nh.idx)
    if (env.psi->exponent(env.ctx->G.elems[static_cast<size_t>(u)]) != 0)
      throw std::invalid_argument("psi is nontrivial on the unipotent part of the fixed group");
}

// sum of Bessel values over a set of element indices, bucketed by (cell, exp)
inline Cyc bessel_sum_over(const BesselEnv& env, const std::vector<Cyc>& B, const std::vector<int32_t>& idx) {
  int p = env.psi->p();
  long r = env.cells.size();
  std::vector<long> cnt(static_cast<size_t>(r) * static_cast<size_t>(p), 0);
  for (int32_t g : idx) {
    int32_t c = env.cell_of_g[static_cast<size_t>(g)];
    if (c >= 0)
      cnt[static_cast<size_t>(c) * static_cast<size_t>(p) + static_cast<size_t>(env.psiexp_g[static_cast<size_t>(g)])]++;
  }
  Cyc acc;
  for (long c = 0; c < r; ++c)
    for (int e = 0; e < p; ++e) {
      long k = cnt[static_cast<size_t>(c) * static_cast<size_t>(p) + static_cast<size_t>(e)];
      if (k) acc += Cyc::root(e, p, Rat(k)) * B[static_cast<size_t>(c)];
    }
  return acc;
}

// lambda_iota(B) = (1/|G_iota|) sum_{h in G_iota} B(h)
inline Cyc lambda_form(const BesselEnv& env, const std::vector<Cyc>& B, char iota) {
  const GLContext& ctx = *env.ctx;
  require_psi_trivial_on(env, unipotent_fixed(ctx, iota));
  const Subset& H = ctx.fixed_points(iota);
  return bessel_sum_over(env, B, H.idx).scaled(Rat(1, H.size()));
}

// mu_kappa(B) = (1/|G_iota|) sum over the norm-one set of the opposite
// involution kappa; carries the same normalization as lambda_iota
inline Cyc mu_form(const BesselEnv& env, const std::vector<Cyc>& B, char iota) {
  const GLContext& ctx = *env.ctx;
  require_psi_trivial_on(env, unipotent_fixed(ctx, iota));
  return bessel_sum_over(env, B, ctx.norm_one(opposite_involution(iota)).idx)
      .scaled(Rat(1, ctx.fixed_points(iota).size()));
}

// ell(B) = (1/|GL_n(F)|) sum over the F-points of the mirabolic
inline Cyc ell_form(const BesselEnv& env, const std::vector<Cyc>& B) {
  const GLContext& ctx = *env.ctx;
  if (!ctx.tw) throw std::invalid_argument("mirabolic period needs a tower context");
  require_psi_trivial_on(env, ctx.Nsig);
  return bessel_sum_over(env, B, ctx.PF.idx).scaled(Rat(1, ctx.Gsig.size()));
}

// chi(g^iota) = chi(g) as class functions, for an involution given as an
// element-index map
inline bool char_fixed_by(const Group& G, const std::vector<Cyc>& chi, const std::vector<int32_t>& map) {
  for (long c = 0; c < G.num_classes(); ++c) {
    long im = G.class_of[static_cast<size_t>(map[static_cast<size_t>(G.class_rep[static_cast<size_t>(c)])])];
    if (!(chi[static_cast<size_t>(im)] == chi[static_cast<size_t>(c)])) return false;
  }
  return true;
}

// --- spectral projector, exact ---

// x -> sum_{h in G_iota} B(xh), the H-average of the Bessel line
inline std::vector<Cyc> fixed_group_translate_sum(const BesselEnv& env, const std::vector<Cyc>& B, char iota) {
  const GLContext& ctx = *env.ctx;
  const Subset& H = ctx.fixed_points(iota);
  std::vector<Cyc> out(static_cast<size_t>(ctx.G.size()));
  int p = env.psi->p();
  long r = env.cells.size();
  std::vector<long> cnt(static_cast<size_t>(r) * static_cast<size_t>(p));
  for (long x = 0; x < ctx.G.size(); ++x) {
    std::fill(cnt.begin(), cnt.end(), 0);
    for (int32_t h : H.idx) {
      int32_t y = ctx.G.mul(static_cast<int32_t>(x), h);
      int32_t c = env.cell_of_g[static_cast<size_t>(y)];
      if (c >= 0)
        cnt[static_cast<size_t>(c) * static_cast<size_t>(p) + static_cast<size_t>(env.psiexp_g[static_cast<size_t>(y)])]++;
    }
    Cyc acc;
    for (long c = 0; c < r; ++c)
      for (int e = 0; e < p; ++e) {
        long k = cnt[static_cast<size_t>(c) * static_cast<size_t>(p) + static_cast<size_t>(e)];
        if (k) acc += Cyc::root(e, p, Rat(k)) * B[static_cast<size_t>(c)];
      }
    out[static_cast<size_t>(x)] = std::move(acc);
  }
  return out;
}

// a function of the form g -> zeta_p^{exp[g]} * vals[label[g]], with
// label[g] = -1 off the support
struct RootedFunction {
  std::vector<int32_t> label;
  std::vector<int8_t> exp;
  std::vector<Cyc> vals;
};

// W1(nh) = psi(n) on N * G_iota and 0 elsewhere; throws if the two factors of
// some element disagree on the psi value (psi nontrivial on N cap G_iota)
inline RootedFunction indicator_whittaker(const BesselEnv& env, char iota) {
  const GLContext& ctx = *env.ctx;
  RootedFunction W;
  W.label.assign(static_cast<size_t>(ctx.G.size()), -1);
  W.exp.assign(static_cast<size_t>(ctx.G.size()), 0);
  W.vals = {Cyc(1)};
  for (int32_t u : ctx.N.idx) {
    int8_t e = static_cast<int8_t>(env.psi->exponent(ctx.G.elems[static_cast<size_t>(u)]));
    for (int32_t h : ctx.fixed_points(iota).idx) {
      int32_t y = ctx.G.mul(u, h);
      if (W.label[static_cast<size_t>(y)] < 0) {
        W.label[static_cast<size_t>(y)] = 0;
        W.exp[static_cast<size_t>(y)] = e;
      } else if (W.exp[static_cast<size_t>(y)] != e) {
        throw std::logic_error("indicator function ill-defined: psi nontrivial on N cap G_iota");
      }
    }
  }
  return W;
}

// the Bessel table itself, as a rooted function
inline RootedFunction bessel_rooted(const BesselEnv& env, const std::vector<Cyc>& B) {
  return RootedFunction{env.cell_of_g, env.psiexp_g, B};
}

inline Cyc rooted_value(const RootedFunction& W, int p, int32_t g) {
  int32_t l = W.label[static_cast<size_t>(g)];
  if (l < 0) return Cyc();
  return Cyc::root(W.exp[static_cast<size_t>(g)], p) * W.vals[static_cast<size_t>(l)];
}

// spectral projection (P W)(x) = (dim/|G|) sum_g W(g) B(x g^{-1}); the
// root-of-unity structure of W turns the inner sum into integer counting
inline std::vector<Cyc> bessel_project(const BesselEnv& env, const std::vector<Cyc>& B, long dim,
                                       const RootedFunction& W) {
  const GLContext& ctx = *env.ctx;
  int p = env.psi->p();
  long r = env.cells.size();
  long L = static_cast<long>(W.vals.size());
  std::vector<int32_t> supp;
  for (long g = 0; g < ctx.G.size(); ++g)
    if (W.label[static_cast<size_t>(g)] >= 0) supp.push_back(static_cast<int32_t>(g));
  std::vector<Cyc> out(static_cast<size_t>(ctx.G.size()));
  std::vector<long> cnt(static_cast<size_t>(L) * static_cast<size_t>(r) * static_cast<size_t>(p));
  for (long x = 0; x < ctx.G.size(); ++x) {
    std::fill(cnt.begin(), cnt.end(), 0);
    for (int32_t g : supp) {
      int32_t y = ctx.G.mul(static_cast<int32_t>(x), ctx.G.inv_of[static_cast<size_t>(g)]);
      int32_t c = env.cell_of_g[static_cast<size_t>(y)];
      if (c < 0) continue;
      int e = (W.exp[static_cast<size_t>(g)] + env.psiexp_g[static_cast<size_t>(y)]) % p;
      cnt[(static_cast<size_t>(W.label[static_cast<size_t>(g)]) * static_cast<size_t>(r) + static_cast<size_t>(c)) *
              static_cast<size_t>(p) +
          static_cast<size_t>(e)]++;
    }
    Cyc acc;
    for (long l = 0; l < L; ++l)
      for (long c = 0; c < r; ++c)
        for (int e = 0; e < p; ++e) {
          long k = cnt[(static_cast<size_t>(l) * static_cast<size_t>(r) + static_cast<size_t>(c)) * static_cast<size_t>(p) +
                       static_cast<size_t>(e)];
          if (k) acc += Cyc::root(e, p, Rat(k)) * (W.vals[static_cast<size_t>(l)] * B[static_cast<size_t>(c)]);
        }
    out[static_cast<size_t>(x)] = acc.scaled(Rat(dim, ctx.G.size()));
  }
  return out;
}

}  // namespace finper
