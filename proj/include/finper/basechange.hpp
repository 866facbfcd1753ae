#pragma once

// Matching a stable generic character of the big group with its source on the
// fixed group of the opposite involution, by comparing the closed twisted
// trace against character values at elements g with g g^kappa inside the
// fixed group.  The matched degree is compared with the degree inferred from
// the fixed-group period, which closes the loop between the two computations.

#include "finper/periods.hpp"

namespace finper {

struct BaseChangePair {
  int chi = -1;       // character index on the big group
  char kappa = 0;     // involution whose fixed group carries the source
  int rho = -1;       // character index on the fixed group, -1 unless unique
  long dim_rho = 0;
  int status = 0;     // 1 unique, 2 ambiguous, 0 failed
  long samples = 0;
};

// dim rho predicted by the period identity, lambda over the fixed group of
// iota scaled by dim pi * |G_sigma||G_tau| / |G|
inline Rat infer_dim_rho(const BesselEnv& env, const std::vector<Cyc>& B, long deg, char iota) {
  const GLContext& c = *env.ctx;
  return lambda_form(env, B, iota).as_rational() * Rat(deg) * Rat(c.Gsig.size() * c.Gtau.size()) / Rat(c.G.size());
}

inline std::vector<int32_t> parent_to_sub(const Group& parent, const Group& sub) {
  std::vector<int32_t> map(static_cast<size_t>(parent.size()), -1);
  for (long i = 0; i < sub.size(); ++i)
    map[static_cast<size_t>(sub.to_parent()[static_cast<size_t>(i)])] = static_cast<int32_t>(i);
  return map;
}

// up to per_class elements g per conjugacy class of g g^kappa in the fixed
// group; extra representatives guard against a trace that fails to be a
// class function of the product
inline std::vector<int32_t> twisted_samples(const GLContext& c, char kappa, const Group& sub,
                                            const std::vector<int32_t>& p2s, int per_class = 3) {
  const std::vector<int32_t>& kmap = c.involution_map(kappa);
  std::vector<int> taken(static_cast<size_t>(sub.num_classes()), 0);
  std::vector<int32_t> out;
  for (long g = 0; g < c.G.size(); ++g) {
    int32_t s = c.G.mul(static_cast<int32_t>(g), kmap[static_cast<size_t>(g)]);
    int32_t si = p2s[static_cast<size_t>(s)];
    if (si < 0) continue;
    long cls = sub.class_of[static_cast<size_t>(si)];
    if (taken[static_cast<size_t>(cls)] >= per_class) continue;
    taken[static_cast<size_t>(cls)]++;
    out.push_back(static_cast<int32_t>(g));
  }
  return out;
}

inline BaseChangePair match_by_twisted_trace(const BesselEnv& env, const std::vector<Cyc>& B, long deg, int chi,
                                             char kappa, const Group& sub, const CharTable& subtable,
                                             const std::vector<int32_t>& p2s) {
  const GLContext& c = *env.ctx;
  const std::vector<int32_t>& kmap = c.involution_map(kappa);
  std::vector<int32_t> samples = twisted_samples(c, kappa, sub, p2s);
  BaseChangePair pair;
  pair.chi = chi;
  pair.kappa = kappa;
  pair.samples = static_cast<long>(samples.size());
  std::vector<long> cls(samples.size());
  std::vector<Cyc> traces(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) {
    int32_t g = samples[i];
    int32_t s = c.G.mul(g, kmap[static_cast<size_t>(g)]);
    cls[i] = sub.class_of[static_cast<size_t>(p2s[static_cast<size_t>(s)])];
    traces[i] = twisted_trace_formula(env, B, deg, kappa, g);
  }
  std::vector<int> candidates;
  for (long r = 0; r < subtable.num_chars(); ++r) {
    bool ok = true;
    for (size_t i = 0; i < samples.size() && ok; ++i)
      ok = (subtable.chars[static_cast<size_t>(r)][static_cast<size_t>(cls[i])] == traces[i]);
    if (ok) candidates.push_back(static_cast<int>(r));
  }
  if (candidates.empty()) {
    pair.status = 0;
  } else if (candidates.size() == 1) {
    pair.status = 1;
    pair.rho = candidates[0];
    pair.dim_rho = subtable.degrees[static_cast<size_t>(candidates[0])];
  } else {
    pair.status = 2;
    pair.rho = candidates[0];
    pair.dim_rho = subtable.degrees[static_cast<size_t>(candidates[0])];
  }
  return pair;
}

// multiplicity of psi in the restriction of a fixed-group character to the
// fixed unipotent subgroup (indices of the parent group)
inline Rat restricted_genericity(const Group& parent, const Group& sub, const std::vector<int32_t>& p2s,
                                 const std::vector<int32_t>& nh, const PsiN& psi, const std::vector<Cyc>& rho) {
  Cyc acc;
  for (int32_t u : nh)
    acc += rho[static_cast<size_t>(sub.class_of[static_cast<size_t>(p2s[static_cast<size_t>(u)])])] *
           psi.value_inv(parent.elems[static_cast<size_t>(u)]);
  return acc.scaled(Rat(1, static_cast<long>(nh.size()))).as_rational();
}

}  // namespace finper
