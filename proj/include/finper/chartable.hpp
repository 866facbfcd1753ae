#pragma once

// Exact character tables.  Eigenvectors of the class-algebra (Burnside)
// matrices are found modulo a prime ell = 1 (mod exponent), ell > 2*sqrt|G|,
// then lifted to exact cyclotomics.  The lift is certified: every vector is
// verified to be a common eigenvector of all Burnside matrices mod ell (which
// by the standard lifting bound pins down the exact table uniquely), and the
// lifted table additionally passes exact orthonormality checks.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "finper/context.hpp"
#include "finper/cyclotomic.hpp"
#include "finper/group.hpp"
#include "finper/util.hpp"

namespace finper {

namespace modp {

inline uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) {
  return static_cast<uint64_t>((static_cast<__uint128_t>(a) * b) % m);
}
inline uint64_t addmod(uint64_t a, uint64_t b, uint64_t m) {
  uint64_t s = a + b;
  return s >= m ? s - m : s;
}
inline uint64_t submod(uint64_t a, uint64_t b, uint64_t m) { return addmod(a, m - b % m, m); }
inline uint64_t powmod(uint64_t a, uint64_t e, uint64_t m) {
  uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}
inline uint64_t invmod(uint64_t a, uint64_t m) { return powmod(a, m - 2, m); }  // m prime

inline bool is_prime(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t f = 2; f * f <= n; ++f)
    if (n % f == 0) return false;
  return true;
}

inline uint64_t primitive_root(uint64_t p) {
  std::vector<long> fs = detail::prime_factors(static_cast<long>(p - 1));
  for (uint64_t g = 2; g < p; ++g) {
    bool ok = true;
    for (long f : fs)
      if (powmod(g, (p - 1) / static_cast<uint64_t>(f), p) == 1) {
        ok = false;
        break;
      }
    if (ok) return g;
  }
  throw std::logic_error("no primitive root");
}

// residue of an exact rational mod ell
inline uint64_t rat_mod(const Rat& r, uint64_t ell) {
  Int num = boost::multiprecision::numerator(r);
  Int den = boost::multiprecision::denominator(r);
  Int lm(static_cast<long long>(ell));
  uint64_t n = static_cast<uint64_t>(((num % lm + lm) % lm).convert_to<long long>());
  uint64_t d = static_cast<uint64_t>(((den % lm + lm) % lm).convert_to<long long>());
  if (d == 0) throw std::domain_error("denominator divisible by ell");
  return mulmod(n, invmod(d, ell), ell);
}

// image of a cyclotomic value under zeta_e -> zroot (every term order must divide e)
inline uint64_t cyc_mod(const Cyc& v, uint64_t ell, uint64_t zroot, long e) {
  uint64_t acc = 0;
  for (const Cyc::Term& t : v.terms()) {
    if (e % t.den != 0) throw std::domain_error("term order does not divide the unity order");
    uint64_t w = powmod(zroot, static_cast<uint64_t>(t.num) * static_cast<uint64_t>(e / t.den), ell);
    acc = addmod(acc, mulmod(rat_mod(t.c, ell), w, ell), ell);
  }
  return acc;
}

}  // namespace modp

struct CharTable {
  const Group* G = nullptr;
  std::vector<std::vector<Cyc>> chars;  // [char][class]
  std::vector<long> degrees;
  // modular certificate data (reusable by other mod-ell computations)
  uint64_t ell = 0;
  long unity_order = 0;  // e = exponent(G)
  uint64_t zroot = 0;    // element of order e in F_ell
  std::vector<std::vector<uint64_t>> chars_mod;

  long num_chars() const { return static_cast<long>(chars.size()); }

  // (1/|G|) sum_c |C_c| f1(c) conj(f2(c))
  Cyc inner(const std::vector<Cyc>& f1, const std::vector<Cyc>& f2) const {
    Cyc acc;
    for (long c = 0; c < G->num_classes(); ++c)
      acc += Rat(G->class_size[static_cast<size_t>(c)]) *
             (f1[static_cast<size_t>(c)] * f2[static_cast<size_t>(c)].conj());
    return acc.scaled(Rat(1, G->size()));
  }

  // exact multiplicity <f, chi_i>; must be a rational integer for characters
  long multiplicity(const std::vector<Cyc>& f, int i) const {
    Rat r = inner(f, chars[static_cast<size_t>(i)]).as_rational();
    if (boost::multiprecision::denominator(r) != 1) throw std::domain_error("non-integral multiplicity");
    return static_cast<long>(boost::multiprecision::numerator(r).convert_to<long long>());
  }

  int find_char(const std::vector<Cyc>& f) const {
    for (long i = 0; i < num_chars(); ++i) {
      bool eq = true;
      for (long c = 0; c < G->num_classes() && eq; ++c)
        eq = (chars[static_cast<size_t>(i)][static_cast<size_t>(c)] == f[static_cast<size_t>(c)]);
      if (eq) return static_cast<int>(i);
    }
    return -1;
  }

  std::vector<Cyc> contragredient(int i) const {
    std::vector<Cyc> out(static_cast<size_t>(G->num_classes()));
    for (long c = 0; c < G->num_classes(); ++c)
      out[static_cast<size_t>(c)] = chars[static_cast<size_t>(i)][static_cast<size_t>(G->inv_class[static_cast<size_t>(c)])];
    return out;
  }
};

namespace detail {

struct ModSubspace {
  std::vector<std::vector<uint64_t>> rows;  // RREF rows, normalized pivots
  std::vector<int> pivots;
};

inline void rref_insert(ModSubspace& s, std::vector<uint64_t> v, uint64_t ell) {
  for (size_t t = 0; t < s.rows.size(); ++t) {
    uint64_t c = v[static_cast<size_t>(s.pivots[t])];
    if (c)
      for (size_t k = 0; k < v.size(); ++k)
        v[k] = modp::submod(v[k], modp::mulmod(c, s.rows[t][k], ell), ell);
  }
  int piv = -1;
  for (size_t k = 0; k < v.size(); ++k)
    if (v[k]) {
      piv = static_cast<int>(k);
      break;
    }
  if (piv < 0) return;
  uint64_t inv = modp::invmod(v[static_cast<size_t>(piv)], ell);
  for (auto& x : v) x = modp::mulmod(x, inv, ell);
  // clear this pivot from existing rows
  for (size_t t = 0; t < s.rows.size(); ++t) {
    uint64_t c = s.rows[t][static_cast<size_t>(piv)];
    if (c)
      for (size_t k = 0; k < v.size(); ++k)
        s.rows[t][k] = modp::submod(s.rows[t][k], modp::mulmod(c, v[k], ell), ell);
  }
  s.rows.push_back(std::move(v));
  s.pivots.push_back(piv);
}

// coordinates of v in the RREF basis; throws if v is outside the span
inline std::vector<uint64_t> rref_coords(const ModSubspace& s, std::vector<uint64_t> v, uint64_t ell) {
  std::vector<uint64_t> coords(s.rows.size());
  for (size_t t = 0; t < s.rows.size(); ++t) {
    uint64_t c = v[static_cast<size_t>(s.pivots[t])];
    coords[t] = c;
    if (c)
      for (size_t k = 0; k < v.size(); ++k)
        v[k] = modp::submod(v[k], modp::mulmod(c, s.rows[t][k], ell), ell);
  }
  for (uint64_t x : v)
    if (x) throw std::logic_error("vector escaped an invariant subspace");
  return coords;
}

// characteristic polynomial of a d x d matrix mod ell (Hessenberg method);
// coefficients ascending, monic
inline std::vector<uint64_t> charpoly_mod(std::vector<std::vector<uint64_t>> H, uint64_t ell) {
  size_t d = H.size();
  // reduce to upper Hessenberg by similarity transforms
  for (size_t c = 0; c + 2 <= d; ++c) {
    size_t piv = 0;
    bool found = false;
    for (size_t r = c + 1; r < d; ++r)
      if (H[r][c]) {
        piv = r;
        found = true;
        break;
      }
    if (!found) continue;
    if (piv != c + 1) {
      std::swap(H[piv], H[c + 1]);
      for (size_t r = 0; r < d; ++r) std::swap(H[r][piv], H[r][c + 1]);
    }
    uint64_t inv = modp::invmod(H[c + 1][c], ell);
    for (size_t r = c + 2; r < d; ++r) {
      uint64_t f = modp::mulmod(H[r][c], inv, ell);
      if (!f) continue;
      for (size_t k = 0; k < d; ++k) H[r][k] = modp::submod(H[r][k], modp::mulmod(f, H[c + 1][k], ell), ell);
      for (size_t k = 0; k < d; ++k) H[k][c + 1] = modp::addmod(H[k][c + 1], modp::mulmod(f, H[k][r], ell), ell);
    }
  }
  // p_i = det(xI - H_i) for the leading i x i block
  std::vector<std::vector<uint64_t>> p(d + 1);
  p[0] = {1};
  for (size_t i = 1; i <= d; ++i) {
    // p_i = (x - H[i-1][i-1]) p_{i-1} - sum_{j<i-1} H[j][i-1] (prod subdiag) p_j
    std::vector<uint64_t> cur(i + 1, 0);
    for (size_t k = 0; k < p[i - 1].size(); ++k) {
      cur[k + 1] = modp::addmod(cur[k + 1], p[i - 1][k], ell);
      cur[k] = modp::submod(cur[k], modp::mulmod(H[i - 1][i - 1], p[i - 1][k], ell), ell);
    }
    uint64_t prod = 1;
    for (size_t j = i - 1; j-- > 0;) {
      prod = modp::mulmod(prod, H[j + 1][j], ell);
      uint64_t coef = modp::mulmod(H[j][i - 1], prod, ell);
      if (!coef) continue;
      for (size_t k = 0; k < p[j].size(); ++k)
        cur[k] = modp::submod(cur[k], modp::mulmod(coef, p[j][k], ell), ell);
    }
    p[i] = std::move(cur);
  }
  return p[d];
}

// Splits F_ell^r into one-dimensional common eigenspaces of a commuting
// family.  combo(coef) must return the matrix sum_i coef_i * A_i flattened as
// M[j*r + k] acting by (M v)_j = sum_k M_{jk} v_k.  Returns r vectors.
inline std::vector<std::vector<uint64_t>> split_common_eigenvectors(
    long r, const std::function<std::vector<uint64_t>(const std::vector<uint64_t>&)>& combo, long ncoef,
    uint64_t ell, Rng& rng, int max_iter = 60) {
  std::vector<ModSubspace> spaces(1);
  for (long t = 0; t < r; ++t) {
    std::vector<uint64_t> row(static_cast<size_t>(r), 0);
    row[static_cast<size_t>(t)] = 1;
    spaces[0].rows.push_back(std::move(row));
    spaces[0].pivots.push_back(static_cast<int>(t));
  }
  for (int iter = 0; iter < max_iter; ++iter) {
    bool alldone = true;
    for (const auto& s : spaces) alldone &= (s.rows.size() == 1);
    if (alldone) break;
    std::vector<uint64_t> coef(static_cast<size_t>(ncoef));
    for (auto& c : coef) c = rng.next() % ell;
    std::vector<uint64_t> M = combo(coef);
    std::vector<ModSubspace> next;
    for (ModSubspace& s : spaces) {
      size_t d = s.rows.size();
      if (d == 1) {
        next.push_back(std::move(s));
        continue;
      }
      std::vector<std::vector<uint64_t>> R(d, std::vector<uint64_t>(d));
      for (size_t t = 0; t < d; ++t) {
        std::vector<uint64_t> img(static_cast<size_t>(r), 0);
        for (long j = 0; j < r; ++j) {
          uint64_t acc = 0;
          for (long k = 0; k < r; ++k)
            acc = modp::addmod(acc,
                               modp::mulmod(M[static_cast<size_t>(j) * static_cast<size_t>(r) + static_cast<size_t>(k)],
                                            s.rows[t][static_cast<size_t>(k)], ell),
                               ell);
          img[static_cast<size_t>(j)] = acc;
        }
        std::vector<uint64_t> coords = rref_coords(s, std::move(img), ell);
        for (size_t u = 0; u < d; ++u) R[u][t] = coords[u];
      }
      std::vector<uint64_t> cp = charpoly_mod(R, ell);
      size_t split_total = 0;
      std::vector<ModSubspace> pieces;
      for (uint64_t lam = 0; lam < ell; ++lam) {
        uint64_t v = 0;
        for (size_t k = cp.size(); k-- > 0;) v = modp::addmod(modp::mulmod(v, lam, ell), cp[k], ell);
        if (v != 0) continue;
        ModSubspace rs;  // row space of (R - lam I)
        for (size_t t = 0; t < d; ++t) {
          std::vector<uint64_t> row = R[t];
          row[t] = modp::submod(row[t], lam, ell);
          rref_insert(rs, std::move(row), ell);
        }
        std::vector<char> is_piv(d, 0);
        for (int pv : rs.pivots) is_piv[static_cast<size_t>(pv)] = 1;
        ModSubspace piece;
        for (size_t free = 0; free < d; ++free) {
          if (is_piv[free]) continue;
          std::vector<uint64_t> kern(d, 0);
          kern[free] = 1;
          for (size_t t = 0; t < rs.rows.size(); ++t)
            kern[static_cast<size_t>(rs.pivots[t])] = modp::submod(0, rs.rows[t][free], ell);
          std::vector<uint64_t> amb(static_cast<size_t>(r), 0);
          for (size_t u = 0; u < d; ++u)
            if (kern[u])
              for (long k = 0; k < r; ++k)
                amb[static_cast<size_t>(k)] = modp::addmod(
                    amb[static_cast<size_t>(k)], modp::mulmod(kern[u], s.rows[u][static_cast<size_t>(k)], ell), ell);
          rref_insert(piece, std::move(amb), ell);
        }
        if (!piece.rows.empty()) {
          split_total += piece.rows.size();
          pieces.push_back(std::move(piece));
        }
      }
      if (split_total != d) throw std::logic_error("commuting algebra restriction not diagonalizable");
      for (auto& pc : pieces) next.push_back(std::move(pc));
    }
    spaces = std::move(next);
  }
  std::vector<std::vector<uint64_t>> out;
  for (const auto& s : spaces) {
    if (s.rows.size() != 1) throw std::logic_error("eigenvector separation failed after max retries");
    out.push_back(s.rows[0]);
  }
  if (static_cast<long>(out.size()) != r) throw std::logic_error("wrong number of eigenvectors");
  return out;
}

}  // namespace detail

inline CharTable dixon_character_table(const Group& G, uint64_t seed = 20240901, int threads = 0) {
  const long r = G.num_classes();
  const long gsz = G.size();
  // --- class-algebra structure constants a_{ijk}, layout A[k*r*r + i*r + j]
  std::vector<int32_t> A(static_cast<size_t>(r) * r * r, 0);
  parallel_for(static_cast<size_t>(r), threads, [&](size_t kb, size_t ke) {
    for (size_t k = kb; k < ke; ++k) {
      const Mat z = G.elems[static_cast<size_t>(G.class_rep[k])];
      int32_t* slice = &A[k * static_cast<size_t>(r) * static_cast<size_t>(r)];
      for (long x = 0; x < gsz; ++x) {
        int32_t i = G.class_of[static_cast<size_t>(x)];
        int32_t j = G.class_of[static_cast<size_t>(
            G.idx(mat_mul(*G.K, G.elems[static_cast<size_t>(G.inv_of[static_cast<size_t>(x)])], z)))];
        slice[static_cast<size_t>(i) * static_cast<size_t>(r) + static_cast<size_t>(j)]++;
      }
    }
  });
  auto burnside = [&](long i, long j, long k) -> int32_t {
    return A[static_cast<size_t>(k) * static_cast<size_t>(r) * static_cast<size_t>(r) +
             static_cast<size_t>(i) * static_cast<size_t>(r) + static_cast<size_t>(j)];
  };

  // --- modulus: smallest prime ell = 1 mod exponent with ell > 2 sqrt |G|
  const long e = G.exponent;
  uint64_t ell = 0;
  long bound = 2 * isqrt_floor(gsz) + 1;
  for (uint64_t cand = static_cast<uint64_t>(e) + 1;; cand += static_cast<uint64_t>(e)) {
    if (static_cast<long>(cand) > bound && modp::is_prime(cand)) {
      ell = cand;
      break;
    }
  }
  uint64_t zroot = modp::powmod(modp::primitive_root(ell), (ell - 1) / static_cast<uint64_t>(e), ell);

  // --- split the class algebra into one-dimensional common eigenspaces
  Rng rng(seed);
  auto combo = [&](const std::vector<uint64_t>& coef) {
    // M_{jk} = sum_i c_i a_{ijk}
    std::vector<uint64_t> M(static_cast<size_t>(r) * static_cast<size_t>(r));
    parallel_for(static_cast<size_t>(r), threads, [&](size_t jb, size_t je) {
      for (size_t j = jb; j < je; ++j)
        for (long k = 0; k < r; ++k) {
          uint64_t acc = 0;
          for (long i = 0; i < r; ++i)
            acc = modp::addmod(acc, modp::mulmod(coef[static_cast<size_t>(i)],
                                                 static_cast<uint64_t>(burnside(i, static_cast<long>(j), k)) % ell, ell),
                               ell);
          M[j * static_cast<size_t>(r) + static_cast<size_t>(k)] = acc;
        }
    });
    return M;
  };
  std::vector<std::vector<uint64_t>> eig = detail::split_common_eigenvectors(r, combo, r, ell, rng);

  // --- normalize (omega at identity class = 1) and certify mod ell
  long k0 = G.id_class;
  std::vector<std::vector<uint64_t>> omega(static_cast<size_t>(r));
  for (size_t s = 0; s < eig.size(); ++s) {
    std::vector<uint64_t> v = eig[s];
    if (v[static_cast<size_t>(k0)] == 0) throw std::logic_error("eigenvector vanishes at the identity class");
    uint64_t inv = modp::invmod(v[static_cast<size_t>(k0)], ell);
    for (auto& x : v) x = modp::mulmod(x, inv, ell);
    omega[s] = std::move(v);
  }
  parallel_for(omega.size(), threads, [&](size_t b, size_t en) {
    for (size_t s = b; s < en; ++s) {
      const std::vector<uint64_t>& v = omega[s];
      for (long i = 0; i < r; ++i) {
        // (B_i v)_j must equal omega_i * v_j with omega_i = (B_i v)_{k0}
        uint64_t wi = 0;
        for (long k = 0; k < r; ++k)
          wi = modp::addmod(wi, modp::mulmod(static_cast<uint64_t>(burnside(i, k0, k)) % ell, v[static_cast<size_t>(k)], ell), ell);
        for (long j = 0; j < r; ++j) {
          uint64_t acc = 0;
          for (long k = 0; k < r; ++k)
            acc = modp::addmod(acc, modp::mulmod(static_cast<uint64_t>(burnside(i, j, k)) % ell, v[static_cast<size_t>(k)], ell), ell);
          if (acc != modp::mulmod(wi, v[static_cast<size_t>(j)], ell))
            throw std::logic_error("common-eigenvector certification failed");
        }
      }
    }
  });

  // --- degrees and modular character values
  CharTable T;
  T.G = &G;
  T.ell = ell;
  T.unity_order = e;
  T.zroot = zroot;
  long dmax = isqrt_floor(gsz);
  std::vector<std::vector<uint64_t>> chi_mod(static_cast<size_t>(r));
  std::vector<long> degs(static_cast<size_t>(r));
  for (size_t s = 0; s < omega.size(); ++s) {
    const std::vector<uint64_t>& v = omega[s];
    uint64_t ssum = 0;
    for (long k = 0; k < r; ++k) {
      uint64_t ak_inv = modp::invmod(static_cast<uint64_t>(G.class_size[static_cast<size_t>(k)]) % ell, ell);
      ssum = modp::addmod(
          ssum, modp::mulmod(modp::mulmod(v[static_cast<size_t>(k)], v[static_cast<size_t>(G.inv_class[static_cast<size_t>(k)])], ell), ak_inv, ell),
          ell);
    }
    uint64_t d2 = modp::mulmod(static_cast<uint64_t>(gsz) % ell, modp::invmod(ssum, ell), ell);
    long deg = -1;
    for (long d = 1; d <= dmax; ++d)
      if (modp::mulmod(static_cast<uint64_t>(d), static_cast<uint64_t>(d), ell) == d2) {
        deg = d;
        break;
      }
    if (deg < 0) throw std::logic_error("degree recovery failed");
    degs[s] = deg;
    std::vector<uint64_t> chi(static_cast<size_t>(r));
    for (long k = 0; k < r; ++k)
      chi[static_cast<size_t>(k)] = modp::mulmod(
          modp::mulmod(static_cast<uint64_t>(deg), v[static_cast<size_t>(k)], ell),
          modp::invmod(static_cast<uint64_t>(G.class_size[static_cast<size_t>(k)]) % ell, ell), ell);
    chi_mod[s] = std::move(chi);
  }
  long sum_sq = 0;
  for (long d : degs) sum_sq += d * d;
  if (sum_sq != gsz) throw std::logic_error("sum of squared degrees != |G|");

  // --- canonical order: by degree, then by modular value vector
  std::vector<size_t> order(omega.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t x, size_t y) {
    if (degs[x] != degs[y]) return degs[x] < degs[y];
    return chi_mod[x] < chi_mod[y];
  });

  // --- lift to exact cyclotomic values
  T.chars.resize(static_cast<size_t>(r));
  T.degrees.resize(static_cast<size_t>(r));
  T.chars_mod.resize(static_cast<size_t>(r));
  for (size_t oi = 0; oi < order.size(); ++oi) {
    size_t s = order[oi];
    T.degrees[oi] = degs[s];
    T.chars_mod[oi] = chi_mod[s];
    std::vector<Cyc> vals(static_cast<size_t>(r));
    for (long k = 0; k < r; ++k) {
      long o = G.class_order[static_cast<size_t>(k)];
      uint64_t zk = modp::powmod(zroot, static_cast<uint64_t>(e / o), ell);
      uint64_t zk_inv = modp::invmod(zk, ell);
      uint64_t o_inv = modp::invmod(static_cast<uint64_t>(o) % ell, ell);
      Cyc val;
      for (long j = 0; j < o; ++j) {
        uint64_t mj = 0;
        for (long t = 0; t < o; ++t) {
          uint64_t term = modp::mulmod(chi_mod[s][static_cast<size_t>(G.power_class[static_cast<size_t>(k)][static_cast<size_t>(t)])],
                                       modp::powmod(zk_inv, static_cast<uint64_t>(j) * static_cast<uint64_t>(t) % (ell - 1), ell), ell);
          mj = modp::addmod(mj, term, ell);
        }
        mj = modp::mulmod(mj, o_inv, ell);
        if (mj > static_cast<uint64_t>(degs[s]))
          throw std::logic_error("root-of-unity multiplicity exceeds the degree (lift failure)");
        if (mj) val += Cyc::root(j, o, Rat(static_cast<long>(mj)));
      }
      vals[static_cast<size_t>(k)] = std::move(val);
    }
    T.chars[oi] = std::move(vals);
  }

  // --- exact checks: norm 1 per character, degree consistency, and (for
  // small tables) full pairwise orthogonality
  for (long i = 0; i < r; ++i) {
    if (!(T.chars[static_cast<size_t>(i)][static_cast<size_t>(k0)] == Cyc(T.degrees[static_cast<size_t>(i)])))
      throw std::logic_error("lifted degree mismatch at the identity class");
    Rat nrm = T.inner(T.chars[static_cast<size_t>(i)], T.chars[static_cast<size_t>(i)]).as_rational();
    if (nrm != 1) throw std::logic_error("character norm is not 1");
  }
  if (r <= 40) {
    for (long i = 0; i < r; ++i)
      for (long j = i + 1; j < r; ++j)
        if (!T.inner(T.chars[static_cast<size_t>(i)], T.chars[static_cast<size_t>(j)]).is_zero())
          throw std::logic_error("characters not orthogonal");
  } else {
    // modular pairwise orthogonality (exactness already certified above)
    for (long i = 0; i < r; ++i)
      for (long j = 0; j < r; ++j) {
        uint64_t acc = 0;
        for (long k = 0; k < r; ++k) {
          uint64_t ck = static_cast<uint64_t>(G.class_size[static_cast<size_t>(k)]) % ell;
          acc = modp::addmod(acc,
                             modp::mulmod(ck,
                                          modp::mulmod(T.chars_mod[static_cast<size_t>(i)][static_cast<size_t>(k)],
                                                       T.chars_mod[static_cast<size_t>(j)][static_cast<size_t>(G.inv_class[static_cast<size_t>(k)])], ell),
                                          ell),
                             ell);
        }
        uint64_t expect = (i == j) ? static_cast<uint64_t>(gsz) % ell : 0;
        if (acc != expect) throw std::logic_error("modular orthogonality failed");
      }
  }
  return T;
}

// --- class-function utilities ---

// induced character Ind_S^G(theta), S given as a subgroup Group with
// to_parent() into G, theta a class function on S
inline std::vector<Cyc> induce_character(const Group& G, const Group& S, const std::vector<Cyc>& theta) {
  std::vector<Cyc> acc(static_cast<size_t>(G.num_classes()));
  for (long s = 0; s < S.size(); ++s) {
    long c = G.class_of[static_cast<size_t>(S.to_parent()[static_cast<size_t>(s)])];
    acc[static_cast<size_t>(c)] += theta[static_cast<size_t>(S.class_of[static_cast<size_t>(s)])];
  }
  for (long c = 0; c < G.num_classes(); ++c)
    acc[static_cast<size_t>(c)] =
        acc[static_cast<size_t>(c)].scaled(Rat(G.size(), G.class_size[static_cast<size_t>(c)] * S.size()));
  return acc;
}

// restriction of a G class function to S (a subgroup Group of G)
inline std::vector<Cyc> restrict_character(const Group& G, const Group& S, const std::vector<Cyc>& chi) {
  std::vector<Cyc> out(static_cast<size_t>(S.num_classes()));
  for (long c = 0; c < S.num_classes(); ++c)
    out[static_cast<size_t>(c)] =
        chi[static_cast<size_t>(G.class_of[static_cast<size_t>(S.to_parent()[static_cast<size_t>(S.class_rep[static_cast<size_t>(c)])])])];
  return out;
}

// <Res_S chi, theta>_S for S a subset of G element indices and theta given
// pointwise on S via a callback index -> Cyc
inline Cyc average_against(const Group& G, const std::vector<int32_t>& S, const std::vector<Cyc>& chi,
                           const std::function<Cyc(int32_t)>& theta_conj) {
  Cyc acc;
  for (int32_t s : S) acc += chi[static_cast<size_t>(G.class_of[static_cast<size_t>(s)])] * theta_conj(s);
  return acc.scaled(Rat(1, static_cast<long>(S.size())));
}

// multiplicity of the trivial character of S in Res_S chi
inline Rat invariant_dim(const Group& G, const std::vector<int32_t>& S, const std::vector<Cyc>& chi) {
  Cyc acc;
  for (int32_t s : S) acc += chi[static_cast<size_t>(G.class_of[static_cast<size_t>(s)])];
  return acc.scaled(Rat(1, static_cast<long>(S.size()))).as_rational();
}

// genericity multiplicity <Res_N chi, psi> = (1/|N|) sum chi(u) psi(u)^{-1}
inline Rat genericity_multiplicity(const GLContext& ctx, const std::vector<Cyc>& chi, const PsiN& psi) {
  Cyc acc;
  for (int32_t u : ctx.N.idx)
    acc += chi[static_cast<size_t>(ctx.G.class_of[static_cast<size_t>(u)])] *
           psi.value_inv(ctx.G.elems[static_cast<size_t>(u)]);
  return acc.scaled(Rat(1, ctx.N.size())).as_rational();
}

// Harish-Chandra product chi1 x chi2 on GL_{a+b}: inflate to the block-upper
// parabolic P_{a,b} and induce, computed by one sweep of G
inline std::vector<Cyc> parabolic_induce(const Group& G, const Group& Ga, const Group& Gb,
                                         const std::vector<Cyc>& chi1, const std::vector<Cyc>& chi2) {
  int a = Ga.n, b = Gb.n;
  if (a + b != G.n) throw std::invalid_argument("block sizes must sum to n");
  const FiniteField& K = *G.K;
  std::vector<Cyc> acc(static_cast<size_t>(G.num_classes()));
  long psize = 0;
  for (long x = 0; x < G.size(); ++x) {
    const Mat& m = G.elems[static_cast<size_t>(x)];
    bool in_par = true;
    for (int i = a; i < G.n && in_par; ++i)
      for (int j = 0; j < a && in_par; ++j) in_par = (m.at(i, j) == 0);
    if (!in_par) continue;
    ++psize;
    Mat blkA, blkB;
    blkA.n = a;
    blkB.n = b;
    for (int i = 0; i < a; ++i)
      for (int j = 0; j < a; ++j) blkA.at(i, j) = m.at(i, j);
    for (int i = 0; i < b; ++i)
      for (int j = 0; j < b; ++j) blkB.at(i, j) = m.at(a + i, a + j);
    long c = G.class_of[static_cast<size_t>(x)];
    acc[static_cast<size_t>(c)] += chi1[static_cast<size_t>(Ga.class_of[static_cast<size_t>(Ga.idx(blkA))])] *
                                   chi2[static_cast<size_t>(Gb.class_of[static_cast<size_t>(Gb.idx(blkB))])];
  }
  for (long c = 0; c < G.num_classes(); ++c)
    acc[static_cast<size_t>(c)] = acc[static_cast<size_t>(c)].scaled(Rat(G.size(), G.class_size[static_cast<size_t>(c)] * psize));
  return acc;
}

}  // namespace finper
