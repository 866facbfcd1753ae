#pragma once

// Finite fields via exp/log (Zech) tables, the quadratic tower F \subset E,
// Frobenius, traces/norms, and additive characters.
//
// Element encoding within one field: code 0 is the zero element, code c >= 1
// is gamma^{c-1} for the fixed primitive generator gamma (the class of x
// modulo the canonical primitive modulus).

#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "finper/cyclotomic.hpp"

namespace finper {

namespace detail {

// modular polynomial helpers over F_p, coeffs ascending
inline std::vector<int> polymod_mul(const std::vector<int>& a, const std::vector<int>& b,
                                    const std::vector<int>& mod, int p) {
  size_t d = mod.size() - 1;
  std::vector<int> prod(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i])
      for (size_t j = 0; j < b.size(); ++j) prod[i + j] = (prod[i + j] + a[i] * b[j]) % p;
  for (size_t i = prod.size(); i-- > d;) {
    int c = prod[i];
    if (!c) continue;
    prod[i] = 0;
    // x^i = -mod_low * x^{i-d} (mod is monic)
    for (size_t j = 0; j < d; ++j) prod[i - d + j] = ((prod[i - d + j] - c * mod[j]) % p + p) % p;
  }
  prod.resize(d);
  return prod;
}

inline std::vector<int> polymod_pow(std::vector<int> base, Int e, const std::vector<int>& mod, int p) {
  size_t d = mod.size() - 1;
  std::vector<int> res(d, 0);
  res[0] = 1;
  while (e > 0) {
    if ((e & 1) != 0) res = polymod_mul(res, base, mod, p);
    base = polymod_mul(base, base, mod, p);
    e >>= 1;
  }
  return res;
}

inline std::vector<long> prime_factors(long n) {
  std::vector<long> out;
  for (long f = 2; f * f <= n; ++f)
    if (n % f == 0) {
      out.push_back(f);
      while (n % f == 0) n /= f;
    }
  if (n > 1) out.push_back(n);
  return out;
}

}  // namespace detail

class FiniteField {
 public:
  int p = 0;
  int deg = 0;
  long q = 0;  // p^deg
  std::vector<int> modulus;               // monic, coeffs ascending, size deg+1
  std::vector<std::vector<int>> coeffs;   // code -> F_p coefficient vector (size deg)
  std::vector<int> zech;                  // log k -> code of 1 + gamma^k

  FiniteField() = default;

  FiniteField(int p_, int deg_) : p(p_), deg(deg_) {
    if (p < 2) throw std::invalid_argument("p must be >= 2");
    for (int f = 2; f * f <= p; ++f)
      if (p % f == 0) throw std::invalid_argument("p must be prime");
    q = 1;
    for (int i = 0; i < deg; ++i) {
      q *= p;
      if (q > (1L << 20)) throw std::invalid_argument("field size guard exceeded (p^deg > 2^20)");
    }
    modulus = find_primitive_modulus();
    build_tables();
  }

  // --- arithmetic on codes ---
  int mul(int a, int b) const {
    if (a == 0 || b == 0) return 0;
    return 1 + static_cast<int>((static_cast<long>(a - 1) + (b - 1)) % (q - 1));
  }
  int inv(int a) const {
    if (a == 0) throw std::domain_error("inverse of zero");
    return 1 + static_cast<int>((q - 1 - (a - 1)) % (q - 1));
  }
  int add(int a, int b) const {
    if (a == 0) return b;
    if (b == 0) return a;
    long i = a - 1, j = b - 1;
    long d = ((j - i) % (q - 1) + (q - 1)) % (q - 1);
    int z = zech[static_cast<size_t>(d)];
    if (z == 0) return 0;
    return 1 + static_cast<int>((i + (z - 1)) % (q - 1));
  }
  int neg(int a) const { return p == 2 ? a : mul(a, minus_one_); }
  int sub(int a, int b) const { return add(a, neg(b)); }
  int pow(int a, long e) const {
    if (a == 0) {
      if (e < 0) throw std::domain_error("inverse of zero");
      return e == 0 ? 1 : 0;
    }
    long l = (((a - 1) * (e % (q - 1))) % (q - 1) + (q - 1)) % (q - 1);
    return 1 + static_cast<int>(l);
  }
  int one() const { return 1; }

  // element of the prime field F_p as a code
  int scalar(int t) const {
    t = ((t % p) + p) % p;
    return scalar_code_[static_cast<size_t>(t)];
  }
  // inverse of scalar() for elements lying in F_p; throws otherwise
  int as_prime_scalar(int code) const {
    const std::vector<int>& v = coeffs[static_cast<size_t>(code)];
    for (size_t i = 1; i < v.size(); ++i)
      if (v[i] != 0) throw std::domain_error("element not in the prime field");
    return v[0];
  }
  int code_of_coeffs(const std::vector<int>& v) const {
    uint64_t key = 0;
    for (size_t i = v.size(); i-- > 0;) key = key * static_cast<uint64_t>(p) + static_cast<uint64_t>(((v[i] % p) + p) % p);
    auto it = coeff_index_.find(key);
    if (it == coeff_index_.end()) throw std::logic_error("bad coefficient vector");
    return it->second;
  }

  long multiplicative_order(int a) const {
    if (a == 0) throw std::domain_error("order of zero");
    long l = a - 1;
    long g = std::gcd(l, q - 1);
    return (q - 1) / g;
  }

 private:
  int minus_one_ = 1;
  std::vector<int> scalar_code_;
  std::unordered_map<uint64_t, int> coeff_index_;

  std::vector<int> find_primitive_modulus() const {
    if (deg == 1) {
      // x - g for the least primitive root g mod p
      for (int g = 1; g < p; ++g) {
        bool prim = true;
        for (long r : detail::prime_factors(p - 1)) {
          long e = (p - 1) / r, v = 1, b = g;
          while (e) {
            if (e & 1) v = v * b % p;
            b = b * b % p;
            e >>= 1;
          }
          if (v == 1) {
            prim = false;
            break;
          }
        }
        if (prim) return {((-g) % p + p) % p, 1};
      }
      throw std::logic_error("no primitive root found");
    }
    long total = 1;
    for (int i = 0; i < deg; ++i) total *= p;
    for (long low = 0; low < total; ++low) {
      std::vector<int> f(static_cast<size_t>(deg) + 1, 0);
      long v = low;
      for (int i = 0; i < deg; ++i) {
        f[static_cast<size_t>(i)] = static_cast<int>(v % p);
        v /= p;
      }
      f[static_cast<size_t>(deg)] = 1;
      if (is_irreducible(f) && is_primitive(f)) return f;
    }
    throw std::logic_error("no primitive polynomial found");
  }

  bool is_irreducible(const std::vector<int>& f) const {
    // f (monic, degree d) irreducible iff x^{p^d} = x mod f and
    // gcd-free at proper prime-index subfields: x^{p^{d/r}} != x.
    int d = static_cast<int>(f.size()) - 1;
    std::vector<int> x(static_cast<size_t>(d), 0);
    if (d == 1) return true;
    x[1] = 1;
    Int pd = 1;
    for (int i = 0; i < d; ++i) pd *= p;
    if (detail::polymod_pow(x, pd, f, p) != x) return false;
    for (long r : detail::prime_factors(d)) {
      Int e = 1;
      for (int i = 0; i < d / r; ++i) e *= p;
      if (detail::polymod_pow(x, e, f, p) == x) return false;
    }
    return true;
  }

  bool is_primitive(const std::vector<int>& f) const {
    int d = static_cast<int>(f.size()) - 1;
    long qq = 1;
    for (int i = 0; i < d; ++i) qq *= p;
    std::vector<int> x(static_cast<size_t>(d), 0);
    std::vector<int> one_poly(static_cast<size_t>(d), 0);
    x[1 % d] = 1;  // d >= 2 here
    one_poly[0] = 1;
    for (long r : detail::prime_factors(qq - 1))
      if (detail::polymod_pow(x, Int((qq - 1) / r), f, p) == one_poly) return false;
    return true;
  }

  void build_tables() {
    coeffs.assign(static_cast<size_t>(q), std::vector<int>(static_cast<size_t>(deg), 0));
    std::vector<int> cur(static_cast<size_t>(deg), 0);
    std::vector<int> x(static_cast<size_t>(deg), 0);
    if (deg == 1) {
      // gamma = -modulus[0] (the primitive root)
      x[0] = ((-modulus[0]) % p + p) % p;
    } else {
      x[1] = 1;
    }
    cur[0] = 1;
    for (long k = 0; k < q - 1; ++k) {
      coeffs[static_cast<size_t>(k + 1)] = cur;
      cur = detail::polymod_mul(cur, x, modulus, p);
    }
    coeff_index_.reserve(static_cast<size_t>(q) * 2);
    for (long c = 0; c < q; ++c) {
      uint64_t key = 0;
      const std::vector<int>& v = coeffs[static_cast<size_t>(c)];
      for (size_t i = v.size(); i-- > 0;) key = key * static_cast<uint64_t>(p) + static_cast<uint64_t>(v[i]);
      if (!coeff_index_.emplace(key, static_cast<int>(c)).second) throw std::logic_error("generator not primitive");
    }
    zech.assign(static_cast<size_t>(q - 1), 0);
    for (long k = 0; k < q - 1; ++k) {
      std::vector<int> v = coeffs[static_cast<size_t>(k + 1)];
      v[0] = (v[0] + 1) % p;
      zech[static_cast<size_t>(k)] = code_of_coeffs(v);
    }
    scalar_code_.assign(static_cast<size_t>(p), 0);
    for (int t = 1; t < p; ++t) {
      std::vector<int> v(static_cast<size_t>(deg), 0);
      v[0] = t;
      scalar_code_[static_cast<size_t>(t)] = code_of_coeffs(v);
    }
    minus_one_ = scalar(p - 1);
    // sanity: gamma + gamma = 2*gamma
    if (q > 2 && add(2, 2) != mul(scalar(2), 2)) throw std::logic_error("zech table inconsistency");
  }
};

// The tower F_p \subset F = F_{p^k} \subset E = F_{p^{2k}}.
class FieldTower {
 public:
  int p, k;
  long q, qt;  // |F|, |E| = q^2
  FiniteField F, E;
  std::vector<int> embed_f_to_e;  // F code -> E code
  std::vector<int> e_to_f;        // E code -> F code, or -1 if outside F
  std::vector<int> frob;          // E code -> code of x^q
  std::vector<int> trace_tab;     // E code -> E code of x + x^q (lies in F)
  std::vector<int> norm_tab;      // E code -> E code of x * x^q (lies in F)
  int delta;                      // nonzero trace-zero element, least power of the generator

  FieldTower(int p_, int k_) : p(p_), k(k_), F(p_, k_), E(p_, 2 * k_) {
    q = F.q;
    qt = E.q;
    build_embedding();
    frob.resize(static_cast<size_t>(qt));
    trace_tab.resize(static_cast<size_t>(qt));
    norm_tab.resize(static_cast<size_t>(qt));
    for (long c = 0; c < qt; ++c) {
      int f = E.pow(static_cast<int>(c), q);
      frob[static_cast<size_t>(c)] = f;
      trace_tab[static_cast<size_t>(c)] = E.add(static_cast<int>(c), f);
      norm_tab[static_cast<size_t>(c)] = E.mul(static_cast<int>(c), f);
      if (e_to_f[static_cast<size_t>(trace_tab[static_cast<size_t>(c)])] < 0 ||
          e_to_f[static_cast<size_t>(norm_tab[static_cast<size_t>(c)])] < 0)
        throw std::logic_error("trace/norm escaped the base field");
    }
    delta = 0;
    if (p == 2) {
      delta = E.one();
    } else {
      for (long m = 1; m < qt - 1; ++m) {
        int c = 1 + static_cast<int>(m);
        if (c != 0 && trace_tab[static_cast<size_t>(c)] == 0) {
          delta = c;
          break;
        }
      }
    }
    if (delta == 0 || (p != 2 && trace_tab[static_cast<size_t>(delta)] != 0))
      throw std::logic_error("no trace-zero element found");
  }

  int sigma(int ecode) const { return frob[static_cast<size_t>(ecode)]; }
  // results at F-level codes
  int trace_E_F(int ecode) const { return e_to_f[static_cast<size_t>(trace_tab[static_cast<size_t>(ecode)])]; }
  int norm_E_F(int ecode) const { return e_to_f[static_cast<size_t>(norm_tab[static_cast<size_t>(ecode)])]; }
  bool in_F(int ecode) const { return e_to_f[static_cast<size_t>(ecode)] >= 0; }

 private:
  void build_embedding() {
    // image of gamma_F = the least-code root in E of the F modulus
    int root = -1;
    for (long c = 1; c < qt; ++c) {
      int acc = 0, xp = E.one();
      for (size_t i = 0; i < F.modulus.size(); ++i) {
        acc = E.add(acc, E.mul(E.scalar(F.modulus[i]), xp));
        xp = E.mul(xp, static_cast<int>(c));
      }
      if (acc == 0) {
        root = static_cast<int>(c);
        break;
      }
    }
    if (root < 0) throw std::logic_error("base-field modulus has no root in E");
    embed_f_to_e.assign(static_cast<size_t>(q), 0);
    e_to_f.assign(static_cast<size_t>(qt), -1);
    e_to_f[0] = 0;
    int cur = E.one();
    for (long t = 0; t < q - 1; ++t) {
      embed_f_to_e[static_cast<size_t>(1 + t)] = cur;
      e_to_f[static_cast<size_t>(cur)] = 1 + static_cast<int>(t);
      cur = E.mul(cur, root);
    }
    if (cur != E.one()) throw std::logic_error("embedding image has wrong order");
    // verify additive homomorphism
    for (long a = 0; a < q; ++a)
      for (long b = 0; b <= a; ++b)
        if (embed_f_to_e[static_cast<size_t>(F.add(static_cast<int>(a), static_cast<int>(b)))] !=
            E.add(embed_f_to_e[static_cast<size_t>(a)], embed_f_to_e[static_cast<size_t>(b)]))
          throw std::logic_error("embedding is not additive");
  }
};

// Additive character psi(x) = zeta_p^{Tr_{K/F_p}(twist * x)} of a finite field K.
class AdditiveCharacter {
 public:
  const FiniteField* K = nullptr;
  int twist = 0;
  std::vector<int> expo;  // code -> exponent of zeta_p

  AdditiveCharacter() = default;
  AdditiveCharacter(const FiniteField& field, int twist_code) : K(&field), twist(twist_code) {
    if (twist == 0) throw std::invalid_argument("additive character twist must be nonzero");
    expo.resize(static_cast<size_t>(K->q));
    for (long c = 0; c < K->q; ++c) {
      int y = K->mul(twist, static_cast<int>(c));
      // absolute trace sum_{i<deg} y^{p^i}
      int acc = 0, cur = y;
      for (int i = 0; i < K->deg; ++i) {
        acc = K->add(acc, cur);
        cur = K->pow(cur, K->p);
      }
      expo[static_cast<size_t>(c)] = K->as_prime_scalar(acc);
    }
    bool nontrivial = false;
    for (int e : expo) nontrivial |= (e != 0);
    if (!nontrivial) throw std::logic_error("additive character is trivial");
  }

  Cyc value(int code) const { return Cyc::root(expo[static_cast<size_t>(code)], K->p); }
  int exponent(int code) const { return expo[static_cast<size_t>(code)]; }
};

// sigma-mode: twist 1; tau-mode: twist Delta (trace-zero), making the induced
// character of N(E) fixed by tau and trivial on N(F).
inline AdditiveCharacter tower_character(const FieldTower& tw, bool tau_mode) {
  return AdditiveCharacter(tw.E, tau_mode ? tw.delta : tw.E.one());
}

}  // namespace finper
