#pragma once

// Exact arithmetic in the union of cyclotomic fields Q(zeta_m).
// A value is a sparse sum of terms c * zeta^{num/den} where zeta^{x} means
// exp(2*pi*i*x), the exponent num/den is a reduced fraction in [0,1), and c
// is an exact rational.  Zero testing reduces the dense coefficient vector
// modulo the cyclotomic polynomial Phi_L, L = lcm of the term orders.

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "finper/util.hpp"

namespace finper {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline std::string rat_str(const Rat& r) { return r.str(); }

namespace detail {

// Cache of cyclotomic polynomials Phi_n as integer coefficient vectors
// (index = power, size = degree + 1, monic).
inline const std::vector<Int>& cyclotomic_poly(long n) {
  static std::map<long, std::vector<Int>> cache;
  static std::recursive_mutex mu;
  std::lock_guard<std::recursive_mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  // Phi_n = (x^n - 1) / prod_{d | n, d < n} Phi_d, computed by exact division.
  std::vector<Int> num(static_cast<size_t>(n) + 1);
  num[0] = -1;
  num[static_cast<size_t>(n)] = 1;
  for (long d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    const std::vector<Int>& phi_d = cyclotomic_poly(d);
    // num /= phi_d  (monic divisor, division is exact)
    long dn = static_cast<long>(num.size()) - 1;
    long dd = static_cast<long>(phi_d.size()) - 1;
    std::vector<Int> quot(static_cast<size_t>(dn - dd) + 1);
    for (long i = dn; i >= dd; --i) {
      Int c = num[static_cast<size_t>(i)];
      if (c == 0) continue;
      quot[static_cast<size_t>(i - dd)] = c;
      for (long j = 0; j <= dd; ++j) num[static_cast<size_t>(i - dd + j)] -= c * phi_d[static_cast<size_t>(j)];
    }
    for (const Int& c : num)
      if (c != 0) throw std::logic_error("cyclotomic division not exact");
    num = std::move(quot);
  }
  return cache.emplace(n, std::move(num)).first->second;
}

inline long euler_phi(long n) {
  long res = n;
  for (long p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      res -= res / p;
      while (n % p == 0) n /= p;
    }
  }
  if (n > 1) res -= res / n;
  return res;
}

}  // namespace detail

class Cyc {
 public:
  struct Term {
    long num;  // exponent numerator, reduced, 0 <= num < den
    long den;  // exponent denominator (root order)
    Rat c;
    bool operator<(const Term& o) const {
      return den != o.den ? den < o.den : num < o.num;
    }
  };

  Cyc() = default;
  /*implicit*/ Cyc(const Rat& r) {
    if (r != 0) t_.push_back(Term{0, 1, r});
  }
  /*implicit*/ Cyc(long v) : Cyc(Rat(v)) {}

  // c * zeta^{k/m}
  static Cyc root(long k, long m, Rat c = Rat(1)) {
    if (m <= 0) throw std::invalid_argument("root order must be positive");
    Cyc out;
    if (c == 0) return out;
    k %= m;
    if (k < 0) k += m;
    long g = std::gcd(k, m);
    out.t_.push_back(Term{k / g, m / g, std::move(c)});
    return out;
  }

  const std::vector<Term>& terms() const { return t_; }
  bool structurally_zero() const { return t_.empty(); }

  // lcm of term orders (1 for rational values)
  long order() const {
    long l = 1;
    for (const Term& t : t_) l = std::lcm(l, t.den);
    return l;
  }

  Cyc operator-() const {
    Cyc out(*this);
    for (Term& t : out.t_) t.c = -t.c;
    return out;
  }

  Cyc& operator+=(const Cyc& o) {
    if (o.t_.empty()) return *this;
    if (t_.empty()) {
      t_ = o.t_;
      return *this;
    }
    std::vector<Term> merged;
    merged.reserve(t_.size() + o.t_.size());
    size_t i = 0, j = 0;
    while (i < t_.size() || j < o.t_.size()) {
      if (j == o.t_.size() || (i < t_.size() && t_[i] < o.t_[j])) {
        merged.push_back(std::move(t_[i++]));
      } else if (i == t_.size() || o.t_[j] < t_[i]) {
        merged.push_back(o.t_[j++]);
      } else {
        Rat c = t_[i].c + o.t_[j].c;
        if (c != 0) merged.push_back(Term{t_[i].num, t_[i].den, std::move(c)});
        ++i;
        ++j;
      }
    }
    t_ = std::move(merged);
    return *this;
  }
  Cyc operator+(const Cyc& o) const {
    Cyc out(*this);
    out += o;
    return out;
  }
  Cyc operator-(const Cyc& o) const { return *this + (-o); }
  Cyc& operator-=(const Cyc& o) { return *this += (-o); }

  Cyc operator*(const Cyc& o) const {
    Cyc out;
    if (t_.empty() || o.t_.empty()) return out;
    std::map<std::pair<long, long>, Rat> acc;
    for (const Term& a : t_)
      for (const Term& b : o.t_) {
        long m = std::lcm(a.den, b.den);
        long k = (a.num * (m / a.den) + b.num * (m / b.den)) % m;
        long g = std::gcd(k, m);
        acc[{m / g, k / g}] += a.c * b.c;
      }
    for (auto& [key, c] : acc)
      if (c != 0) out.t_.push_back(Term{key.second, key.first, std::move(c)});
    std::sort(out.t_.begin(), out.t_.end());
    return out;
  }
  Cyc& operator*=(const Cyc& o) { return *this = *this * o; }

  Cyc scaled(const Rat& r) const {
    Cyc out;
    if (r == 0) return out;
    out.t_ = t_;
    for (Term& t : out.t_) t.c *= r;
    return out;
  }

  // complex conjugate: zeta^{k/m} -> zeta^{-k/m}
  Cyc conj() const {
    Cyc out;
    out.t_.reserve(t_.size());
    for (const Term& t : t_) out.t_.push_back(Term{t.num == 0 ? 0 : t.den - t.num, t.den, t.c});
    std::sort(out.t_.begin(), out.t_.end());
    return out;
  }

  // Galois twist zeta_m -> zeta_m^s; requires gcd(s, order()) = 1.
  Cyc galois(long s) const {
    long l = order();
    if (std::gcd(((s % l) + l) % l, l) != 1) throw std::invalid_argument("galois twist not coprime to order");
    Cyc out;
    out.t_.reserve(t_.size());
    for (const Term& t : t_) {
      long k = static_cast<long>((static_cast<long long>(t.num) * (((s % t.den) + t.den) % t.den)) % t.den);
      long g = std::gcd(k, t.den);
      out.t_.push_back(Term{k / g, t.den / g, t.c});
    }
    std::sort(out.t_.begin(), out.t_.end());
    // exponents stay distinct under a Galois twist, no merging needed
    return out;
  }

  // Coefficients in the power basis 1, z, ..., z^{phi(L)-1} of Q(zeta_L),
  // L = order() (reduction mod Phi_L).
  std::vector<Rat> reduced_coeffs() const { return reduced_coeffs(order()); }

  // Same, but inside an ambient Q(zeta_L); every term order must divide L.
  std::vector<Rat> reduced_coeffs(long L) const {
    std::vector<Rat> dense(static_cast<size_t>(L));
    for (const Term& t : t_) {
      if (L % t.den != 0) throw std::invalid_argument("ambient order not divisible by term order");
      dense[static_cast<size_t>(t.num * (L / t.den))] += t.c;
    }
    const std::vector<Int>& phi = detail::cyclotomic_poly(L);
    long d = static_cast<long>(phi.size()) - 1;
    for (long i = L - 1; i >= d; --i) {
      Rat c = dense[static_cast<size_t>(i)];
      if (c == 0) continue;
      dense[static_cast<size_t>(i)] = 0;
      for (long j = 0; j < d; ++j)
        if (phi[static_cast<size_t>(j)] != 0) dense[static_cast<size_t>(i - d + j)] -= c * Rat(phi[static_cast<size_t>(j)]);
    }
    dense.resize(static_cast<size_t>(d));
    return dense;
  }

  bool is_zero() const {
    if (t_.empty()) return true;
    if (order() == 1) return false;  // single rational term, coefficient nonzero
    for (const Rat& c : reduced_coeffs())
      if (c != 0) return false;
    return true;
  }

  bool operator==(const Cyc& o) const { return (*this - o).is_zero(); }
  bool operator!=(const Cyc& o) const { return !(*this == o); }

  bool is_rational(Rat* out = nullptr) const {
    if (t_.empty()) {
      if (out) *out = 0;
      return true;
    }
    long L = order();
    if (L == 1) {
      if (out) *out = t_[0].c;
      return true;
    }
    std::vector<Rat> red = reduced_coeffs();
    for (size_t i = 1; i < red.size(); ++i)
      if (red[i] != 0) return false;
    if (out) *out = red[0];
    return true;
  }

  Rat as_rational() const {
    Rat r;
    if (!is_rational(&r)) throw std::domain_error("value is not rational: " + str());
    return r;
  }

  // Multiplicative inverse via the product of Galois conjugates.
  Cyc inverse() const {
    long L = order();
    if (L == 1) {
      if (t_.empty()) throw std::domain_error("division by zero");
      return Cyc(Rat(1) / t_[0].c);
    }
    Cyc prod(Rat(1));
    for (long s = 2; s < L; ++s)
      if (std::gcd(s, L) == 1) prod *= galois(s);
    Rat norm = (*this * prod).as_rational();
    if (norm == 0) throw std::domain_error("division by zero");
    return prod.scaled(Rat(1) / norm);
  }

  std::complex<double> to_complex() const {
    std::complex<double> z(0.0, 0.0);
    for (const Term& t : t_) {
      double angle = 2.0 * 3.14159265358979323846 * static_cast<double>(t.num) / static_cast<double>(t.den);
      z += static_cast<double>(t.c) * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    return z;
  }

  std::string str() const {
    if (t_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const Term& t : t_) {
      if (!first) os << " + ";
      first = false;
      os << rat_str(t.c);
      if (t.den != 1) os << "*z(" << t.num << "/" << t.den << ")";
    }
    return os.str();
  }

  uint64_t hash_in(long L) const {
    std::vector<Rat> red = reduced_coeffs(L);
    uint64_t h = 0xcbf29ce484222325ULL;
    for (const Rat& c : red) {
      std::string s = rat_str(c);
      h = fnv1a(s.data(), s.size(), h);
      h = fnv1a(";", 1, h);
    }
    return h;
  }

 private:
  std::vector<Term> t_;
};

inline Cyc operator*(const Rat& r, const Cyc& v) { return v.scaled(r); }

}  // namespace finper
