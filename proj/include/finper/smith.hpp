#pragma once

// Smith normal form of the characteristic matrix xI - g over K[x]:
// the invariant-factor list is a complete conjugacy invariant for GL_n(K).

#include <string>
#include <vector>

#include "finper/matrix.hpp"

namespace finper {
namespace poly {

// polynomial over a finite field: vector of codes, ascending powers, no
// trailing zeros (empty = zero polynomial)
using Poly = std::vector<int>;

inline void trim(Poly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}
inline int degree(const Poly& f) { return static_cast<int>(f.size()) - 1; }  // -1 for zero

inline Poly add(const FiniteField& K, const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < r.size(); ++i)
    r[i] = K.add(i < a.size() ? a[i] : 0, i < b.size() ? b[i] : 0);
  trim(r);
  return r;
}

inline Poly neg(const FiniteField& K, const Poly& a) {
  Poly r = a;
  for (int& c : r) c = K.neg(c);
  return r;
}

inline Poly sub(const FiniteField& K, const Poly& a, const Poly& b) { return add(K, a, neg(K, b)); }

inline Poly mul(const FiniteField& K, const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i])
      for (size_t j = 0; j < b.size(); ++j) r[i + j] = K.add(r[i + j], K.mul(a[i], b[j]));
  trim(r);
  return r;
}

// division with remainder; divisor must be nonzero
inline std::pair<Poly, Poly> divmod(const FiniteField& K, Poly a, const Poly& b) {
  if (b.empty()) throw std::domain_error("polynomial division by zero");
  int db = degree(b);
  int lead_inv = K.inv(b.back());
  Poly q;
  while (degree(a) >= db) {
    int sh = degree(a) - db;
    int c = K.mul(a.back(), lead_inv);
    if (static_cast<int>(q.size()) < sh + 1) q.resize(static_cast<size_t>(sh) + 1, 0);
    q[static_cast<size_t>(sh)] = c;
    for (int i = 0; i <= db; ++i)
      a[static_cast<size_t>(i + sh)] = K.sub(a[static_cast<size_t>(i + sh)], K.mul(c, b[static_cast<size_t>(i)]));
    trim(a);
  }
  trim(q);
  return {q, a};
}

inline bool divides(const FiniteField& K, const Poly& d, const Poly& a) {
  if (a.empty()) return true;
  if (d.empty()) return false;
  return divmod(K, a, d).second.empty();
}

inline Poly monic(const FiniteField& K, Poly f) {
  if (f.empty()) return f;
  int li = K.inv(f.back());
  for (int& c : f) c = K.mul(c, li);
  return f;
}

}  // namespace poly

// invariant factors (monic, each dividing the next, constants omitted) of xI - g
inline std::vector<poly::Poly> invariant_factors(const FiniteField& K, const Mat& g) {
  using poly::Poly;
  int n = g.n;
  std::vector<std::vector<Poly>> M(static_cast<size_t>(n), std::vector<Poly>(static_cast<size_t>(n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Poly f;
      if (i == j)
        f = {K.neg(g.at(i, j)), K.one()};  // x - g_ii
      else if (g.at(i, j) != 0)
        f = {K.neg(g.at(i, j))};
      poly::trim(f);
      M[static_cast<size_t>(i)][static_cast<size_t>(j)] = f;
    }
  std::vector<Poly> diag;
  for (int t = 0; t < n; ++t) {
    for (;;) {
      // locate the minimal-degree nonzero entry in the trailing block
      int bi = -1, bj = -1, bd = 1 << 30;
      for (int i = t; i < n; ++i)
        for (int j = t; j < n; ++j) {
          int d = poly::degree(M[static_cast<size_t>(i)][static_cast<size_t>(j)]);
          if (d >= 0 && d < bd) {
            bd = d;
            bi = i;
            bj = j;
          }
        }
      if (bi < 0) {
        // trailing block is zero
        for (int i = t; i < n; ++i) diag.push_back({});
        t = n;
        break;
      }
      std::swap(M[static_cast<size_t>(t)], M[static_cast<size_t>(bi)]);
      for (int i = 0; i < n; ++i) std::swap(M[static_cast<size_t>(i)][static_cast<size_t>(t)], M[static_cast<size_t>(i)][static_cast<size_t>(bj)]);
      bool dirty = false;
      for (int i = t + 1; i < n; ++i) {
        Poly& e = M[static_cast<size_t>(i)][static_cast<size_t>(t)];
        if (e.empty()) continue;
        auto [q, r] = poly::divmod(K, e, M[static_cast<size_t>(t)][static_cast<size_t>(t)]);
        for (int j = t; j < n; ++j)
          M[static_cast<size_t>(i)][static_cast<size_t>(j)] = poly::sub(
              K, M[static_cast<size_t>(i)][static_cast<size_t>(j)],
              poly::mul(K, q, M[static_cast<size_t>(t)][static_cast<size_t>(j)]));
        if (!r.empty()) dirty = true;
      }
      for (int j = t + 1; j < n; ++j) {
        Poly& e = M[static_cast<size_t>(t)][static_cast<size_t>(j)];
        if (e.empty()) continue;
        auto [q, r] = poly::divmod(K, e, M[static_cast<size_t>(t)][static_cast<size_t>(t)]);
        for (int i = t; i < n; ++i)
          M[static_cast<size_t>(i)][static_cast<size_t>(j)] = poly::sub(
              K, M[static_cast<size_t>(i)][static_cast<size_t>(j)],
              poly::mul(K, q, M[static_cast<size_t>(i)][static_cast<size_t>(t)]));
        if (!r.empty()) dirty = true;
      }
      if (dirty) continue;
      bool off = false;
      for (int i = t + 1; i < n && !off; ++i) off |= !M[static_cast<size_t>(i)][static_cast<size_t>(t)].empty();
      for (int j = t + 1; j < n && !off; ++j) off |= !M[static_cast<size_t>(t)][static_cast<size_t>(j)].empty();
      if (off) continue;
      // divisibility: pivot must divide every remaining entry
      bool fixed = false;
      for (int i = t + 1; i < n && !fixed; ++i)
        for (int j = t + 1; j < n && !fixed; ++j)
          if (!poly::divides(K, M[static_cast<size_t>(t)][static_cast<size_t>(t)], M[static_cast<size_t>(i)][static_cast<size_t>(j)])) {
            // add row i to row t and restart the reduction
            for (int jj = t; jj < n; ++jj)
              M[static_cast<size_t>(t)][static_cast<size_t>(jj)] = poly::add(
                  K, M[static_cast<size_t>(t)][static_cast<size_t>(jj)],
                  M[static_cast<size_t>(i)][static_cast<size_t>(jj)]);
            fixed = true;
          }
      if (fixed) continue;
      diag.push_back(poly::monic(K, M[static_cast<size_t>(t)][static_cast<size_t>(t)]));
      break;
    }
    if (t >= n) break;
  }
  std::vector<poly::Poly> out;
  for (const poly::Poly& f : diag)
    if (poly::degree(f) >= 1) out.push_back(f);
  return out;
}

inline std::string invariant_key(const FiniteField& K, const Mat& g) {
  std::string s;
  for (const poly::Poly& f : invariant_factors(K, g)) {
    for (int c : f) s += std::to_string(c) + ",";
    s += "|";
  }
  return s;
}

}  // namespace finper
