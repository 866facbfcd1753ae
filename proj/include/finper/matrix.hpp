#pragma once

// Small matrices (n <= 3) over a finite field, entries stored as field codes.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "finper/finite_field.hpp"

namespace finper {

struct Mat {
  int n = 0;
  std::array<int16_t, 9> a{};  // row-major, index i*n+j

  int16_t& at(int i, int j) { return a[static_cast<size_t>(i * n + j)]; }
  int16_t at(int i, int j) const { return a[static_cast<size_t>(i * n + j)]; }
  bool operator==(const Mat& o) const { return n == o.n && a == o.a; }
};

inline Mat mat_identity(const FiniteField& K, int n) {
  Mat m;
  m.n = n;
  for (int i = 0; i < n; ++i) m.at(i, i) = static_cast<int16_t>(K.one());
  return m;
}

inline uint64_t mat_encode(const FiniteField& K, const Mat& m) {
  uint64_t v = 0;
  for (int i = 0; i < m.n * m.n; ++i) v = v * static_cast<uint64_t>(K.q) + static_cast<uint64_t>(m.a[static_cast<size_t>(i)]);
  return v;
}

inline Mat mat_decode(const FiniteField& K, int n, uint64_t v) {
  Mat m;
  m.n = n;
  for (int i = n * n; i-- > 0;) {
    m.a[static_cast<size_t>(i)] = static_cast<int16_t>(v % static_cast<uint64_t>(K.q));
    v /= static_cast<uint64_t>(K.q);
  }
  return m;
}

inline Mat mat_mul(const FiniteField& K, const Mat& x, const Mat& y) {
  Mat r;
  r.n = x.n;
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < x.n; ++j) {
      int acc = 0;
      for (int k = 0; k < x.n; ++k) acc = K.add(acc, K.mul(x.at(i, k), y.at(k, j)));
      r.at(i, j) = static_cast<int16_t>(acc);
    }
  return r;
}

inline Mat mat_transpose(const Mat& m) {
  Mat r;
  r.n = m.n;
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) r.at(i, j) = m.at(j, i);
  return r;
}

inline int mat_det(const FiniteField& K, const Mat& m) {
  switch (m.n) {
    case 1:
      return m.at(0, 0);
    case 2:
      return K.sub(K.mul(m.at(0, 0), m.at(1, 1)), K.mul(m.at(0, 1), m.at(1, 0)));
    case 3: {
      int d = 0;
      d = K.add(d, K.mul(m.at(0, 0), K.sub(K.mul(m.at(1, 1), m.at(2, 2)), K.mul(m.at(1, 2), m.at(2, 1)))));
      d = K.sub(d, K.mul(m.at(0, 1), K.sub(K.mul(m.at(1, 0), m.at(2, 2)), K.mul(m.at(1, 2), m.at(2, 0)))));
      d = K.add(d, K.mul(m.at(0, 2), K.sub(K.mul(m.at(1, 0), m.at(2, 1)), K.mul(m.at(1, 1), m.at(2, 0)))));
      return d;
    }
    default:
      throw std::invalid_argument("matrix size must be 1..3");
  }
}

inline Mat mat_inv(const FiniteField& K, const Mat& m) {
  int d = mat_det(K, m);
  if (d == 0) throw std::domain_error("matrix not invertible");
  int di = K.inv(d);
  Mat r;
  r.n = m.n;
  switch (m.n) {
    case 1:
      r.at(0, 0) = static_cast<int16_t>(di);
      break;
    case 2:
      r.at(0, 0) = static_cast<int16_t>(K.mul(di, m.at(1, 1)));
      r.at(0, 1) = static_cast<int16_t>(K.mul(di, K.neg(m.at(0, 1))));
      r.at(1, 0) = static_cast<int16_t>(K.mul(di, K.neg(m.at(1, 0))));
      r.at(1, 1) = static_cast<int16_t>(K.mul(di, m.at(0, 0)));
      break;
    case 3:
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          int i1 = (i + 1) % 3, i2 = (i + 2) % 3, j1 = (j + 1) % 3, j2 = (j + 2) % 3;
          // cofactor expansion with cyclic indices avoids sign bookkeeping
          int c = K.sub(K.mul(m.at(j1, i1), m.at(j2, i2)), K.mul(m.at(j1, i2), m.at(j2, i1)));
          r.at(i, j) = static_cast<int16_t>(K.mul(di, c));
        }
      break;
    default:
      throw std::invalid_argument("matrix size must be 1..3");
  }
  return r;
}

inline Mat mat_frobenius(const FieldTower& tw, const Mat& m) {
  Mat r;
  r.n = m.n;
  for (int i = 0; i < m.n * m.n; ++i) r.a[static_cast<size_t>(i)] = static_cast<int16_t>(tw.sigma(m.a[static_cast<size_t>(i)]));
  return r;
}

inline Mat mat_antidiag_J(const FiniteField& K, int n) {
  Mat j;
  j.n = n;
  for (int i = 0; i < n; ++i) j.at(i, n - 1 - i) = static_cast<int16_t>(K.one());
  return j;
}

// g^tau = J * t(g^{-sigma}) * J^{-1}; for the antidiagonal permutation J, J^{-1} = J.
inline Mat mat_tau(const FieldTower& tw, const Mat& g) {
  const FiniteField& K = tw.E;
  Mat j = mat_antidiag_J(K, g.n);
  Mat t = mat_transpose(mat_frobenius(tw, mat_inv(K, g)));
  return mat_mul(K, mat_mul(K, j, t), j);
}

inline std::string mat_str(const FiniteField& K, const Mat& m) {
  (void)K;
  std::string s = "[";
  for (int i = 0; i < m.n; ++i) {
    s += i ? "; " : "";
    for (int j = 0; j < m.n; ++j) s += (j ? "," : "") + std::to_string(m.at(i, j));
  }
  return s + "]";
}

// --- Bruhat decomposition g = n1 * a * w * n2 ---
// Pivots: per column left to right, the bottom-most row not yet used.
struct Bruhat {
  Mat n1, n2;                 // upper unitriangular
  std::array<int, 3> a{};     // diagonal codes of the torus part, a[i] on row i
  std::array<int, 3> w{};     // permutation, w[i] = column of the 1 in row i
};

inline int perm_length(const std::array<int, 3>& w, int n) {
  int inv = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) inv += (w[static_cast<size_t>(i)] > w[static_cast<size_t>(j)]);
  return inv;
}

inline Bruhat bruhat_decompose(const FiniteField& K, const Mat& g) {
  int n = g.n;
  Mat m = g;
  Bruhat out;
  out.n1 = mat_identity(K, n);
  out.n2 = mat_identity(K, n);
  std::array<bool, 3> used{};
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int i = n - 1; i >= 0; --i)
      if (!used[static_cast<size_t>(i)] && m.at(i, col) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) throw std::domain_error("matrix not invertible in bruhat");
    used[static_cast<size_t>(piv)] = true;
    int pval = m.at(piv, col), pinv = K.inv(pval);
    // clear the column above the pivot: row_i -= c*row_piv (left mult by
    // inverse of an upper unitriangular elementary, accumulated into n1)
    for (int i = 0; i < piv; ++i) {
      int c = K.mul(m.at(i, col), pinv);
      if (c == 0) continue;
      for (int j = 0; j < n; ++j) m.at(i, j) = static_cast<int16_t>(K.sub(m.at(i, j), K.mul(c, m.at(piv, j))));
      // n1 *= (I + c*E_{i,piv})
      for (int j = 0; j < n; ++j)
        out.n1.at(j, piv) = static_cast<int16_t>(K.add(out.n1.at(j, piv), K.mul(out.n1.at(j, i), c)));
    }
    // clear the row right of the pivot: col_j -= c*col_col
    for (int j = col + 1; j < n; ++j) {
      int c = K.mul(m.at(piv, j), pinv);
      if (c == 0) continue;
      for (int i = 0; i < n; ++i) m.at(i, j) = static_cast<int16_t>(K.sub(m.at(i, j), K.mul(m.at(i, col), c)));
      // n2 = (I + c*E_{col,j}) * n2
      for (int k = 0; k < n; ++k)
        out.n2.at(col, k) = static_cast<int16_t>(K.add(out.n2.at(col, k), K.mul(c, out.n2.at(j, k))));
    }
    out.w[static_cast<size_t>(piv)] = col;
    out.a[static_cast<size_t>(piv)] = m.at(piv, col);
  }
  return out;
}

inline Mat bruhat_monomial(const FiniteField& K, const Bruhat& b, int n) {
  (void)K;
  Mat m;
  m.n = n;
  for (int i = 0; i < n; ++i) m.at(i, b.w[static_cast<size_t>(i)]) = static_cast<int16_t>(b.a[static_cast<size_t>(i)]);
  return m;
}

inline Mat bruhat_recompose(const FiniteField& K, const Bruhat& b, int n) {
  return mat_mul(K, mat_mul(K, b.n1, bruhat_monomial(K, b, n)), b.n2);
}

}  // namespace finper
