#pragma once

// Enumerated matrix groups: full GL_n, standalone mirabolic P_n, and
// subgroups, with conjugacy-class data.  Classes in full GL come from the
// Smith-form invariant of xI - g (complete invariant); classes elsewhere come
// from a conjugation BFS under an incrementally found generating set.

#include <cstdint>
#include <numeric>
#include <queue>
#include <string>
#include <unordered_map>
#include <vector>

#include "finper/matrix.hpp"
#include "finper/smith.hpp"
#include "finper/util.hpp"

namespace finper {

constexpr long kDefaultBudget = 1L << 21;

class Group {
 public:
  const FiniteField* K = nullptr;
  int n = 0;
  std::string name;
  std::vector<Mat> elems;  // sorted by mat_encode
  std::vector<int32_t> inv_of;
  std::vector<int32_t> class_of;
  std::vector<int32_t> class_rep;  // least element index of each class
  std::vector<long> class_size;
  std::vector<int32_t> inv_class;
  std::vector<long> class_order;                 // multiplicative order of the representative
  std::vector<std::vector<int32_t>> power_class; // class -> class of rep^t, t in [0, order)
  long exponent = 1;
  int32_t id_idx = -1;
  int32_t id_class = -1;

  long size() const { return static_cast<long>(elems.size()); }
  long num_classes() const { return static_cast<long>(class_rep.size()); }

  int32_t idx(const Mat& m) const {
    auto it = index_.find(mat_encode(*K, m));
    if (it == index_.end()) throw std::domain_error("element not in group " + name);
    return it->second;
  }
  int32_t idx_or_neg(const Mat& m) const {
    auto it = index_.find(mat_encode(*K, m));
    return it == index_.end() ? -1 : it->second;
  }
  bool contains(const Mat& m) const { return index_.find(mat_encode(*K, m)) != index_.end(); }
  int32_t mul(int32_t a, int32_t b) const {
    return idx(mat_mul(*K, elems[static_cast<size_t>(a)], elems[static_cast<size_t>(b)]));
  }
  long centralizer_order(int32_t cls) const { return size() / class_size[static_cast<size_t>(cls)]; }

  // --- builders ---

  static Group general_linear(const FiniteField& K, int n, long budget = kDefaultBudget) {
    if (n < 1 || n > 3) throw std::invalid_argument("n must be 1..3");
    Group g;
    g.K = &K;
    g.n = n;
    g.name = "GL_" + std::to_string(n) + "(F_" + std::to_string(K.q) + ")";
    long order = closed_form_gl_order(K.q, n);
    if (order > budget) throw std::invalid_argument("enumeration budget exceeded for " + g.name);
    uint64_t total = 1;
    for (int i = 0; i < n * n; ++i) total *= static_cast<uint64_t>(K.q);
    g.elems.reserve(static_cast<size_t>(order));
    for (uint64_t v = 0; v < total; ++v) {
      Mat m = mat_decode(K, n, v);
      if (mat_det(K, m) != 0) g.elems.push_back(m);
    }
    if (static_cast<long>(g.elems.size()) != order) throw std::logic_error("GL order mismatch vs closed form");
    g.finish(true);
    return g;
  }

  // mirabolic P_n(K) = matrices with last row (0,...,0,1), built standalone
  static Group mirabolic(const FiniteField& K, int n, long budget = kDefaultBudget) {
    if (n < 2 || n > 3) throw std::invalid_argument("mirabolic n must be 2..3");
    Group g;
    g.K = &K;
    g.n = n;
    g.name = "P_" + std::to_string(n) + "(F_" + std::to_string(K.q) + ")";
    long glo = closed_form_gl_order(K.q, n - 1);
    long cols = 1;
    for (int i = 0; i < n - 1; ++i) cols *= K.q;
    if (glo * cols > budget) throw std::invalid_argument("enumeration budget exceeded for " + g.name);
    int m1 = n - 1;
    uint64_t atotal = 1;
    for (int i = 0; i < m1 * m1; ++i) atotal *= static_cast<uint64_t>(K.q);
    for (uint64_t v = 0; v < atotal; ++v) {
      Mat a = mat_decode(K, m1, v);
      if (mat_det(K, a) == 0) continue;
      for (long x = 0; x < cols; ++x) {
        Mat m;
        m.n = n;
        for (int i = 0; i < m1; ++i)
          for (int j = 0; j < m1; ++j) m.at(i, j) = a.at(i, j);
        long xv = x;
        for (int i = 0; i < m1; ++i) {
          m.at(i, n - 1) = static_cast<int16_t>(xv % K.q);
          xv /= K.q;
        }
        m.at(n - 1, n - 1) = static_cast<int16_t>(K.one());
        g.elems.push_back(m);
      }
    }
    g.finish(false);
    return g;
  }

  // subgroup of a parent, from parent element indices; classes via BFS
  static Group subgroup(const Group& parent, std::vector<int32_t> parent_indices, const std::string& name) {
    Group g;
    g.K = parent.K;
    g.n = parent.n;
    g.name = name;
    g.elems.reserve(parent_indices.size());
    for (int32_t pi : parent_indices) g.elems.push_back(parent.elems[static_cast<size_t>(pi)]);
    g.finish(false);
    g.to_parent_.resize(g.elems.size());
    for (size_t i = 0; i < g.elems.size(); ++i) g.to_parent_[i] = parent.idx(g.elems[i]);
    return g;
  }

  const std::vector<int32_t>& to_parent() const { return to_parent_; }
  const std::vector<int32_t>& generators() const { return gens_; }

  static long closed_form_gl_order(long q, int n) {
    long o = 1;
    // q^{n(n-1)/2} * prod (q^i - 1)
    for (int i = 0; i < n * (n - 1) / 2; ++i) o *= q;
    long qi = 1;
    for (int i = 1; i <= n; ++i) {
      qi *= q;
      o *= (qi - 1);
    }
    return o;
  }

 private:
  std::unordered_map<uint64_t, int32_t> index_;
  std::vector<int32_t> to_parent_;
  std::vector<int32_t> gens_;

  void finish(bool classes_by_invariant) {
    std::sort(elems.begin(), elems.end(), [&](const Mat& x, const Mat& y) {
      return mat_encode(*K, x) < mat_encode(*K, y);
    });
    index_.reserve(elems.size() * 2);
    for (size_t i = 0; i < elems.size(); ++i) {
      if (!index_.emplace(mat_encode(*K, elems[i]), static_cast<int32_t>(i)).second)
        throw std::logic_error("duplicate element in group " + name);
    }
    id_idx = idx(mat_identity(*K, n));
    inv_of.resize(elems.size());
    for (size_t i = 0; i < elems.size(); ++i) inv_of[i] = idx(mat_inv(*K, elems[i]));
    if (classes_by_invariant)
      classes_from_invariant();
    else
      classes_from_bfs();
    finish_class_data();
  }

  void classes_from_invariant() {
    std::unordered_map<std::string, int32_t> key_to_class;
    class_of.resize(elems.size());
    for (size_t i = 0; i < elems.size(); ++i) {
      std::string key = invariant_key(*K, elems[i]);
      auto [it, fresh] = key_to_class.emplace(key, static_cast<int32_t>(class_rep.size()));
      if (fresh) {
        class_rep.push_back(static_cast<int32_t>(i));
        class_size.push_back(0);
      }
      class_of[i] = it->second;
      class_size[static_cast<size_t>(it->second)]++;
    }
  }

  void find_generators() {
    std::vector<char> closed(elems.size(), 0);
    closed[static_cast<size_t>(id_idx)] = 1;
    long count = 1;
    for (size_t e = 0; e < elems.size() && count < static_cast<long>(elems.size()); ++e) {
      if (closed[e]) continue;
      gens_.push_back(static_cast<int32_t>(e));
      // closure of <gens> by BFS from the identity
      std::fill(closed.begin(), closed.end(), 0);
      closed[static_cast<size_t>(id_idx)] = 1;
      count = 1;
      std::vector<int32_t> stack{id_idx};
      while (!stack.empty()) {
        int32_t x = stack.back();
        stack.pop_back();
        for (int32_t gidx : gens_) {
          int32_t y = mul(x, gidx);
          if (!closed[static_cast<size_t>(y)]) {
            closed[static_cast<size_t>(y)] = 1;
            ++count;
            stack.push_back(y);
          }
        }
      }
    }
    if (count != static_cast<long>(elems.size())) throw std::logic_error("generator search failed for " + name);
  }

  void classes_from_bfs() {
    find_generators();
    std::vector<int32_t> gen_inv;
    for (int32_t gidx : gens_) gen_inv.push_back(inv_of[static_cast<size_t>(gidx)]);
    class_of.assign(elems.size(), -1);
    for (size_t e = 0; e < elems.size(); ++e) {
      if (class_of[e] >= 0) continue;
      int32_t cid = static_cast<int32_t>(class_rep.size());
      class_rep.push_back(static_cast<int32_t>(e));
      class_size.push_back(0);
      std::vector<int32_t> stack{static_cast<int32_t>(e)};
      class_of[e] = cid;
      long sz = 1;
      while (!stack.empty()) {
        int32_t x = stack.back();
        stack.pop_back();
        for (size_t t = 0; t < gens_.size(); ++t) {
          int32_t y = mul(gen_inv[t], mul(x, gens_[t]));
          if (class_of[static_cast<size_t>(y)] < 0) {
            class_of[static_cast<size_t>(y)] = cid;
            ++sz;
            stack.push_back(y);
          }
        }
      }
      class_size[static_cast<size_t>(cid)] = sz;
    }
  }

  void finish_class_data() {
    long total = 0;
    for (long s : class_size) total += s;
    if (total != size()) throw std::logic_error("class sizes do not sum to |G|");
    id_class = class_of[static_cast<size_t>(id_idx)];
    inv_class.resize(class_rep.size());
    class_order.resize(class_rep.size());
    power_class.resize(class_rep.size());
    exponent = 1;
    for (size_t c = 0; c < class_rep.size(); ++c) {
      int32_t rep = class_rep[c];
      inv_class[c] = class_of[static_cast<size_t>(inv_of[static_cast<size_t>(rep)])];
      std::vector<int32_t>& pc = power_class[c];
      int32_t cur = id_idx;
      for (;;) {
        pc.push_back(class_of[static_cast<size_t>(cur)]);
        cur = mul(cur, rep);
        if (cur == id_idx) break;
      }
      class_order[c] = static_cast<long>(pc.size());
      exponent = std::lcm(exponent, class_order[c]);
    }
  }
};

// index set of a subgroup (or any subset) inside a parent group
struct Subset {
  std::vector<int32_t> idx;
  std::vector<char> member;

  static Subset from_predicate(const Group& g, const std::function<bool(const Mat&)>& pred) {
    Subset s;
    s.member.assign(static_cast<size_t>(g.size()), 0);
    for (long i = 0; i < g.size(); ++i)
      if (pred(g.elems[static_cast<size_t>(i)])) {
        s.idx.push_back(static_cast<int32_t>(i));
        s.member[static_cast<size_t>(i)] = 1;
      }
    return s;
  }
  long size() const { return static_cast<long>(idx.size()); }
  bool contains(int32_t i) const { return member[static_cast<size_t>(i)] != 0; }
};

}  // namespace finper
