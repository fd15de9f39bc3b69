#include "kpbbm/linalg.hpp"

#include <algorithm>
#include <stdexcept>

namespace kpbbm {

namespace {

void axpy(SparseRow& row, const Rational& f, const SparseRow& other) {
  for (const auto& [c, v] : other) {
    auto [it, inserted] = row.try_emplace(c, -f * v);
    if (!inserted) {
      it->second -= f * v;
      if (it->second == 0) row.erase(it);
    }
  }
}

SparseRow to_sparse(const RVec& v) {
  SparseRow r;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] != 0) r.emplace(static_cast<int>(i), v[i]);
  return r;
}

}  // namespace

SparseRow Echelon::reduce(SparseRow row) const {
  for (auto it = row.begin(); it != row.end();) {
    auto p = rows_.find(it->first);
    if (p == rows_.end()) {
      ++it;
      continue;
    }
    Rational f = it->second;
    int col = it->first;
    axpy(row, f, p->second);
    it = row.upper_bound(col);
  }
  return row;
}

bool Echelon::add(SparseRow row) {
  row = reduce(std::move(row));
  if (row.empty()) return false;
  int pivot = row.begin()->first;
  Rational inv = Rational(1) / row.begin()->second;
  for (auto& [c, v] : row) v *= inv;
  for (auto& [pc, r] : rows_) {
    auto it = r.find(pivot);
    if (it == r.end()) continue;
    Rational f = it->second;
    axpy(r, f, row);
  }
  rows_.emplace(pivot, std::move(row));
  return true;
}

bool Echelon::add(const RVec& row) { return add(to_sparse(row)); }

std::vector<RVec> Echelon::nullspace() const {
  std::vector<RVec> out;
  for (int f = 0; f < ncols_; ++f) {
    if (rows_.count(f)) continue;
    RVec v(static_cast<std::size_t>(ncols_), Rational(0));
    v[static_cast<std::size_t>(f)] = 1;
    for (const auto& [p, r] : rows_) {
      auto it = r.find(f);
      if (it != r.end()) v[static_cast<std::size_t>(p)] = -it->second;
    }
    out.push_back(std::move(v));
  }
  return out;
}

int rank(const RMat& m) {
  if (m.empty()) return 0;
  Echelon e(static_cast<int>(m[0].size()));
  for (const auto& r : m) e.add(r);
  return e.rank();
}

std::vector<RVec> nullspace(const RMat& m, int ncols) {
  Echelon e(ncols);
  for (const auto& r : m) e.add(r);
  return e.nullspace();
}

std::optional<RVec> solve(const RMat& a, const RVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("solve: dimension mismatch");
  int n = a.empty() ? 0 : static_cast<int>(a[0].size());
  Echelon e(n + 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    RVec row = a[i];
    row.push_back(b[i]);
    e.add(row);
  }
  if (e.rows().count(n)) return std::nullopt;
  RVec x(static_cast<std::size_t>(n), Rational(0));
  for (const auto& [p, r] : e.rows()) {
    auto it = r.find(n);
    if (it != r.end()) x[static_cast<std::size_t>(p)] = it->second;
  }
  return x;
}

RMat multiply(const RMat& a, const RMat& b) {
  std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  RMat c(n, RVec(m, Rational(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l) {
      if (a[i][l] == 0) continue;
      for (std::size_t j = 0; j < m; ++j) c[i][j] += a[i][l] * b[l][j];
    }
  return c;
}

RMat identity(int n) {
  RMat m(static_cast<std::size_t>(n), RVec(static_cast<std::size_t>(n), Rational(0)));
  for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
  return m;
}

std::optional<RMat> inverse(const RMat& a) {
  int n = static_cast<int>(a.size());
  RMat inv(a.size(), RVec(a.size(), Rational(0)));
  for (int j = 0; j < n; ++j) {
    RVec e(a.size(), Rational(0));
    e[static_cast<std::size_t>(j)] = 1;
    auto col = solve(a, e);
    if (!col) return std::nullopt;
    for (int i = 0; i < n; ++i) inv[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = (*col)[static_cast<std::size_t>(i)];
  }
  if (multiply(a, inv) != identity(n)) return std::nullopt;
  return inv;
}

namespace {

std::vector<mpz_class> positive_divisors(mpz_class n) {
  if (n < 0) n = -n;
  std::vector<std::pair<mpz_class, int>> factors;
  mpz_class p = 2;
  while (p * p <= n) {
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e) factors.emplace_back(p, e);
    p += p == 2 ? 1 : 2;
  }
  if (n > 1) factors.emplace_back(n, 1);
  std::vector<mpz_class> divs{1};
  for (const auto& [q, e] : factors) {
    std::size_t base = divs.size();
    mpz_class pw = 1;
    for (int i = 1; i <= e; ++i) {
      pw *= q;
      for (std::size_t j = 0; j < base; ++j) divs.push_back(divs[j] * pw);
    }
  }
  return divs;
}

Rational eval_poly(const RVec& c, const Rational& z) {
  Rational v(0);
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * z + *it;
  return v;
}

// Divides by (z - r); c must vanish at r.
RVec deflate(const RVec& c, const Rational& r) {
  RVec q(c.size() - 1, Rational(0));
  Rational carry(0);
  for (std::size_t i = c.size() - 1; i >= 1; --i) {
    carry = c[i] + carry * r;
    q[i - 1] = carry;
  }
  return q;
}

}  // namespace

std::vector<std::pair<Rational, int>> rational_roots(RVec c) {
  while (!c.empty() && c.back() == 0) c.pop_back();
  if (c.empty()) throw std::invalid_argument("rational_roots of the zero polynomial");
  std::vector<std::pair<Rational, int>> roots;
  int zero_mult = 0;
  while (c.size() > 1 && c.front() == 0) {
    c.erase(c.begin());
    ++zero_mult;
  }
  if (zero_mult) roots.emplace_back(Rational(0), zero_mult);
  if (c.size() <= 1) return roots;
  mpz_class den_lcm = 1;
  for (const auto& q : c) mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), q.get_den_mpz_t());
  mpz_class lead = mpz_class(c.back() * den_lcm), cons = mpz_class(c.front() * den_lcm);
  auto ps = positive_divisors(cons), qs = positive_divisors(lead);
  std::vector<Rational> cand;
  for (const auto& pp : ps)
    for (const auto& qq : qs)
      for (int s : {1, -1}) {
        Rational r(s * pp, qq);
        r.canonicalize();
        cand.push_back(r);
      }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  for (const auto& r : cand) {
    int m = 0;
    while (c.size() > 1 && eval_poly(c, r) == 0) {
      c = deflate(c, r);
      ++m;
    }
    if (m) roots.emplace_back(r, m);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace kpbbm
