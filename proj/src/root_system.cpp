#include "convexdl/root_system.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <numeric>
#include <set>
#include <sstream>

namespace convexdl {

namespace {

// Gram matrix (twice the inner product, integer) of one irreducible type in Bourbaki numbering.
IntMatrix gram_for(char series, int n) {
  IntMatrix g(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), 0));
  auto link = [&](int i, int j, int v) {
    g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
    g[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = v;
  };
  auto diag = [&](int i, int v) { g[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = v; };
  auto bad = [&]() { return InvalidCartan(std::string("unknown type ") + series + std::to_string(n)); };
  switch (series) {
    case 'A':
      if (n < 1) throw bad();
      for (int i = 0; i < n; ++i) diag(i, 2);
      for (int i = 0; i + 1 < n; ++i) link(i, i + 1, -1);
      break;
    case 'B':
      if (n < 2) throw bad();
      for (int i = 0; i < n; ++i) diag(i, i + 1 < n ? 4 : 2);
      for (int i = 0; i + 1 < n; ++i) link(i, i + 1, -2);
      break;
    case 'C':
      if (n < 2) throw bad();
      for (int i = 0; i < n; ++i) diag(i, i + 1 < n ? 2 : 4);
      for (int i = 0; i + 2 < n; ++i) link(i, i + 1, -1);
      link(n - 2, n - 1, -2);
      break;
    case 'D':
      if (n < 3) throw bad();
      for (int i = 0; i < n; ++i) diag(i, 2);
      for (int i = 0; i + 2 < n; ++i) link(i, i + 1, -1);
      link(n - 3, n - 1, -1);
      break;
    case 'E':
      if (n < 6 || n > 8) throw bad();
      for (int i = 0; i < n; ++i) diag(i, 2);
      link(0, 2, -1);
      link(1, 3, -1);
      for (int i = 2; i + 1 < n; ++i) link(i, i + 1, -1);
      break;
    case 'F':
      if (n != 4) throw bad();
      diag(0, 4), diag(1, 4), diag(2, 2), diag(3, 2);
      link(0, 1, -2), link(1, 2, -2), link(2, 3, -1);
      break;
    case 'G':
      if (n != 2) throw bad();
      diag(0, 2), diag(1, 6);
      link(0, 1, -3);
      break;
    default:
      throw bad();
  }
  return g;
}

std::int64_t det_bareiss(std::vector<std::vector<std::int64_t>> a) {
  const std::size_t n = a.size();
  std::int64_t prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t piv = k + 1;
      while (piv < n && a[piv][k] == 0) ++piv;
      if (piv == n) return 0;
      std::swap(a[k], a[piv]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

}  // namespace

int rational_rank(IntMatrix m) {
  if (m.empty()) return 0;
  std::vector<std::vector<std::int64_t>> a(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) a[i].assign(m[i].begin(), m[i].end());
  const std::size_t rows = a.size(), cols = a[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && a[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[r], a[piv]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      if (a[i][c] == 0) continue;
      const std::int64_t f = a[i][c], p = a[r][c];
      std::int64_t g = 0;
      for (std::size_t j = c; j < cols; ++j) {
        a[i][j] = a[i][j] * p - a[r][j] * f;
        g = std::gcd(g, a[i][j]);
      }
      if (g > 1)
        for (std::size_t j = c; j < cols; ++j) a[i][j] /= g;
    }
    ++r;
  }
  return static_cast<int>(r);
}

CartanDatum cartan_from_matrix(const IntMatrix& m, std::string series) {
  const int n = static_cast<int>(m.size());
  if (n == 0) throw InvalidCartan("cartan matrix is empty");
  if (n > kMaxRank) throw InvalidCartan("rank " + std::to_string(n) + " exceeds the cap of " + std::to_string(kMaxRank));
  for (const auto& row : m)
    if (static_cast<int>(row.size()) != n) throw InvalidCartan("cartan matrix is not square");
  auto at = [&](int i, int j) { return m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; };
  for (int i = 0; i < n; ++i) {
    if (at(i, i) != 2) throw InvalidCartan("diagonal entry " + std::to_string(i + 1) + " is not 2");
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (at(i, j) > 0) throw InvalidCartan("off-diagonal entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") is positive");
      if ((at(i, j) == 0) != (at(j, i) == 0))
        throw InvalidCartan("zero pattern is not symmetric at (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
    }
  }
  // Symmetrizer: a_ij d_j = a_ji d_i, solved per connected component over rationals (num/den).
  std::vector<std::int64_t> num(static_cast<std::size_t>(n), 0), den(static_cast<std::size_t>(n), 1);
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  int ncomp = 0;
  for (int s = 0; s < n; ++s) {
    if (comp[static_cast<std::size_t>(s)] >= 0) continue;
    std::deque<int> q{s};
    comp[static_cast<std::size_t>(s)] = ncomp;
    num[static_cast<std::size_t>(s)] = 1;
    while (!q.empty()) {
      int i = q.front();
      q.pop_front();
      for (int j = 0; j < n; ++j) {
        if (j == i || at(i, j) == 0 || comp[static_cast<std::size_t>(j)] >= 0) continue;
        comp[static_cast<std::size_t>(j)] = ncomp;
        // d_j = a_ji d_i / a_ij
        std::int64_t nn = num[static_cast<std::size_t>(i)] * at(j, i), dd = den[static_cast<std::size_t>(i)] * at(i, j);
        if (dd < 0) nn = -nn, dd = -dd;
        std::int64_t g = std::gcd(nn, dd);
        num[static_cast<std::size_t>(j)] = nn / g;
        den[static_cast<std::size_t>(j)] = dd / g;
        q.push_back(j);
      }
    }
    ++ncomp;
  }
  std::vector<int> d(static_cast<std::size_t>(n));
  for (int c = 0; c < ncomp; ++c) {
    std::int64_t l = 1;
    for (int i = 0; i < n; ++i)
      if (comp[static_cast<std::size_t>(i)] == c) l = std::lcm(l, den[static_cast<std::size_t>(i)]);
    std::int64_t g = 0;
    for (int i = 0; i < n; ++i)
      if (comp[static_cast<std::size_t>(i)] == c) g = std::gcd(g, num[static_cast<std::size_t>(i)] * (l / den[static_cast<std::size_t>(i)]));
    for (int i = 0; i < n; ++i)
      if (comp[static_cast<std::size_t>(i)] == c)
        d[static_cast<std::size_t>(i)] = static_cast<int>(num[static_cast<std::size_t>(i)] * (l / den[static_cast<std::size_t>(i)]) / g);
  }
  for (int i = 0; i < n; ++i) {
    if (d[static_cast<std::size_t>(i)] <= 0) throw InvalidCartan("matrix is not symmetrizable with a positive diagonal");
    for (int j = 0; j < n; ++j)
      if (static_cast<std::int64_t>(at(i, j)) * d[static_cast<std::size_t>(j)] != static_cast<std::int64_t>(at(j, i)) * d[static_cast<std::size_t>(i)])
        throw InvalidCartan("matrix is not symmetrizable");
  }
  for (int k = 1; k <= n; ++k) {
    std::vector<std::vector<std::int64_t>> s(static_cast<std::size_t>(k), std::vector<std::int64_t>(static_cast<std::size_t>(k)));
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) s[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = static_cast<std::int64_t>(at(i, j)) * d[static_cast<std::size_t>(j)];
    if (det_bareiss(s) <= 0) throw InvalidCartan("symmetrized matrix is not positive definite (leading minor " + std::to_string(k) + ")");
  }
  return CartanDatum{std::move(series), n, m, std::move(d)};
}

CartanDatum cartan_from_code(const std::string& code) {
  std::vector<std::pair<char, int>> parts;
  std::size_t pos = 0;
  while (pos < code.size()) {
    char s = static_cast<char>(std::toupper(static_cast<unsigned char>(code[pos])));
    std::size_t end = pos + 1;
    while (end < code.size() && std::isdigit(static_cast<unsigned char>(code[end]))) ++end;
    if (end == pos + 1) throw InvalidCartan("malformed Cartan code '" + code + "'");
    parts.emplace_back(s, std::stoi(code.substr(pos + 1, end - pos - 1)));
    pos = end;
    if (pos < code.size()) {
      if (code[pos] != 'x' && code[pos] != 'X') throw InvalidCartan("malformed Cartan code '" + code + "'");
      ++pos;
      if (pos == code.size()) throw InvalidCartan("malformed Cartan code '" + code + "'");
    }
  }
  if (parts.empty()) throw InvalidCartan("empty Cartan code");
  int total = 0;
  for (auto& [s, n] : parts) total += n;
  if (total > kMaxRank) throw InvalidCartan("rank " + std::to_string(total) + " exceeds the cap of " + std::to_string(kMaxRank));
  IntMatrix g(static_cast<std::size_t>(total), std::vector<int>(static_cast<std::size_t>(total), 0));
  int off = 0;
  for (auto& [s, n] : parts) {
    IntMatrix b = gram_for(s, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g[static_cast<std::size_t>(off + i)][static_cast<std::size_t>(off + j)] = b[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    off += n;
  }
  IntMatrix a(static_cast<std::size_t>(total), std::vector<int>(static_cast<std::size_t>(total)));
  for (int i = 0; i < total; ++i)
    for (int j = 0; j < total; ++j)
      a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 2 * g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] / g[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)];
  std::string series;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (k) series += "x";
    series += parts[k].first + std::to_string(parts[k].second);
  }
  return cartan_from_matrix(a, series);
}

bool Root::positive() const {
  return std::any_of(coeffs.begin(), coeffs.end(), [](int c) { return c > 0; });
}

RootSystem::RootSystem(CartanDatum datum) : datum_(std::move(datum)) {
  const int l = datum_.rank;
  const auto& a = datum_.cartan_matrix;
  auto reflect_vec = [&](const std::vector<int>& v, int i) {
    int p = 0;
    for (int j = 0; j < l; ++j) p += v[static_cast<std::size_t>(j)] * a[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    std::vector<int> w = v;
    w[static_cast<std::size_t>(i)] -= p;
    return w;
  };
  std::set<std::vector<int>> seen;
  std::deque<std::vector<int>> queue;
  for (int i = 0; i < l; ++i) {
    std::vector<int> e(static_cast<std::size_t>(l), 0);
    e[static_cast<std::size_t>(i)] = 1;
    seen.insert(e);
    queue.push_back(e);
  }
  while (!queue.empty()) {
    auto v = queue.front();
    queue.pop_front();
    for (int i = 0; i < l; ++i) {
      auto w = reflect_vec(v, i);
      if (seen.insert(w).second) queue.push_back(std::move(w));
    }
  }
  std::vector<std::vector<int>> pos;
  for (const auto& v : seen)
    if (std::any_of(v.begin(), v.end(), [](int c) { return c > 0; })) pos.push_back(v);
  auto ht = [](const std::vector<int>& v) { return std::accumulate(v.begin(), v.end(), 0); };
  std::sort(pos.begin(), pos.end(), [&](const auto& x, const auto& y) {
    int hx = ht(x), hy = ht(y);
    if (hx != hy) return hx < hy;
    return x > y;
  });
  npos_ = static_cast<int>(pos.size());
  for (const auto& v : pos) roots_.push_back(Root{v});
  for (const auto& v : pos) {
    std::vector<int> nv(v.size());
    std::transform(v.begin(), v.end(), nv.begin(), [](int c) { return -c; });
    roots_.push_back(Root{nv});
  }
  for (const auto& r : roots_) heights_.push_back(ht(r.coeffs));
  for (int i = 0; i < size(); ++i) sorted_lookup_.emplace_back(roots_[static_cast<std::size_t>(i)].coeffs, i);
  std::sort(sorted_lookup_.begin(), sorted_lookup_.end());

  const int n = size();
  add_.assign(static_cast<std::size_t>(n * n), -1);
  inner_.assign(static_cast<std::size_t>(n * n), 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::vector<int> s(static_cast<std::size_t>(l));
      for (int k = 0; k < l; ++k) s[static_cast<std::size_t>(k)] = coeffs(i)[static_cast<std::size_t>(k)] + coeffs(j)[static_cast<std::size_t>(k)];
      add_[static_cast<std::size_t>(i * n + j)] = find(s);
      inner_[static_cast<std::size_t>(i * n + j)] = vector_inner(coeffs(i), coeffs(j));
    }
  for (int i = 0; i < l; ++i) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) perm[static_cast<std::size_t>(r)] = find(reflect_vec(coeffs(r), i));
    simple_refl_.push_back(std::move(perm));
  }
}

int RootSystem::vector_inner(const std::vector<int>& u, const std::vector<int>& v) const {
  const auto& a = datum_.cartan_matrix;
  const auto& d = datum_.symmetrizer;
  int s = 0;
  for (int i = 0; i < rank(); ++i) {
    if (u[static_cast<std::size_t>(i)] == 0) continue;
    for (int j = 0; j < rank(); ++j)
      s += u[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)] * a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * d[static_cast<std::size_t>(j)];
  }
  return s;
}

int RootSystem::find(const std::vector<int>& c) const {
  auto it = std::lower_bound(sorted_lookup_.begin(), sorted_lookup_.end(), std::make_pair(c, -1));
  if (it != sorted_lookup_.end() && it->first == c) return it->second;
  return -1;
}

int RootSystem::index_of(const Root& r) const {
  if (static_cast<int>(r.coeffs.size()) != rank()) throw std::invalid_argument("root belongs to a system of a different rank");
  int i = find(r.coeffs);
  if (i < 0) throw std::invalid_argument("vector is not a root of this system");
  return i;
}

int RootSystem::reflect(int a, int b) const {
  const int p = pairing(a, b);
  std::vector<int> v = coeffs(a);
  for (int k = 0; k < rank(); ++k) v[static_cast<std::size_t>(k)] -= p * coeffs(b)[static_cast<std::size_t>(k)];
  return find(v);
}

RootSystemPtr build_root_system(const CartanDatum& datum) { return std::make_shared<const RootSystem>(datum); }

std::optional<Root> add_roots(const RootSystem& rs, const Root& a, const Root& b) {
  int s = rs.add(rs.index_of(a), rs.index_of(b));
  if (s < 0) return std::nullopt;
  return rs.root(s);
}

int cartan_pairing(const RootSystem& rs, const Root& a, const Root& b) { return rs.pairing(rs.index_of(a), rs.index_of(b)); }

std::string format_root(const RootSystem& rs, int idx) {
  std::ostringstream os;
  os << '(';
  const auto& c = rs.coeffs(idx);
  for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
  os << ')';
  return os.str();
}

}  // namespace convexdl
