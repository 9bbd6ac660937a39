#include "convexdl/convexity.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace convexdl {

std::vector<int> delta_set(const TwistedElement& x) {
  const auto& rs = x.system();
  std::vector<int> out;
  for (int a = rs.num_positive(); a < rs.size(); ++a)
    if (rs.is_positive(x.act(a))) out.push_back(x.act(a));
  std::sort(out.begin(), out.end());
  return out;
}

int n_value(const TwistedElement& x, int root) {
  const auto& rs = x.system();
  const bool pos = rs.is_positive(root);
  const int limit = x.order();
  int cur = root;
  for (int i = 1; i <= limit; ++i) {
    cur = x.act(cur);
    if (rs.is_positive(cur) != pos) return i;
  }
  throw PreconditionError("n_x undefined: the x-orbit of " + format_root(rs, root) + " never changes sign (x not elliptic)");
}

std::vector<int> n_table(const TwistedElement& x) {
  if (!is_elliptic(x)) throw PreconditionError("n_x requires an elliptic element");
  std::vector<int> n(static_cast<std::size_t>(x.system().size()));
  for (int a = 0; a < x.system().size(); ++a) n[a] = n_value(x, a);
  return n;
}

std::vector<QCViolation> quasi_convexity_violations(const TwistedElement& x, const std::vector<int>& n, PairDomain domain) {
  const auto& rs = x.system();
  std::vector<QCViolation> out;
  for (int a = 0; a < rs.size(); ++a)
    for (int b = a + 1; b < rs.size(); ++b) {
      if (domain == PairDomain::SameSign && rs.is_positive(a) != rs.is_positive(b)) continue;
      const int s = rs.add(a, b);
      if (s < 0) continue;
      if (n[s] > std::max(n[a], n[b])) out.push_back({a, b, s});
    }
  return out;
}

ConvexityCertificate convexity_certificate(const TwistedElement& x, PairDomain domain) {
  ConvexityCertificate c;
  const TwistedElement xi = twisted_inverse(x);
  c.delta_x = delta_set(x);
  c.n_table = n_table(x);
  c.n_table_inv = n_table(xi);
  c.qc_violations = quasi_convexity_violations(x, c.n_table, domain);
  c.qc_violations_inv = quasi_convexity_violations(xi, c.n_table_inv, domain);
  c.convex = c.qc_violations.empty() && c.qc_violations_inv.empty();
  return c;
}

bool is_convex(const TwistedElement& x, PairDomain domain) { return convexity_certificate(x, domain).convex; }

std::vector<char> class_convexity_flags_serial(const TwistedClass& cls, PairDomain domain) {
  std::vector<char> f(cls.members.size(), 0);
  if (!cls.elliptic) return f;
  for (std::size_t i = 0; i < cls.members.size(); ++i) f[i] = is_convex(cls.members[i], domain) ? 1 : 0;
  return f;
}

std::vector<char> class_convexity_flags(const TwistedClass& cls, PairDomain domain) {
  std::vector<char> f(cls.members.size(), 0);
  if (!cls.elliptic) return f;
  const long n = static_cast<long>(cls.members.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < n; ++i) f[i] = is_convex(cls.members[i], domain) ? 1 : 0;
  return f;
}

std::vector<TwistedElement> convex_elements_of_class(const TwistedClass& cls, PairDomain domain) {
  std::vector<char> f = class_convexity_flags(cls, domain);
  std::vector<TwistedElement> out;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i]) out.push_back(cls.members[i]);
  return out;
}

std::vector<SubadditiveViolation> subadditive_check(const TwistedElement& x) {
  if (!is_elliptic(x)) throw PreconditionError("subadditive check requires an elliptic element");
  const auto n = n_table(x);
  if (!quasi_convexity_violations(x, n).empty()) throw PreconditionError("subadditive check requires a quasi-convex element");
  const auto& rs = x.system();
  const int l = rs.rank();
  std::vector<SubadditiveViolation> out;
  for (int a = 0; a < rs.num_positive(); ++a)
    for (int b = 0; b < rs.num_positive(); ++b) {
      if (a == b) continue;
      for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j) {
          std::vector<int> v(static_cast<std::size_t>(l));
          for (int k = 0; k < l; ++k) v[k] = i * rs.coeffs(a)[k] + j * rs.coeffs(b)[k];
          const int c = rs.find(v);
          if (c < 0) continue;
          if (n[c] > std::max(n[a], n[b])) out.push_back({a, b, i, j, c});
        }
    }
  return out;
}

bool in_nonnegative_cone(const RootSystem& rs, const std::vector<int>& gens, const std::vector<int>& v) {
  for (int c : v)
    if (c < 0) return false;
  std::set<std::vector<int>> seen{std::vector<int>(v.size(), 0)};
  std::vector<std::vector<int>> stack{std::vector<int>(v.size(), 0)};
  while (!stack.empty()) {
    auto cur = stack.back();
    stack.pop_back();
    if (cur == v) return true;
    for (int g : gens) {
      std::vector<int> nx = cur;
      bool ok = true;
      for (std::size_t k = 0; k < v.size() && ok; ++k) {
        nx[k] += rs.coeffs(g)[k];
        ok = nx[k] >= 0 && nx[k] <= v[k];
      }
      if (ok && seen.insert(nx).second) stack.push_back(std::move(nx));
    }
  }
  return false;
}

std::vector<OrderViolation> ordering_check(const TwistedElement& x) {
  if (!is_elliptic(x)) throw PreconditionError("ordering check requires an elliptic element");
  if (!is_convex(x)) throw PreconditionError("ordering check requires a convex element");
  const auto& rs = x.system();
  const TwistedElement xi = twisted_inverse(x);
  const auto n = n_table(x);
  const auto ni = n_table(xi);
  const auto delta = delta_set(x);
  std::map<std::vector<int>, bool> memo;
  std::vector<OrderViolation> out;
  for (int a = 0; a < rs.size(); ++a)
    for (int b = 0; b < rs.size(); ++b) {
      std::vector<int> d(static_cast<std::size_t>(rs.rank()));
      for (int k = 0; k < rs.rank(); ++k) d[k] = rs.coeffs(b)[k] - rs.coeffs(a)[k];
      auto it = memo.find(d);
      if (it == memo.end()) it = memo.emplace(d, in_nonnegative_cone(rs, delta, d)).first;
      if (!it->second) continue;
      if (rs.is_positive(a) && ni[b] > ni[a]) out.push_back({1, a, b});
      if (!rs.is_positive(a) && !rs.is_positive(xi.act(a)) && !rs.is_positive(b) && n[b] > n[a]) out.push_back({2, a, b});
    }
  return out;
}

LeviSubsystem levi_from_generators(const RootSystem& rs, std::vector<int> generators) {
  std::sort(generators.begin(), generators.end());
  generators.erase(std::unique(generators.begin(), generators.end()), generators.end());
  IntMatrix base;
  for (int g : generators) base.push_back(rs.coeffs(g));
  const int r0 = rational_rank(base);
  LeviSubsystem L;
  L.generators = generators;
  for (int a = 0; a < rs.size(); ++a) {
    IntMatrix m = base;
    m.push_back(rs.coeffs(a));
    if (rational_rank(m) == r0) L.roots.push_back(a);
  }
  return L;
}

LeviSubsystem standard_levi(const RootSystem& rs, const std::vector<int>& simple_subset) {
  for (int j : simple_subset)
    if (j < 0 || j >= rs.rank()) throw std::invalid_argument("simple root index out of range");
  return levi_from_generators(rs, simple_subset);
}

bool is_levi(const RootSystem& rs, const std::vector<int>& roots) {
  std::vector<int> sorted = roots;
  std::sort(sorted.begin(), sorted.end());
  for (int a : sorted)
    if (!std::binary_search(sorted.begin(), sorted.end(), rs.negate(a))) return false;
  return levi_from_generators(rs, sorted).roots == sorted;
}

bool levi_is_stable(const LeviSubsystem& levi, const TwistedElement& x) {
  for (int a : levi.roots)
    if (!std::binary_search(levi.roots.begin(), levi.roots.end(), x.act(a))) return false;
  return true;
}

std::vector<LeviSubsystem> enumerate_levi_subsystems(const RootSystemPtr& rs, const WeylGroup& W) {
  std::map<std::vector<int>, LeviSubsystem> found;
  const int l = rs->rank();
  for (int mask = 0; mask < (1 << l); ++mask) {
    std::vector<int> J;
    for (int j = 0; j < l; ++j)
      if (mask >> j & 1) J.push_back(j);
    const LeviSubsystem std_levi = standard_levi(*rs, J);
    for (const auto& u : W.elements) {
      LeviSubsystem L;
      for (int a : std_levi.roots) L.roots.push_back(u.act(a));
      for (int j : J) L.generators.push_back(u.act(j));
      std::sort(L.roots.begin(), L.roots.end());
      found.emplace(L.roots, L);
    }
  }
  std::vector<LeviSubsystem> out;
  for (auto& [k, v] : found) out.push_back(v);
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.roots.size() < b.roots.size(); });
  return out;
}

StandardConvexResult find_standard_convex(const RootSystemPtr& rs, const DiagramAut& sigma, const LeviSubsystem& levi,
                                          const TwistedElement& x0, const WeylGroup& W) {
  if (!is_elliptic(x0)) throw PreconditionError("find_standard_convex requires an elliptic x0");
  if (!(x0.sigma() == sigma) && x0.sigma_power() != 0) throw std::invalid_argument("x0 does not lie in the coset of sigma");
  if (!levi_is_stable(levi, x0)) throw std::invalid_argument("Levi subsystem is not stable under x0");
  std::vector<char> in_levi(static_cast<std::size_t>(rs->size()), 0);
  for (int a : levi.roots) in_levi[a] = 1;
  for (std::size_t k = 0; k < W.elements.size(); ++k) {
    const auto& u = W.elements[k];
    const TwistedElement ui = twisted_inverse(u);
    std::vector<int> J;
    for (int j = 0; j < rs->rank(); ++j)
      if (in_levi[u.act(j)]) J.push_back(j);
    bool standard = true;
    for (int b : levi.roots) {
      const auto& c = rs->coeffs(ui.act(b));
      for (int j = 0; j < rs->rank() && standard; ++j)
        if (c[j] != 0 && !std::binary_search(J.begin(), J.end(), j)) standard = false;
      if (!standard) break;
    }
    if (!standard) continue;
    if (standard_levi(*rs, J).roots.size() != levi.roots.size()) continue;
    TwistedElement xn = conjugate(ui, x0);
    if (!is_convex(xn)) continue;
    StandardConvexResult r;
    r.chamber_element = u;
    r.chamber_word = W.words[k];
    for (int j = 0; j < rs->rank(); ++j) r.new_simple_roots.push_back(u.act(j));
    r.x_new = xn;
    r.standard_subset = J;
    r.levi_is_standard = true;
    r.x_convex = convexity_certificate(xn).convex;
    return r;
  }
  return StandardConvexResult{};
}

}  // namespace convexdl
