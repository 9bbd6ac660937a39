#include "convexdl/twisted_weyl.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <string>

namespace convexdl {

bool DiagramAut::is_identity() const {
  for (std::size_t i = 0; i < perm.size(); ++i)
    if (perm[i] != static_cast<int>(i)) return false;
  return true;
}

int DiagramAut::order() const {
  std::vector<int> cur(perm.size());
  std::iota(cur.begin(), cur.end(), 0);
  for (int k = 1;; ++k) {
    for (auto& c : cur) c = perm[static_cast<std::size_t>(c)];
    bool id = true;
    for (std::size_t i = 0; i < cur.size(); ++i) id = id && cur[i] == static_cast<int>(i);
    if (id) return k;
  }
}

DiagramAut identity_aut(int rank) {
  DiagramAut s;
  s.perm.resize(static_cast<std::size_t>(rank));
  std::iota(s.perm.begin(), s.perm.end(), 0);
  return s;
}

DiagramAut make_diagram_aut(const RootSystem& rs, std::vector<int> perm) {
  const int l = rs.rank();
  if (static_cast<int>(perm.size()) != l) throw std::invalid_argument("sigma must permute " + std::to_string(l) + " simple roots");
  std::vector<int> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < l; ++i)
    if (sorted[static_cast<std::size_t>(i)] != i) throw std::invalid_argument("sigma is not a permutation of the simple roots");
  const auto& a = rs.datum().cartan_matrix;
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j)
      if (a[perm[i]][perm[j]] != a[i][j])
        throw std::invalid_argument("sigma does not preserve the Cartan matrix at (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
  return DiagramAut{std::move(perm)};
}

std::vector<DiagramAut> diagram_automorphisms(const RootSystem& rs) {
  std::vector<int> p(static_cast<std::size_t>(rs.rank()));
  std::iota(p.begin(), p.end(), 0);
  std::vector<DiagramAut> out;
  const auto& a = rs.datum().cartan_matrix;
  do {
    bool ok = true;
    for (int i = 0; i < rs.rank() && ok; ++i)
      for (int j = 0; j < rs.rank() && ok; ++j) ok = a[p[i]][p[j]] == a[i][j];
    if (ok) out.push_back(DiagramAut{p});
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

std::vector<int> diagram_action(const RootSystem& rs, const DiagramAut& sigma) {
  std::vector<int> act(static_cast<std::size_t>(rs.size()));
  for (int r = 0; r < rs.size(); ++r) {
    std::vector<int> c(static_cast<std::size_t>(rs.rank()));
    for (int i = 0; i < rs.rank(); ++i) c[sigma.perm[i]] = rs.coeffs(r)[i];
    act[r] = rs.find(c);
  }
  return act;
}

namespace {
DiagramAut normalized(const RootSystem& rs, DiagramAut s) {
  if (s.perm.empty()) return identity_aut(rs.rank());
  return s;
}
std::vector<int> compose(const std::vector<int>& f, const std::vector<int>& g) {
  std::vector<int> h(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) h[i] = f[g[i]];
  return h;
}
std::vector<int> inverse_perm(const std::vector<int>& f) {
  std::vector<int> h(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) h[f[i]] = static_cast<int>(i);
  return h;
}
int mod(int a, int n) { return ((a % n) + n) % n; }
}  // namespace

TwistedElement::TwistedElement(RootSystemPtr rs, std::vector<int> action, DiagramAut sigma, int sigma_power)
    : rs_(std::move(rs)), action_(std::move(action)), sigma_(normalized(*rs_, std::move(sigma))) {
  if (static_cast<int>(action_.size()) != rs_->size()) throw std::invalid_argument("action has the wrong length");
  sigma_power_ = mod(sigma_power, sigma_.order());
}

TwistedElement TwistedElement::identity(RootSystemPtr rs, DiagramAut sigma) {
  std::vector<int> id(static_cast<std::size_t>(rs->size()));
  std::iota(id.begin(), id.end(), 0);
  return TwistedElement(std::move(rs), std::move(id), std::move(sigma), 0);
}

TwistedElement TwistedElement::from_word(RootSystemPtr rs, const std::vector<int>& word, DiagramAut sigma, int sigma_power) {
  sigma = normalized(*rs, std::move(sigma));
  std::vector<int> sa = diagram_action(*rs, sigma);
  std::vector<int> act(static_cast<std::size_t>(rs->size()));
  std::iota(act.begin(), act.end(), 0);
  for (int k = 0; k < mod(sigma_power, sigma.order()); ++k) act = compose(sa, act);
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    if (*it < 1 || *it > rs->rank()) throw std::invalid_argument("word letter " + std::to_string(*it) + " out of range");
    act = compose(rs->simple_reflection(*it - 1), act);
  }
  return TwistedElement(std::move(rs), std::move(act), std::move(sigma), sigma_power);
}

TwistedElement TwistedElement::pure_sigma(RootSystemPtr rs, const DiagramAut& sigma) { return from_word(std::move(rs), {}, sigma, 1); }

std::vector<int> TwistedElement::simple_images() const {
  return std::vector<int>(action_.begin(), action_.begin() + rs_->rank());
}

IntMatrix TwistedElement::matrix() const {
  const int l = rs_->rank();
  IntMatrix m(static_cast<std::size_t>(l), std::vector<int>(static_cast<std::size_t>(l)));
  for (int j = 0; j < l; ++j)
    for (int i = 0; i < l; ++i) m[i][j] = rs_->coeffs(action_[j])[i];
  return m;
}

std::vector<int> TwistedElement::w_action() const {
  std::vector<int> sinv = inverse_perm(diagram_action(*rs_, sigma_));
  std::vector<int> a = action_;
  for (int k = 0; k < sigma_power_; ++k) a = compose(a, sinv);
  return a;
}

int TwistedElement::order() const {
  std::vector<int> cur = action_;
  for (int k = 1;; ++k) {
    bool id = true;
    for (std::size_t i = 0; i < cur.size() && id; ++i) id = cur[i] == static_cast<int>(i);
    if (id) return k;
    cur = compose(action_, cur);
  }
}

Root act(const TwistedElement& x, const Root& a) { return x.system().root(x.act(x.system().index_of(a))); }

TwistedElement twisted_product(const TwistedElement& x, const TwistedElement& y) {
  if (x.system_ptr() != y.system_ptr() && x.system().datum().cartan_matrix != y.system().datum().cartan_matrix)
    throw std::invalid_argument("twisted elements belong to different root systems");
  DiagramAut s = x.sigma();
  if (!(x.sigma() == y.sigma())) {
    if (x.sigma_power() != 0 && y.sigma_power() != 0) throw std::invalid_argument("sigma parts generate different cyclic groups");
    if (x.sigma_power() == 0) s = y.sigma();
  }
  return TwistedElement(x.system_ptr(), compose(x.action(), y.action()), s, x.sigma_power() + y.sigma_power());
}

TwistedElement twisted_inverse(const TwistedElement& x) {
  return TwistedElement(x.system_ptr(), inverse_perm(x.action()), x.sigma(), -x.sigma_power());
}

TwistedElement twisted_power(const TwistedElement& x, int k) {
  TwistedElement base = k >= 0 ? x : twisted_inverse(x);
  TwistedElement r = TwistedElement::identity(x.system_ptr(), x.sigma());
  for (int i = 0; i < std::abs(k); ++i) r = twisted_product(r, base);
  return r;
}

TwistedElement conjugate(const TwistedElement& u, const TwistedElement& x) {
  return twisted_product(twisted_product(u, x), twisted_inverse(u));
}

bool is_elliptic(const TwistedElement& x) {
  IntMatrix m = x.matrix();
  for (std::size_t i = 0; i < m.size(); ++i) m[i][i] -= 1;
  return rational_rank(m) == x.system().rank();
}

int coxeter_length(const TwistedElement& x) {
  std::vector<int> w = x.w_action();
  const auto& rs = x.system();
  int n = 0;
  for (int a = 0; a < rs.num_positive(); ++a) n += rs.is_positive(w[a]) ? 0 : 1;
  return n;
}

EnumerationRefused::EnumerationRefused(std::size_t req, std::size_t c)
    : std::runtime_error("enumeration refused: |W| = " + std::to_string(req) + " exceeds cap " + std::to_string(c) +
                         "; raise the cap to at least " + std::to_string(req)),
      required(req),
      cap(c) {}

std::size_t weyl_order(const RootSystem& rs) {
  // Exponents are the dual partition of the height distribution of positive roots.
  std::vector<int> count(static_cast<std::size_t>(rs.max_height() + 2), 0);
  for (int a = 0; a < rs.num_positive(); ++a) ++count[rs.height(a)];
  std::size_t order = 1;
  for (int k = 1; k <= rs.max_height(); ++k)
    for (int e = 0; e < count[k] - count[k + 1]; ++e) order *= static_cast<std::size_t>(k + 1);
  return order;
}

WeylGroup enumerate_weyl_group(const RootSystemPtr& rs, std::size_t cap) {
  const std::size_t need = weyl_order(*rs);
  if (need > cap) throw EnumerationRefused(need, cap);
  WeylGroup g;
  std::map<std::vector<int>, std::size_t> seen;
  TwistedElement id = TwistedElement::identity(rs);
  seen[id.simple_images()] = 0;
  g.elements.push_back(id);
  g.words.push_back({});
  for (std::size_t head = 0; head < g.elements.size(); ++head) {
    for (int i = 0; i < rs->rank(); ++i) {
      TwistedElement y(rs, compose(rs->simple_reflection(i), g.elements[head].action()), identity_aut(rs->rank()), 0);
      auto key = y.simple_images();
      if (seen.count(key)) continue;
      seen[key] = g.elements.size();
      std::vector<int> word{i + 1};
      word.insert(word.end(), g.words[head].begin(), g.words[head].end());
      g.elements.push_back(std::move(y));
      g.words.push_back(std::move(word));
    }
  }
  return g;
}

std::vector<TwistedClass> enumerate_twisted_classes(const RootSystemPtr& rs, const DiagramAut& sigma_in, std::size_t cap) {
  const DiagramAut sigma = normalized(*rs, sigma_in);
  WeylGroup W = enumerate_weyl_group(rs, cap);
  const std::vector<int> sa = diagram_action(*rs, sigma);
  const int power = sigma.is_identity() ? 0 : 1;
  std::vector<TwistedElement> coset;
  std::map<std::vector<int>, std::size_t> index;
  for (const auto& w : W.elements) {
    coset.emplace_back(rs, compose(w.action(), sa), sigma, power);
    index[coset.back().simple_images()] = coset.size() - 1;
  }
  std::vector<int> cls(coset.size(), -1);
  std::vector<TwistedClass> out;
  for (std::size_t s = 0; s < coset.size(); ++s) {
    if (cls[s] >= 0) continue;
    const int c = static_cast<int>(out.size());
    std::vector<std::size_t> members{s};
    cls[s] = c;
    for (std::size_t h = 0; h < members.size(); ++h) {
      const auto& x = coset[members[h]].action();
      for (int i = 0; i < rs->rank(); ++i) {
        const auto& si = rs->simple_reflection(i);
        std::vector<int> key(static_cast<std::size_t>(rs->rank()));
        for (int j = 0; j < rs->rank(); ++j) key[j] = si[x[si[j]]];
        std::size_t k = index.at(key);
        if (cls[k] < 0) {
          cls[k] = c;
          members.push_back(k);
        }
      }
    }
    std::sort(members.begin(), members.end());
    TwistedClass tc;
    for (auto k : members) tc.members.push_back(coset[k]);
    tc.elliptic = is_elliptic(tc.members.front());
    out.push_back(std::move(tc));
  }
  return out;
}

}  // namespace convexdl
