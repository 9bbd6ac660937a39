#include "convexdl/ha_space.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace convexdl {

BudgetRefused::BudgetRefused(double req, int budget)
    : std::runtime_error("enumeration needs " + std::to_string(req) + " bits, budget is " + std::to_string(budget)),
      required_bits(req),
      budget_bits(budget) {}

namespace {

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

bool contains(const std::vector<int>& sorted, int a) { return std::binary_search(sorted.begin(), sorted.end(), a); }

// Root index of a + i*b, or -1.
int shifted_root(const RootSystem& rs, int a, int b, int i) {
  std::vector<int> v(rs.coeffs(a));
  const auto& cb = rs.coeffs(b);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] += i * cb[k];
  return rs.find(v);
}

// Additive map from a list of input coordinates to a list of output rows, tabulated per value.
struct LinearEnumerator {
  int n = 0;                                         // field size
  std::vector<std::vector<std::vector<Elem>>> table;  // [coord][value][row]
  std::vector<Elem> base;                            // image of the zero point
};

// Visits every point of F^K; visit(outer, digits, image) may run concurrently for distinct outer.
template <class Visit>
void for_each_point(const Field& f, const LinearEnumerator& e, bool parallel, Visit&& visit) {
  const int K = static_cast<int>(e.table.size());
  const int rows = static_cast<int>(e.base.size());
  int k0 = 0;
  long outer = 1;
  while (k0 < K && outer < 256) outer *= e.n, ++k0;
  long inner = 1;
  for (int i = k0; i < K; ++i) inner *= e.n;
  auto body = [&](long o) {
    std::vector<Elem> digits(static_cast<std::size_t>(K), 0);
    long rest = o;
    for (int i = k0 - 1; i >= 0; --i) digits[i] = static_cast<Elem>(rest % e.n), rest /= e.n;
    std::vector<Elem> img = e.base;
    for (int i = 0; i < k0; ++i)
      for (int r = 0; r < rows; ++r) img[r] = f.add(img[r], e.table[i][digits[i]][r]);
    for (long t = 0; t < inner; ++t) {
      visit(o, digits, img);
      for (int i = K - 1; i >= k0; --i) {
        const Elem old = digits[i];
        const Elem nw = static_cast<Elem>((old + 1) % e.n);
        digits[i] = nw;
        const auto& co = e.table[i][old];
        const auto& cn = e.table[i][nw];
        for (int r = 0; r < rows; ++r) img[r] = f.add(f.sub(img[r], co[r]), cn[r]);
        if (nw != 0) break;
      }
    }
  };
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long o = 0; o < outer; ++o) body(o);
  } else {
    for (long o = 0; o < outer; ++o) body(o);
  }
}

std::uint64_t ipow(int n, std::size_t k) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < k; ++i) r *= static_cast<std::uint64_t>(n);
  return r;
}

void require_support(const HAVector& v, const std::vector<int>& roots, std::size_t size, const char* what) {
  if (v.entries.size() != size) throw std::invalid_argument(std::string(what) + ": vector has wrong length");
  if (!supported_on(v, roots)) throw std::invalid_argument(std::string(what) + ": support violation");
}

}  // namespace

HASetup::HASetup(HASetupInput in)
    : x_(std::move(in.x)),
      field_(std::make_shared<Field>(in.field)),
      coeffs_(std::move(in.ad_coefficients)),
      constants_(std::move(in.ad_constants)) {
  const RootSystem& rs = x_.system();
  const int N = rs.size();
  xi_ = twisted_inverse(x_);
  for (int a : in.A)
    if (a < 0 || a >= N) throw std::invalid_argument("A contains an invalid root index");
  A_ = sorted_unique(in.A);
  in_A_.assign(static_cast<std::size_t>(N), 0);
  for (int a : A_) in_A_[a] = 1;
  for (int a : A_)
    if (!in_A(x_.act(a))) throw std::invalid_argument("A is not x-stable: " + format_root(rs, a) + " maps outside A");

  B_ = in.B;
  if (sorted_unique(B_).size() != B_.size()) throw std::invalid_argument("B has repeated roots");
  for (int b : B_) {
    if (b < 0 || b >= N) throw std::invalid_argument("B contains an invalid root index");
    if (rs.is_positive(b) || !rs.is_positive(xi_.act(b)))
      throw std::invalid_argument("B must lie in -Delta_x; offending root " + format_root(rs, b));
  }
  if (coeffs_.size() != B_.size()) throw std::invalid_argument("ad_coefficients must align with B");
  for (Elem c : coeffs_)
    if (c >= field_->size()) throw std::invalid_argument("ad coefficient outside the field");
  for (const auto& [k, c] : constants_)
    if (c >= field_->size()) throw std::invalid_argument("ad constant outside the field");

  for (int a : A_)
    for (int b : B_)
      for (int i = 1; i <= 3; ++i) {
        const int s = shifted_root(rs, a, b, i);
        if (s >= 0 && !in_A(s))
          throw std::invalid_argument("absorption fails: " + format_root(rs, a) + " + " + std::to_string(i) + "*" +
                                      format_root(rs, b) + " is a root outside A");
      }

  if (is_elliptic(x_)) {
    n_ = n_table(x_);
    n_inv_ = n_table(xi_);
    convex_ = is_convex(x_);
  }

  for (int a : A_) {
    const bool pos = rs.is_positive(a);
    const bool xpos = rs.is_positive(xi_.act(a));  // a in x(Phi+)
    if (pos && !xpos) A_delta_.push_back(a);
    if (!pos && xpos) A_mdelta_.push_back(a);
    if (pos && xpos) P_.push_back(a);
    if (pos) Apos_.push_back(a), xApos_.push_back(x_.act(a));
  }
  std::sort(xApos_.begin(), xApos_.end());

  M_.assign(static_cast<std::size_t>(N), std::vector<Elem>(static_cast<std::size_t>(N), 0));
  for (int g : A_) {
    HAVector v = basis(g);
    for (int j = static_cast<int>(B_.size()) - 1; j >= 0; --j) v = apply_ad(*this, B_[j], coeffs_[j], v);
    for (int a = 0; a < N; ++a) M_[a][g] = v.entries[a];
  }
  for (int g : A_)
    for (int a : A_) {
      const Elem c = M_[a][g];
      if (a == g ? c != 1 : (c != 0 && rs.height(a) >= rs.height(g)))
        throw std::logic_error("phi is not unipotent with respect to height");
    }
}

Elem HASetup::ad_constant(int alpha, int beta, int i) const {
  auto it = constants_.find({alpha, beta, i});
  return it == constants_.end() ? Elem{1} : it->second;
}

HAVector HASetup::zero() const { return HAVector{std::vector<Elem>(static_cast<std::size_t>(system().size()), 0)}; }

HAVector HASetup::basis(int root, Elem c) const {
  if (!in_A(root)) throw std::invalid_argument("basis vector outside A");
  HAVector v = zero();
  v.entries[root] = c;
  return v;
}

HAVector apply_ad(const HASetup& s, int beta, Elem c, const HAVector& v) {
  if (std::find(s.B().begin(), s.B().end(), beta) == s.B().end()) throw std::invalid_argument("beta is not in B");
  const Field& f = s.field();
  const RootSystem& rs = s.system();
  HAVector out = v;
  for (int a : s.A()) {
    const Elem va = v.entries[a];
    if (va == 0) continue;
    for (int i = 1; i <= 3; ++i) {
      const int t = shifted_root(rs, a, beta, i);
      if (t < 0) continue;
      const Elem term = f.mul(va, f.mul(s.ad_constant(a, beta, i), f.pow(c, static_cast<unsigned>(i))));
      out.entries[t] = f.add(out.entries[t], term);
    }
  }
  return out;
}

HAVector apply_phi(const HASetup& s, const HAVector& v) {
  const Field& f = s.field();
  HAVector out = s.zero();
  const auto& M = s.phi_matrix();
  for (int g : s.A()) {
    const Elem vg = v.entries[g];
    if (vg == 0) continue;
    for (int a : s.A()) out.entries[a] = f.add(out.entries[a], f.mul(M[a][g], vg));
  }
  return out;
}

HAVector apply_twisted_frobenius(const HASetup& s, const HAVector& v) {
  HAVector out = s.zero();
  for (int a : s.A()) out.entries[s.x().act(a)] = s.field().frob(v.entries[a]);
  return out;
}

HAVector apply_twisted_frobenius_inv(const HASetup& s, const HAVector& v) {
  HAVector out = s.zero();
  for (int a : s.A()) out.entries[a] = s.field().frob_inv(v.entries[s.x().act(a)]);
  return out;
}

HAVector ha_add(const Field& f, const HAVector& a, const HAVector& b) {
  HAVector r = a;
  for (std::size_t i = 0; i < r.entries.size(); ++i) r.entries[i] = f.add(a.entries[i], b.entries[i]);
  return r;
}

HAVector ha_sub(const Field& f, const HAVector& a, const HAVector& b) {
  HAVector r = a;
  for (std::size_t i = 0; i < r.entries.size(); ++i) r.entries[i] = f.sub(a.entries[i], b.entries[i]);
  return r;
}

HAVector ha_neg(const Field& f, const HAVector& a) {
  HAVector r = a;
  for (auto& e : r.entries) e = f.neg(e);
  return r;
}

bool supported_on(const HAVector& v, const std::vector<int>& roots) {
  for (std::size_t i = 0; i < v.entries.size(); ++i)
    if (v.entries[i] != 0 && std::find(roots.begin(), roots.end(), static_cast<int>(i)) == roots.end()) return false;
  return true;
}

HAVector v_residual(const HASetup& s, const HAVector& z, const HAVector& w) {
  const Field& f = s.field();
  return ha_sub(f, ha_sub(f, apply_phi(s, w), apply_twisted_frobenius(s, w)), z);
}

bool in_V(const HASetup& s, const HAVector& z, const HAVector& w) {
  return supported_on(v_residual(s, z, w), s.A_minus_delta());
}

HAVector solve_uniformization(const HASetup& s, const HAVector& z, const HAVector& boundary) {
  if (!s.convex()) throw PreconditionError("solve_uniformization requires a convex elliptic x");
  const RootSystem& rs = s.system();
  const std::size_t N = static_cast<std::size_t>(rs.size());
  require_support(z, s.A(), N, "z");
  require_support(boundary, s.A_delta(), N, "boundary");
  const Field& f = s.field();
  const auto& M = s.phi_matrix();
  const auto& nx = s.n_x();
  const auto& nxi = s.n_x_inv();

  HAVector w = s.zero();
  std::vector<char> done(N, 0);
  for (int a : s.A_delta()) w.entries[a] = boundary.entries[a], done[a] = 1;

  auto need = [&](int g, int for_root) {
    if (!done[g])
      throw PreconditionError("elimination order broken: " + format_root(rs, g) + " unresolved when solving " +
                              format_root(rs, for_root));
  };
  // sum_{g != skip} M[row][g] w_g, checking that every contributing w_g is known
  auto tail = [&](int row, int skip, int for_root) {
    Elem acc = 0;
    for (int g : s.A()) {
      if (g == skip || M[row][g] == 0) continue;
      need(g, for_root);
      acc = f.add(acc, f.mul(M[row][g], w.entries[g]));
    }
    return acc;
  };

  // Stage (i): positive roots outside Delta_x, by n_{x^{-1}} then decreasing height.
  std::vector<int> pos = s.P();
  std::sort(pos.begin(), pos.end(), [&](int a, int b) {
    if (nxi[a] != nxi[b]) return nxi[a] < nxi[b];
    if (rs.height(a) != rs.height(b)) return rs.height(a) > rs.height(b);
    return a < b;
  });
  for (int a : pos) {
    const int pre = s.x_inv().act(a);
    need(pre, a);
    const Elem t = tail(a, a, a);
    w.entries[a] = f.sub(f.add(f.frob(w.entries[pre]), z.entries[a]), t);
    done[a] = 1;
  }

  // Stage (ii): negative roots by increasing n_x, each from the equation at x(alpha).
  std::vector<int> neg;
  for (int a : s.A())
    if (!rs.is_positive(a)) neg.push_back(a);
  std::stable_sort(neg.begin(), neg.end(), [&](int a, int b) { return nx[a] < nx[b]; });
  for (int a : neg) {
    const int t = s.x().act(a);
    need(t, a);
    const Elem rhs = f.sub(f.add(w.entries[t], tail(t, t, a)), z.entries[t]);
    w.entries[a] = f.frob_inv(rhs);
    done[a] = 1;
  }

  if (!in_V(s, z, w)) throw std::logic_error("uniformization solver produced a point outside V");
  return w;
}

double enumeration_bits(const HASetup& s, std::size_t coordinates) {
  return static_cast<double>(coordinates) * std::log2(static_cast<double>(s.field().size()));
}

std::vector<HAVector> enumerate_V(const HASetup& s, const HAVector& z, int budget_bits) {
  const double bits = enumeration_bits(s, s.A().size());
  if (bits > budget_bits + 1e-9) throw BudgetRefused(bits, budget_bits);
  const Field& f = s.field();
  const int n = f.size();
  require_support(z, s.A(), static_cast<std::size_t>(s.system().size()), "z");

  // Constraint rows: A minus (-Delta_x).
  std::vector<int> rows;
  for (int a : s.A())
    if (!contains(s.A_minus_delta(), a)) rows.push_back(a);
  LinearEnumerator e;
  e.n = n;
  for (int g : s.A()) {
    std::vector<std::vector<Elem>> per(static_cast<std::size_t>(n));
    for (int c = 0; c < n; ++c) {
      const HAVector img = v_residual(s, s.zero(), s.basis(g, static_cast<Elem>(c)));
      for (int r : rows) per[c].push_back(img.entries[r]);
    }
    e.table.push_back(std::move(per));
  }
  for (int r : rows) e.base.push_back(f.neg(z.entries[r]));

  std::size_t K = s.A().size();
  long outer = 1;
  for (std::size_t k = 0; k < K && outer < 256; ++k) outer *= n;
  std::vector<std::vector<HAVector>> found(static_cast<std::size_t>(outer));
  for_each_point(f, e, true, [&](long o, const std::vector<Elem>& digits, const std::vector<Elem>& img) {
    for (Elem v : img)
      if (v != 0) return;
    HAVector w = s.zero();
    for (std::size_t k = 0; k < K; ++k) w.entries[s.A()[k]] = digits[k];
    found[o].push_back(std::move(w));
  });
  std::vector<HAVector> out;
  for (auto& chunk : found)
    for (auto& w : chunk) out.push_back(std::move(w));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<HAVector> enumerate_V_serial(const HASetup& s, const HAVector& z, int budget_bits) {
  const double bits = enumeration_bits(s, s.A().size());
  if (bits > budget_bits + 1e-9) throw BudgetRefused(bits, budget_bits);
  const int n = s.field().size();
  const std::uint64_t total = ipow(n, s.A().size());
  std::vector<HAVector> out;
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    HAVector w = s.zero();
    std::uint64_t r = idx;
    for (int k = static_cast<int>(s.A().size()) - 1; k >= 0; --k) w.entries[s.A()[k]] = static_cast<Elem>(r % n), r /= n;
    if (in_V(s, z, w)) out.push_back(std::move(w));
  }
  std::sort(out.begin(), out.end());
  return out;
}

HAVector steinberg_linear_map(const HASetup& s, const HAVector& z, const HAVector& y) {
  const std::size_t N = static_cast<std::size_t>(s.system().size());
  require_support(z, s.P(), N, "z");
  require_support(y, s.A_minus_delta(), N, "y");
  const Field& f = s.field();
  return ha_sub(f, ha_sub(f, y, apply_phi(s, z)), apply_twisted_frobenius(s, z));
}

SteinbergPreimage invert_steinberg(const HASetup& s, const HAVector& target) {
  if (!s.convex()) throw PreconditionError("invert_steinberg requires a convex elliptic x");
  const RootSystem& rs = s.system();
  const std::size_t N = static_cast<std::size_t>(rs.size());
  require_support(target, s.x_A_pos(), N, "target");
  const Field& f = s.field();
  const auto& nx = s.n_x();

  // Conjugated operator F^{-1} phi F; column g is F^{-1}(phi(e_{x(g)})).
  std::vector<std::vector<Elem>> Mc(N, std::vector<Elem>(N, 0));
  for (int g : s.A()) {
    const HAVector col = apply_twisted_frobenius_inv(s, apply_phi(s, s.basis(s.x().act(g))));
    for (int a : s.A()) Mc[a][g] = col.entries[a];
  }

  SteinbergPreimage res;
  res.z = s.zero();
  // Residual F^{-1}(target + phi(z) + F(z)); z solves the problem once this lies on Delta_{x^{-1}}.
  auto residual = [&]() {
    return apply_twisted_frobenius_inv(
        s, ha_add(f, target, ha_add(f, apply_phi(s, res.z), apply_twisted_frobenius(s, res.z))));
  };
  auto top_level = [&](const HAVector& R) {
    int top = 0;
    for (std::size_t a = 0; a < N; ++a) {
      if (R.entries[a] == 0) continue;
      if (!rs.is_positive(static_cast<int>(a))) throw std::logic_error("Steinberg residual left the positive roots");
      top = std::max(top, nx[a]);
    }
    return top;
  };

  HAVector R = residual();
  int level = top_level(R);
  while (level >= 2) {
    std::vector<int> layer;
    for (int a : s.A_pos())
      if (nx[a] == level) layer.push_back(a);
    std::stable_sort(layer.begin(), layer.end(), [&](int a, int b) { return rs.height(a) < rs.height(b); });
    HAVector u = s.zero();
    std::vector<char> done(N, 0);
    for (int a : layer) {
      Elem acc = f.neg(R.entries[a]);
      for (int g : layer) {
        if (g == a || Mc[a][g] == 0) continue;
        if (!done[g]) throw std::logic_error("Steinberg layer is not triangular");
        acc = f.sub(acc, f.mul(Mc[a][g], u.entries[g]));
      }
      u.entries[a] = acc;
      done[a] = 1;
    }
    res.z = ha_add(f, res.z, apply_twisted_frobenius(s, u));
    ++res.depth;
    R = residual();
    const int next = top_level(R);
    if (next >= level) throw std::logic_error("Steinberg descent failed to lower n_x");
    level = next;
  }
  res.y = ha_add(f, target, ha_add(f, apply_phi(s, res.z), apply_twisted_frobenius(s, res.z)));
  if (!supported_on(res.y, s.A_minus_delta())) throw std::logic_error("Steinberg preimage y has wrong support");
  if (!(steinberg_linear_map(s, res.z, res.y) == target)) throw std::logic_error("Steinberg round trip failed");
  return res;
}

namespace {

BijectivityReport bijectivity_impl(const HASetup& s, int budget_bits, bool parallel) {
  const Field& f = s.field();
  const int n = f.size();
  std::vector<int> dom = s.P();
  dom.insert(dom.end(), s.A_minus_delta().begin(), s.A_minus_delta().end());
  const double bits = enumeration_bits(s, dom.size());
  if (bits > budget_bits + 1e-9) throw BudgetRefused(bits, budget_bits);
  const std::vector<int>& cod = s.x_A_pos();

  BijectivityReport rep;
  rep.cardinality_identity = s.P().size() + s.A_minus_delta().size() == cod.size();
  rep.domain_size = ipow(n, dom.size());
  rep.codomain_size = ipow(n, cod.size());
  if (rep.codomain_size > (1ull << 26)) throw BudgetRefused(std::log2(static_cast<double>(rep.codomain_size)), 26);
  std::vector<std::uint8_t> hit(rep.codomain_size, 0);
  std::uint64_t distinct = 0;

  auto encode = [&](const std::vector<Elem>& img) {
    std::uint64_t code = 0;
    for (std::size_t j = img.size(); j-- > 0;) code = code * n + img[j];
    return code;
  };
  const std::size_t np = s.P().size();

  if (parallel) {
    LinearEnumerator e;
    e.n = n;
    for (std::size_t k = 0; k < dom.size(); ++k) {
      std::vector<std::vector<Elem>> per(static_cast<std::size_t>(n));
      for (int c = 0; c < n; ++c) {
        HAVector z = s.zero(), y = s.zero();
        (k < np ? z : y).entries[dom[k]] = static_cast<Elem>(c);
        const HAVector img = steinberg_linear_map(s, z, y);
        for (int r : cod) per[c].push_back(img.entries[r]);
      }
      e.table.push_back(std::move(per));
    }
    e.base.assign(cod.size(), 0);
    for_each_point(f, e, true, [&](long, const std::vector<Elem>&, const std::vector<Elem>& img) {
      const std::uint64_t code = encode(img);
#pragma omp atomic write
      hit[code] = 1;
    });
    for (std::uint8_t h : hit) distinct += h;
  } else {
    const std::uint64_t total = rep.domain_size;
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      HAVector z = s.zero(), y = s.zero();
      std::uint64_t r = idx;
      for (std::size_t k = dom.size(); k-- > 0;) {
        (k < np ? z : y).entries[dom[k]] = static_cast<Elem>(r % n);
        r /= n;
      }
      const HAVector img = steinberg_linear_map(s, z, y);
      std::vector<Elem> coords;
      for (int c : cod) coords.push_back(img.entries[c]);
      const std::uint64_t code = encode(coords);
      if (!hit[code]) hit[code] = 1, ++distinct;
    }
  }
  rep.distinct_images = distinct;
  rep.bijective = rep.domain_size == rep.codomain_size && distinct == rep.domain_size;
  return rep;
}

}  // namespace

BijectivityReport steinberg_bijectivity(const HASetup& s, int budget_bits) { return bijectivity_impl(s, budget_bits, true); }

BijectivityReport steinberg_bijectivity_serial(const HASetup& s, int budget_bits) {
  return bijectivity_impl(s, budget_bits, false);
}

}  // namespace convexdl

namespace convexdl {

HASetupInput random_ha_input(const RootSystemPtr& rs, const DiagramAut& sigma, const FieldSpec& field,
                             std::mt19937_64& rng, int budget_bits) {
  const Field f(field);
  const double per = std::log2(static_cast<double>(f.size()));
  const std::size_t max_a = static_cast<std::size_t>(std::floor(budget_bits / per + 1e-9));

  std::vector<TwistedClass> elliptic;
  for (auto& c : enumerate_twisted_classes(rs, sigma))
    if (c.elliptic) elliptic.push_back(std::move(c));
  if (elliptic.empty()) throw PreconditionError("no elliptic class in this coset");
  const auto& cls = elliptic[rng() % elliptic.size()];
  const auto convex = convex_elements_of_class(cls);
  if (convex.empty()) throw std::logic_error("elliptic class without convex element");
  HASetupInput in;
  in.x = convex[rng() % convex.size()];
  in.field = f.spec();
  const TwistedElement& x = in.x;

  std::vector<std::vector<int>> orbits;
  std::vector<int> orbit_of(static_cast<std::size_t>(rs->size()), -1);
  for (int a = 0; a < rs->size(); ++a) {
    if (orbit_of[a] >= 0) continue;
    std::vector<int> o;
    for (int c = a; orbit_of[c] < 0; c = x.act(c)) orbit_of[c] = static_cast<int>(orbits.size()), o.push_back(c);
    orbits.push_back(std::move(o));
  }

  std::vector<int> mdelta;
  const TwistedElement xi = twisted_inverse(x);
  for (int b = rs->num_positive(); b < rs->size(); ++b)
    if (rs->is_positive(xi.act(b))) mdelta.push_back(b);

  for (int attempt = 0; attempt < 64; ++attempt) {
    std::vector<int> B;
    for (int b : mdelta)
      if (rng() % 2) B.push_back(b);
    std::shuffle(B.begin(), B.end(), rng);
    if (attempt >= 32) B.clear();

    std::vector<char> chosen(orbits.size(), 0);
    std::vector<int> order(orbits.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t want = 1 + rng() % std::min<std::size_t>(3, orbits.size());
    for (std::size_t i = 0; i < want; ++i) chosen[order[i]] = 1;
    // Close under absorption by B.
    bool grew = true;
    while (grew) {
      grew = false;
      for (std::size_t o = 0; o < orbits.size(); ++o) {
        if (!chosen[o]) continue;
        for (int a : orbits[o])
          for (int b : B)
            for (int i = 1; i <= 3; ++i) {
              std::vector<int> v(rs->coeffs(a));
              for (std::size_t k = 0; k < v.size(); ++k) v[k] += i * rs->coeffs(b)[k];
              const int t = rs->find(v);
              if (t >= 0 && !chosen[orbit_of[t]]) chosen[orbit_of[t]] = 1, grew = true;
            }
      }
    }
    std::vector<int> A;
    for (std::size_t o = 0; o < orbits.size(); ++o)
      if (chosen[o]) A.insert(A.end(), orbits[o].begin(), orbits[o].end());
    if (A.size() > max_a) continue;
    std::sort(A.begin(), A.end());
    in.A = A;
    in.B = B;
    in.ad_coefficients.clear();
    for (std::size_t j = 0; j < B.size(); ++j) in.ad_coefficients.push_back(static_cast<Elem>(rng() % f.size()));
    in.ad_constants.clear();
    for (int a : A)
      for (int b : B)
        for (int i = 1; i <= 3; ++i) {
          std::vector<int> v(rs->coeffs(a));
          for (std::size_t k = 0; k < v.size(); ++k) v[k] += i * rs->coeffs(b)[k];
          if (rs->find(v) >= 0) in.ad_constants[{a, b, i}] = static_cast<Elem>(rng() % f.size());
        }
    return in;
  }
  throw BudgetRefused(per * static_cast<double>(orbits.front().size()), budget_bits);
}

}  // namespace convexdl
