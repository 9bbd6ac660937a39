#include "convexdl/affine.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace convexdl {

namespace {

long long floor_of(const Rational& r) {
  long long q = r.numerator() / r.denominator();
  if (r.numerator() % r.denominator() != 0 && r.numerator() < 0) --q;
  return q;
}

long long ceil_of(const Rational& r) { return -floor_of(-r); }

Rational frac(const Rational& r) { return r - Rational(floor_of(r)); }

bool contains_sorted(const std::vector<int>& v, int a) { return std::binary_search(v.begin(), v.end(), a); }

}  // namespace

Rational parse_rational(const std::string& s) {
  try {
    const auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(std::stoll(s));
    const long long den = std::stoll(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    return Rational(std::stoll(s.substr(0, slash)), den);
  } catch (const std::logic_error&) {
    throw std::invalid_argument("not a rational number: '" + s + "'");
  }
}

std::string format_rational(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

bool AffineRoot::operator<(const AffineRoot& o) const {
  if (slice != o.slice) return slice;
  if (alpha != o.alpha) return alpha < o.alpha;
  return n < o.n;
}

ApartmentPoint origin(const RootSystem& rs) { return {std::vector<Rational>(static_cast<std::size_t>(rs.rank()), Rational(0))}; }

Rational root_value(const RootSystem& rs, int alpha, const ApartmentPoint& p) {
  if (static_cast<int>(p.coords.size()) != rs.rank()) throw std::invalid_argument("point has wrong dimension");
  Rational v(0);
  const auto& c = rs.coeffs(alpha);
  for (int k = 0; k < rs.rank(); ++k) v += Rational(c[k]) * p.coords[k];
  return v;
}

Rational evaluate(const RootSystem& rs, const AffineRoot& f, const ApartmentPoint& p) {
  if (f.slice) return Rational(f.n);
  return root_value(rs, f.alpha, p) + Rational(f.n);
}

std::string format_affine_root(const RootSystem& rs, const AffineRoot& f) {
  if (f.slice) return "slice(" + std::to_string(f.n) + ")";
  return "(" + format_root(rs, f.alpha) + ", " + std::to_string(f.n) + ")";
}

std::vector<AffineRoot> build_affine_roots(const RootSystem& rs, const ApartmentPoint& p, const Rational& bound) {
  if (bound < 0) throw std::invalid_argument("bound must be nonnegative");
  std::vector<std::pair<Rational, AffineRoot>> out;
  for (long long s = 0; s <= floor_of(bound); ++s) out.push_back({Rational(s), AffineRoot{true, -1, s}});
  for (int a = 0; a < rs.size(); ++a) {
    const Rational v = root_value(rs, a, p);
    for (long long n = ceil_of(-v); n <= floor_of(bound - v); ++n) out.push_back({v + Rational(n), AffineRoot{false, a, n}});
  }
  std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) {
    if (l.first != r.first) return l.first < r.first;
    return l.second < r.second;
  });
  std::vector<AffineRoot> res;
  for (auto& [v, f] : out) res.push_back(f);
  return res;
}

Jumps::Jumps(const RootSystem& rs, const ApartmentPoint& p) {
  std::set<Rational> s{Rational(0)};
  for (int a = 0; a < rs.size(); ++a) s.insert(frac(root_value(rs, a, p)));
  residues_.assign(s.begin(), s.end());
}

bool Jumps::contains(const Rational& r) const {
  return r >= 0 && std::binary_search(residues_.begin(), residues_.end(), frac(r));
}

Rational Jumps::r_plus(const Rational& r) const {
  const long long k = floor_of(r);
  for (long long base = k; base <= k + 1; ++base)
    for (const auto& rho : residues_) {
      const Rational c = Rational(base) + rho;
      if (c > r && c >= 0) return c;
    }
  return Rational(k + 1);  // unreachable: 0 is a residue
}

std::optional<Rational> Jumps::r_minus(const Rational& r) const {
  const long long k = floor_of(r);
  for (long long base = k; base >= k - 1; --base)
    for (auto it = residues_.rbegin(); it != residues_.rend(); ++it) {
      const Rational c = Rational(base) + *it;
      if (c < r) {
        if (c < 0) return std::nullopt;
        return c;
      }
    }
  return std::nullopt;
}

std::vector<Rational> Jumps::up_to(const Rational& bound) const {
  std::vector<Rational> out;
  for (long long k = 0; k <= floor_of(bound); ++k)
    for (const auto& rho : residues_)
      if (Rational(k) + rho <= bound) out.push_back(Rational(k) + rho);
  return out;
}

bool point_compatible(const TwistedElement& x, const ApartmentPoint& p) {
  const RootSystem& rs = x.system();
  for (int a = 0; a < rs.size(); ++a)
    if ((root_value(rs, a, p) - root_value(rs, x.act(a), p)).denominator() != 1) return false;
  return true;
}

AffineFrobenius::AffineFrobenius(TwistedElement x, ApartmentPoint p) : x_(std::move(x)), p_(std::move(p)) {
  const RootSystem& rs = x_.system();
  shift_.resize(static_cast<std::size_t>(rs.size()));
  for (int a = 0; a < rs.size(); ++a) {
    const Rational d = root_value(rs, a, p_) - root_value(rs, x_.act(a), p_);
    if (d.denominator() != 1) throw std::invalid_argument("point is not fixed by the action of x on affine roots");
    shift_[a] = d.numerator();
  }
}

AffineRoot AffineFrobenius::apply(const AffineRoot& f) const {
  if (f.slice) return f;
  return AffineRoot{false, x_.act(f.alpha), f.n + shift_[static_cast<std::size_t>(f.alpha)]};
}

bool in_delta_tilde(const TwistedElement& x, const ApartmentPoint& p, const AffineRoot& f) {
  if (f.slice || evaluate(x.system(), f, p) <= 0) return false;
  const RootSystem& rs = x.system();
  return rs.is_positive(f.alpha) && !rs.is_positive(twisted_inverse(x).act(f.alpha));
}

bool in_minus_delta_tilde(const TwistedElement& x, const ApartmentPoint& p, const AffineRoot& f) {
  if (f.slice || evaluate(x.system(), f, p) <= 0) return false;
  const RootSystem& rs = x.system();
  return !rs.is_positive(f.alpha) && rs.is_positive(twisted_inverse(x).act(f.alpha));
}

std::vector<AffineOrbit> f_orbits_and_order(const AffineFrobenius& F, const Rational& bound) {
  const RootSystem& rs = F.x().system();
  const auto all = build_affine_roots(rs, F.point(), bound);
  std::set<AffineRoot> pending;
  for (const auto& f : all)
    if (evaluate(rs, f, F.point()) > 0) pending.insert(f);
  std::vector<AffineOrbit> orbits;
  while (!pending.empty()) {
    const AffineRoot start = *pending.begin();
    std::vector<AffineRoot> cyc{start};
    for (AffineRoot g = F.apply(start); !(g == start); g = F.apply(g)) {
      if (!pending.count(g)) throw std::logic_error("F does not preserve levels");
      cyc.push_back(g);
    }
    for (const auto& g : cyc) pending.erase(g);
    AffineOrbit o;
    o.level = evaluate(rs, start, F.point());
    o.slice = start.slice;
    std::size_t base = 0;
    if (!o.slice) {
      std::optional<AffineRoot> best;
      for (const auto& g : cyc)
        if (in_delta_tilde(F.x(), F.point(), g) && (!best || g < *best)) best = g;
      if (!best) throw std::runtime_error("F-orbit of " + format_affine_root(rs, start) + " misses Delta~+ (x not elliptic)");
      base = static_cast<std::size_t>(std::find(cyc.begin(), cyc.end(), *best) - cyc.begin());
    }
    std::rotate(cyc.begin(), cyc.begin() + static_cast<long>(base), cyc.end());
    o.members = std::move(cyc);
    orbits.push_back(std::move(o));
  }
  std::sort(orbits.begin(), orbits.end(), [](const AffineOrbit& a, const AffineOrbit& b) {
    if (a.level != b.level) return a.level < b.level;
    if (a.slice != b.slice) return a.slice;
    return a.members.front() < b.members.front();
  });
  return orbits;
}

OrbitProfile sign_change_sequence(const AffineFrobenius& F, const AffineOrbit& orbit, const AffineRoot& base_f) {
  if (!in_minus_delta_tilde(F.x(), F.point(), base_f)) throw std::invalid_argument("base_f must lie in -Delta~+");
  auto it = std::find(orbit.members.begin(), orbit.members.end(), base_f);
  if (it == orbit.members.end()) throw std::invalid_argument("base_f is not in the orbit");
  OrbitProfile prof;
  prof.base_f = base_f;
  prof.orbit.push_back(base_f);
  for (AffineRoot g = F.apply(base_f); !(g == base_f); g = F.apply(g)) prof.orbit.push_back(g);
  const int N = static_cast<int>(prof.orbit.size());
  bool expect_minus = true;
  for (int k = 0; k < N; ++k) {
    const bool minus = in_minus_delta_tilde(F.x(), F.point(), prof.orbit[k]);
    const bool plus = in_delta_tilde(F.x(), F.point(), prof.orbit[k]);
    if (!minus && !plus) continue;
    if (minus != expect_minus) throw std::logic_error("sign changes along the orbit do not alternate");
    prof.a_sequence.push_back(k);
    expect_minus = !expect_minus;
  }
  if (!expect_minus) throw std::logic_error("sign-change sequence ends on -Delta~+");
  prof.a_sequence.push_back(N);
  return prof;
}

std::optional<OrbitProfile> orbit_profile(const AffineFrobenius& F, const AffineOrbit& orbit) {
  if (orbit.slice) return std::nullopt;
  for (const auto& g : orbit.members)
    if (in_minus_delta_tilde(F.x(), F.point(), g)) return sign_change_sequence(F, orbit, g);
  throw std::runtime_error("orbit misses -Delta~+");
}

void validate_howe_datum(const HoweDatum& h) {
  const RootSystem& rs = h.x.system();
  if (h.chain.empty()) throw std::invalid_argument("Howe chain is empty");
  if (h.depths.size() != h.chain.size()) throw std::invalid_argument("depths must list r_0 .. r_d");
  std::vector<int> all(static_cast<std::size_t>(rs.size()));
  for (int a = 0; a < rs.size(); ++a) all[a] = a;
  if (h.chain.back() != all) throw std::invalid_argument("last chain member must be the whole root system");
  for (std::size_t i = 0; i < h.chain.size(); ++i) {
    const auto& c = h.chain[i];
    if (!std::is_sorted(c.begin(), c.end())) throw std::invalid_argument("chain member " + std::to_string(i) + " is not sorted");
    if (!is_levi(rs, c)) throw std::invalid_argument("chain member " + std::to_string(i) + " is not a Levi subsystem");
    for (int a : c)
      if (!contains_sorted(c, h.x.act(a))) throw std::invalid_argument("chain member " + std::to_string(i) + " is not x-stable");
    if (i > 0) {
      const auto& prev = h.chain[i - 1];
      if (prev.size() >= c.size() || !std::includes(c.begin(), c.end(), prev.begin(), prev.end()))
        throw std::invalid_argument("chain is not strictly nested at " + std::to_string(i));
    }
  }
  const int d = h.d();
  if (h.depths[0] <= 0) throw std::invalid_argument("r_0 must be positive");
  for (int i = 1; i <= d; ++i) {
    const bool ok = i < d ? h.depths[i] > h.depths[i - 1] : h.depths[i] >= h.depths[i - 1];
    if (!ok) throw std::invalid_argument("depths must satisfy r_0 < ... < r_{d-1} <= r_d");
  }
}

HoweDatum howe_from_simple_subsets(const TwistedElement& x, const std::vector<std::vector<int>>& subsets,
                                   std::vector<Rational> depths) {
  HoweDatum h;
  h.x = x;
  for (const auto& s : subsets) h.chain.push_back(standard_levi(x.system(), s).roots);
  h.depths = std::move(depths);
  validate_howe_datum(h);
  return h;
}

HoweClass howe_classify(const HoweDatum& h, int alpha) {
  for (int i = 0; i <= h.d(); ++i)
    if (contains_sorted(h.chain[i], alpha)) return {i, h.depth(i - 1)};
  throw std::logic_error("chain does not exhaust the root system");
}

HoweSupport howe_support(const HoweDatum& h, const AffineRoot& f, const ApartmentPoint& p) {
  const RootSystem& rs = h.x.system();
  const Rational v = evaluate(rs, f, p);
  if (v < 0) throw std::invalid_argument("howe_support needs f(p) >= 0");
  HoweSupport s;
  if (f.slice) {
    s.in_K = true;
    s.in_K_plus = v > 0;
    s.in_H = v > 0;
    s.in_E = v > 0 && v > h.depth(h.d() - 1);
    return s;
  }
  const HoweClass c = howe_classify(h, f.alpha);
  const Rational theta = c.r / 2;
  s.in_K = v >= theta;
  s.in_K_plus = v > theta;
  s.in_H = c.i == 0 ? v > 0 : v >= theta;
  s.in_E = v > theta && v > 0;
  return s;
}

LevelLabels howe_levels(const HoweDatum& h, const Rational& r, const ApartmentPoint& p) {
  validate_howe_datum(h);
  if (r <= 0) throw std::invalid_argument("level r must be positive");
  const RootSystem& rs = h.x.system();
  const std::vector<int> M = h.d() >= 1 ? h.chain[static_cast<std::size_t>(h.d() - 1)] : std::vector<int>{};
  auto in_M = [&](const AffineRoot& f) { return f.slice || contains_sorted(M, f.alpha); };

  LevelLabels L;
  L.r = r;
  const auto all = build_affine_roots(rs, p, r);
  std::set<Rational> labels{Rational(0), r};
  for (const auto& f : all)
    if (!in_M(f)) labels.insert(evaluate(rs, f, p));
  L.s_values.assign(labels.begin(), labels.end());
  const int m = static_cast<int>(L.s_values.size()) - 1;
  L.symmetric = true;
  for (int i = 0; i <= m; ++i) L.symmetric = L.symmetric && L.s_values[i] + L.s_values[m - i] == r;

  L.partition.assign(static_cast<std::size_t>(m + 1), {});
  for (const auto& f : all) {
    const Rational v = evaluate(rs, f, p);
    if (v == Rational(0) && !f.slice) L.partition[0].push_back(f);
    if (v == r) L.partition[m].push_back(f);
    if (!in_M(f))
      for (int i = 1; i < m; ++i)
        if (v == L.s_values[i]) L.partition[i].push_back(f);
  }
  std::map<AffineRoot, int> hits;
  for (const auto& c : L.partition)
    for (const auto& f : c) ++hits[f];
  L.disjoint = std::all_of(hits.begin(), hits.end(), [](const auto& kv) { return kv.second == 1; });
  L.exhaustive = std::all_of(all.begin(), all.end(), [&](const AffineRoot& f) { return in_M(f) || hits.count(f); });

  if (r.denominator() != 1) throw std::invalid_argument("orbit pairing needs an integer level h = r");
  const long long hh = r.numerator();
  const AffineFrobenius F(h.x, p);
  std::set<AffineRoot> D;
  for (const auto& f : all) {
    const Rational v = evaluate(rs, f, p);
    if (!in_M(f) && v > 0 && v < r) D.insert(f);
  }
  std::map<AffineRoot, int> orbit_of;
  while (true) {
    auto it = std::find_if(D.begin(), D.end(), [&](const AffineRoot& f) { return !orbit_of.count(f); });
    if (it == D.end()) break;
    AffineOrbit o;
    o.level = evaluate(rs, *it, p);
    AffineRoot g = *it;
    do {
      if (!D.count(g)) throw std::logic_error("D is not F-stable");
      o.members.push_back(g);
      orbit_of[g] = -1;
      g = F.apply(g);
    } while (!(g == *it));
    L.orbits.push_back(std::move(o));
  }
  std::sort(L.orbits.begin(), L.orbits.end(), [](const AffineOrbit& a, const AffineOrbit& b) {
    if (a.level != b.level) return a.level < b.level;
    return *std::min_element(a.members.begin(), a.members.end()) < *std::min_element(b.members.begin(), b.members.end());
  });
  for (std::size_t i = 0; i < L.orbits.size(); ++i)
    for (const auto& f : L.orbits[i].members) orbit_of[f] = static_cast<int>(i);

  auto flat = [&](const AffineRoot& f) { return AffineRoot{false, rs.negate(f.alpha), hh - f.n}; };
  L.involution = true;
  L.middle_self_paired = true;
  std::vector<int> partner(L.orbits.size(), -1);
  for (std::size_t i = 0; i < L.orbits.size(); ++i) {
    const auto& o = L.orbits[i];
    const AffineRoot g0 = flat(o.members.front());
    auto it = orbit_of.find(g0);
    if (it == orbit_of.end()) {
      L.involution = false;
      continue;
    }
    const int j = it->second;
    std::set<AffineRoot> img, target(L.orbits[j].members.begin(), L.orbits[j].members.end());
    for (const auto& f : o.members) img.insert(flat(f));
    if (img != target) L.involution = false;
    partner[i] = j;
    L.pairs.push_back({static_cast<int>(i), j});
  }
  for (std::size_t i = 0; i < partner.size(); ++i) {
    if (partner[i] < 0 || partner[partner[i]] != static_cast<int>(i)) L.involution = false;
    if (L.orbits[i].level * 2 == r && partner[i] != static_cast<int>(i)) L.middle_self_paired = false;
  }
  return L;
}

HoweDatum random_howe_datum(const RootSystemPtr& rs, std::mt19937_64& rng, int max_depth) {
  const auto sigmas = diagram_automorphisms(*rs);
  const DiagramAut sigma = sigmas[rng() % sigmas.size()];
  std::vector<TwistedElement> pool;
  for (const auto& cls : enumerate_twisted_classes(rs, sigma))
    if (cls.elliptic)
      for (auto& x : convex_elements_of_class(cls)) pool.push_back(x);
  if (pool.empty()) throw std::logic_error("no convex elliptic element");
  HoweDatum h;
  h.x = pool[rng() % pool.size()];
  const auto W = enumerate_weyl_group(rs);
  std::vector<std::vector<int>> stable;
  for (const auto& L : enumerate_levi_subsystems(rs, W))
    if (levi_is_stable(L, h.x) && static_cast<int>(L.roots.size()) < rs->size()) stable.push_back(L.roots);

  std::vector<int> all(static_cast<std::size_t>(rs->size()));
  for (int a = 0; a < rs->size(); ++a) all[a] = a;
  const int want_d = static_cast<int>(rng() % 3);
  std::vector<std::vector<int>> down{all};
  for (int k = 0; k < want_d; ++k) {
    std::vector<const std::vector<int>*> cand;
    for (const auto& L : stable)
      if (L.size() < down.back().size() && std::includes(down.back().begin(), down.back().end(), L.begin(), L.end()))
        cand.push_back(&L);
    if (cand.empty()) break;
    down.push_back(*cand[rng() % cand.size()]);
  }
  h.chain.assign(down.rbegin(), down.rend());
  const int d = h.d();
  long long r = 0;
  for (int i = 0; i <= d; ++i) {
    const bool allow_equal = i == d && d > 0 && rng() % 3 == 0;
    r += allow_equal ? 0 : 1 + static_cast<long long>(rng() % static_cast<unsigned>(std::max(1, max_depth)));
    h.depths.push_back(Rational(r));
  }
  validate_howe_datum(h);
  return h;
}

}  // namespace convexdl
