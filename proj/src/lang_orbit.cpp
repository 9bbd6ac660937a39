#include "convexdl/lang_orbit.hpp"

#include <algorithm>

namespace convexdl {

void validate_profile(const LangProfile& p) {
  if (p.length < 1) throw std::invalid_argument("orbit length must be positive");
  if (p.a.size() < 3 || p.a.size() % 2 == 0) throw std::invalid_argument("marker sequence must have odd length 2b+1 with b >= 1");
  if (p.a.front() != 0 || p.a.back() != p.length) throw std::invalid_argument("markers must run from 0 to the orbit length");
  for (std::size_t i = 1; i < p.a.size(); ++i)
    if (p.a[i] <= p.a[i - 1]) throw std::invalid_argument("markers must be strictly increasing");
}

std::vector<Elem> lang_map_orbit(const Field& f, const std::vector<Elem>& v) {
  const std::size_t n = v.size();
  std::vector<Elem> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = f.sub(f.frob(v[(i + n - 1) % n]), v[i]);
  return out;
}

LangCheckReport lang_orbit_values(const LangProfile& p, const Field& f, const std::vector<Elem>& vec) {
  validate_profile(p);
  if (static_cast<int>(vec.size()) != p.length) throw std::invalid_argument("vector length differs from orbit length");
  const int b = p.b();
  std::vector<char> even(static_cast<std::size_t>(p.length), 0);
  for (int i = 0; i < b; ++i) even[p.a[2 * i]] = 1;
  const auto L = lang_map_orbit(f, vec);
  for (int j = 0; j < p.length; ++j)
    if (!even[j] && L[j] != 0)
      throw PreconditionError("L(x) is nonzero at position " + std::to_string(j) + ", which is not an even marker");

  LangCheckReport rep;
  auto fail = [&](const std::string& s) { rep.failures.push_back(s); };
  // Propagation: x_j = x_{a_{2i}}^{q^{j - a_{2i}}} on each block.
  for (int i = 0; i < b; ++i)
    for (int j = p.a[2 * i]; j < p.a[2 * i + 2]; ++j)
      if (vec[j] != f.frob_pow(vec[p.a[2 * i]], j - p.a[2 * i])) fail("propagation at j=" + std::to_string(j));
  // Clause (1), first formula.
  {
    const int last = p.a[2 * b - 2];
    const Elem expect = f.sub(f.frob_pow(vec[last], p.length - last), vec[0]);
    if (L[0] != expect) fail("L(x)_f formula");
  }
  // Clause (1), intermediate even markers.
  for (int i = 1; i < b; ++i) {
    const int cur = p.a[2 * i], prev = p.a[2 * i - 2];
    const Elem expect = f.sub(f.frob_pow(vec[prev], cur - prev), vec[cur]);
    if (L[cur] != expect) fail("L(x)_{a_" + std::to_string(2 * i) + "} formula");
  }
  // Clause (1), vanishing off the markers.
  for (int j = 0; j < p.length; ++j)
    if (!even[j] && L[j] != 0) fail("L(x) nonzero off markers at " + std::to_string(j));
  // Clause (2).
  const bool all_zero = std::all_of(vec.begin(), vec.end(), [](Elem e) { return e == 0; });
  bool markers_zero = true;
  for (int i = 0; i < b; ++i) markers_zero = markers_zero && vec[p.a[2 * i]] == 0;
  if (all_zero != markers_zero) fail("zero characterization");
  return rep;
}

std::vector<Elem> sample_lang_hypothesis(const LangProfile& p, const Field& f, std::mt19937_64& rng) {
  validate_profile(p);
  std::vector<Elem> v(static_cast<std::size_t>(p.length), 0);
  for (int i = 0; i < p.b(); ++i) {
    const Elem seed = static_cast<Elem>(rng() % static_cast<unsigned>(f.size()));
    for (int j = p.a[2 * i]; j < p.a[2 * i + 2]; ++j) v[j] = f.frob_pow(seed, j - p.a[2 * i]);
  }
  return v;
}

}  // namespace convexdl
