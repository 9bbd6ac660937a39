#include "instance_io.hpp"

#include <algorithm>
#include <sstream>

namespace convexdl {

namespace {
std::string join_errors(const std::vector<std::string>& e) {
  std::string s;
  for (const auto& x : e) s += (s.empty() ? "" : "\n") + x;
  return s;
}
}  // namespace

UsageError::UsageError(std::vector<std::string> e) : std::runtime_error(join_errors(e)), errors(std::move(e)) {}

namespace io {

std::string join(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string join(const std::string& path, std::size_t index) { return path + "/" + std::to_string(index); }

void Schema::finish() const {
  if (!errors_.empty()) throw UsageError(errors_);
}

const Json* Schema::get(const Json& obj, const std::string& path, const std::string& key, bool required) {
  if (!obj.is_object()) {
    fail(path, "expected an object");
    return nullptr;
  }
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) fail(join(path, key), "missing");
    return nullptr;
  }
  return &*it;
}

std::optional<long long> Schema::integer(const Json& obj, const std::string& path, const std::string& key, long long lo,
                                         long long hi, std::optional<long long> fallback) {
  const Json* v = get(obj, path, key, !fallback.has_value());
  if (!v) return fallback;
  if (!v->is_number_integer()) {
    fail(join(path, key), "expected an integer");
    return std::nullopt;
  }
  const auto x = v->get<long long>();
  if (x < lo || x > hi) {
    fail(join(path, key), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return std::nullopt;
  }
  return x;
}

std::optional<bool> Schema::boolean(const Json& obj, const std::string& path, const std::string& key,
                                    std::optional<bool> fallback) {
  const Json* v = get(obj, path, key, !fallback.has_value());
  if (!v) return fallback;
  if (!v->is_boolean()) {
    fail(join(path, key), "expected a boolean");
    return std::nullopt;
  }
  return v->get<bool>();
}

std::optional<std::vector<int>> Schema::int_list(const Json& v, const std::string& path) {
  if (!v.is_array()) {
    fail(path, "expected an array of integers");
    return std::nullopt;
  }
  std::vector<int> out;
  bool good = true;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number_integer() || v[i].get<long long>() < -(1LL << 30) || v[i].get<long long>() > (1LL << 30)) {
      fail(join(path, i), "expected an integer");
      good = false;
      continue;
    }
    out.push_back(v[i].get<int>());
  }
  if (!good) return std::nullopt;
  return out;
}

void Schema::reject_unknown(const Json& obj, const std::string& path, const std::vector<std::string>& allowed) {
  if (!obj.is_object()) return;
  for (const auto& [k, _] : obj.items())
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) fail(join(path, k), "unknown key");
}

std::vector<int> weyl_word(const TwistedElement& x) {
  const RootSystem& rs = x.system();
  std::vector<int> w = x.w_action();
  std::vector<int> rev;
  for (;;) {
    int i = 0;
    while (i < rs.rank() && rs.is_positive(w[static_cast<std::size_t>(i)])) ++i;
    if (i == rs.rank()) break;
    // w = w' s_i with l(w') = l(w) - 1.
    const auto& s = rs.simple_reflection(i);
    std::vector<int> next(w.size());
    for (std::size_t a = 0; a < w.size(); ++a) next[a] = w[static_cast<std::size_t>(s[a])];
    w = std::move(next);
    rev.push_back(i + 1);
  }
  return {rev.rbegin(), rev.rend()};
}

Json cartan_json(const RootSystem& rs) {
  if (rs.datum().series != "custom") return rs.datum().series;
  return Json{{"cartan_matrix", rs.datum().cartan_matrix}};
}

RootSystemPtr read_cartan(Schema& s, const Json& v, const std::string& path) {
  try {
    if (v.is_string()) return build_root_system(v.get<std::string>());
    if (v.is_object() && v.contains("cartan_matrix")) {
      const Json& m = v["cartan_matrix"];
      IntMatrix mat;
      if (!m.is_array()) {
        s.fail(join(path, "cartan_matrix"), "expected an array of rows");
        return nullptr;
      }
      for (std::size_t i = 0; i < m.size(); ++i) {
        auto row = s.int_list(m[i], join(join(path, "cartan_matrix"), i));
        if (!row) return nullptr;
        mat.push_back(*row);
      }
      return build_root_system(cartan_from_matrix(mat));
    }
    s.fail(path, "expected a Cartan code or {\"cartan_matrix\": ...}");
  } catch (const std::invalid_argument& e) {
    s.fail(path, e.what());
  }
  return nullptr;
}

std::optional<DiagramAut> read_sigma(Schema& s, const RootSystem& rs, const Json& v, const std::string& path) {
  auto perm = s.int_list(v, path);
  if (!perm) return std::nullopt;
  try {
    return make_diagram_aut(rs, *perm);
  } catch (const std::invalid_argument& e) {
    s.fail(path, e.what());
  }
  return std::nullopt;
}

Json element_json(const TwistedElement& x) { return Json{{"word", weyl_word(x)}, {"sigma_power", x.sigma_power()}}; }

std::optional<TwistedElement> read_element(Schema& s, const RootSystemPtr& rs, const DiagramAut& sigma, const Json& v,
                                           const std::string& path) {
  const Json* w = s.get(v, path, "word");
  const auto k = s.integer(v, path, "sigma_power", 0, 64, 0);
  s.reject_unknown(v, path, {"word", "sigma_power"});
  if (!w || !k) return std::nullopt;
  auto word = s.int_list(*w, join(path, "word"));
  if (!word) return std::nullopt;
  for (std::size_t i = 0; i < word->size(); ++i)
    if ((*word)[i] < 1 || (*word)[i] > rs->rank()) {
      s.fail(join(join(path, "word"), i), "simple reflection label out of range");
      return std::nullopt;
    }
  return TwistedElement::from_word(rs, *word, sigma, static_cast<int>(*k));
}

Json field_json(const Field& f) { return Json{{"q", f.q()}, {"m", f.m()}, {"modulus", f.modulus()}}; }

std::optional<FieldSpec> read_field(Schema& s, const Json& v, const std::string& path) {
  const auto q = s.integer(v, path, "q", 2, 64);
  const auto m = s.integer(v, path, "m", 1, 6);
  std::vector<int> modulus;
  if (const Json* mod = s.get(v, path, "modulus", false)) {
    auto c = s.int_list(*mod, join(path, "modulus"));
    if (c) modulus = *c;
  }
  s.reject_unknown(v, path, {"q", "m", "modulus"});
  if (!q || !m) return std::nullopt;
  FieldSpec spec{static_cast<int>(*q), static_cast<int>(*m), modulus};
  try {
    Field f(spec);
  } catch (const std::exception& e) {
    s.fail(path, e.what());
    return std::nullopt;
  }
  return spec;
}

Json elem_json(const Field& f, Elem a) { return f.coeffs(a); }

std::optional<Elem> read_elem(Schema& s, const Field& f, const Json& v, const std::string& path) {
  auto c = s.int_list(v, path);
  if (!c) return std::nullopt;
  try {
    return f.from_coeffs(*c);
  } catch (const FieldError& e) {
    s.fail(path, e.what());
  }
  return std::nullopt;
}

Json vector_json(const Field& f, const HAVector& v) {
  Json out = Json::object();
  for (std::size_t a = 0; a < v.entries.size(); ++a)
    if (v.entries[a] != 0) out[std::to_string(a)] = elem_json(f, v.entries[a]);
  return out;
}

std::optional<HAVector> read_vector(Schema& s, const Field& f, int num_roots, const Json& v, const std::string& path) {
  if (!v.is_object()) {
    s.fail(path, "expected a {root index: coefficients} object");
    return std::nullopt;
  }
  HAVector out{std::vector<Elem>(static_cast<std::size_t>(num_roots), 0)};
  bool good = true;
  for (const auto& [key, val] : v.items()) {
    int idx = -1;
    std::istringstream is(key);
    if (!(is >> idx) || !is.eof() || idx < 0 || idx >= num_roots) {
      s.fail(join(path, key), "not a root index");
      good = false;
      continue;
    }
    auto e = read_elem(s, f, val, join(path, key));
    if (!e) {
      good = false;
      continue;
    }
    out.entries[static_cast<std::size_t>(idx)] = *e;
  }
  if (!good) return std::nullopt;
  return out;
}

Json setup_json(const HASetupInput& in) {
  const Field f(in.field);
  Json c = Json::array();
  for (Elem e : in.ad_coefficients) c.push_back(elem_json(f, e));
  Json k = Json::array();
  for (const auto& [key, e] : in.ad_constants)
    k.push_back(Json{{"alpha", std::get<0>(key)}, {"beta", std::get<1>(key)}, {"i", std::get<2>(key)}, {"c", elem_json(f, e)}});
  return Json{{"x", element_json(in.x)}, {"A", in.A}, {"B", in.B}, {"ad_coefficients", c}, {"ad_constants", k}};
}

std::optional<HASetupInput> read_setup(Schema& s, const RootSystemPtr& rs, const DiagramAut& sigma, const FieldSpec& fs,
                                       const Json& v, const std::string& path) {
  s.reject_unknown(v, path, {"x", "A", "B", "ad_coefficients", "ad_constants"});
  HASetupInput in;
  in.field = fs;
  const Field f(fs);
  const Json* x = s.get(v, path, "x");
  const Json* A = s.get(v, path, "A");
  const Json* B = s.get(v, path, "B");
  const Json* C = s.get(v, path, "ad_coefficients");
  const Json* K = s.get(v, path, "ad_constants", false);
  if (!x || !A || !B || !C) return std::nullopt;
  auto xe = read_element(s, rs, sigma, *x, join(path, "x"));
  auto a = s.int_list(*A, join(path, "A"));
  auto b = s.int_list(*B, join(path, "B"));
  if (!C->is_array()) s.fail(join(path, "ad_coefficients"), "expected an array");
  if (!xe || !a || !b || !C->is_array()) return std::nullopt;
  in.x = *xe;
  in.A = *a;
  in.B = *b;
  for (std::size_t i = 0; i < C->size(); ++i) {
    auto e = read_elem(s, f, (*C)[i], join(join(path, "ad_coefficients"), i));
    if (e) in.ad_coefficients.push_back(*e);
  }
  if (K) {
    if (!K->is_array()) s.fail(join(path, "ad_constants"), "expected an array");
    else
      for (std::size_t i = 0; i < K->size(); ++i) {
        const std::string p = join(join(path, "ad_constants"), i);
        const auto al = s.integer((*K)[i], p, "alpha", 0, rs->size() - 1);
        const auto be = s.integer((*K)[i], p, "beta", 0, rs->size() - 1);
        const auto ii = s.integer((*K)[i], p, "i", 1, 4);
        const Json* c = s.get((*K)[i], p, "c");
        if (!al || !be || !ii || !c) continue;
        auto e = read_elem(s, f, *c, join(p, "c"));
        if (e) in.ad_constants[{static_cast<int>(*al), static_cast<int>(*be), static_cast<int>(*ii)}] = *e;
      }
  }
  if (!s.ok()) return std::nullopt;
  try {
    HASetup check(in);
  } catch (const std::exception& e) {
    s.fail(path, e.what());
    return std::nullopt;
  }
  return in;
}

Json rationals_json(const std::vector<Rational>& v) {
  Json out = Json::array();
  for (const auto& r : v) out.push_back(format_rational(r));
  return out;
}

std::optional<std::vector<Rational>> read_rationals(Schema& s, const Json& v, const std::string& path) {
  if (!v.is_array()) {
    s.fail(path, "expected an array of rationals");
    return std::nullopt;
  }
  std::vector<Rational> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    try {
      if (v[i].is_number_integer()) out.emplace_back(v[i].get<long long>());
      else if (v[i].is_string()) out.push_back(parse_rational(v[i].get<std::string>()));
      else throw std::invalid_argument("expected \"p/q\" or an integer");
    } catch (const std::exception& e) {
      s.fail(join(path, i), e.what());
      return std::nullopt;
    }
  }
  return out;
}

Json howe_json(const HoweDatum& h) {
  return Json{{"sigma", h.x.sigma().perm}, {"x", element_json(h.x)}, {"chain", h.chain}, {"depths", rationals_json(h.depths)}};
}

std::optional<HoweDatum> read_howe(Schema& s, const RootSystemPtr& rs, const Json& v, const std::string& path) {
  s.reject_unknown(v, path, {"sigma", "x", "chain", "depths"});
  const Json* sg = s.get(v, path, "sigma");
  const Json* x = s.get(v, path, "x");
  const Json* ch = s.get(v, path, "chain");
  const Json* dp = s.get(v, path, "depths");
  if (!sg || !x || !ch || !dp) return std::nullopt;
  auto sigma = read_sigma(s, *rs, *sg, join(path, "sigma"));
  if (!sigma) return std::nullopt;
  auto xe = read_element(s, rs, *sigma, *x, join(path, "x"));
  auto depths = read_rationals(s, *dp, join(path, "depths"));
  if (!ch->is_array()) s.fail(join(path, "chain"), "expected an array of root lists");
  if (!xe || !depths || !ch->is_array()) return std::nullopt;
  HoweDatum h;
  h.x = *xe;
  h.depths = *depths;
  for (std::size_t i = 0; i < ch->size(); ++i) {
    auto roots = s.int_list((*ch)[i], join(join(path, "chain"), i));
    if (!roots) return std::nullopt;
    for (int a : *roots)
      if (a < 0 || a >= rs->size()) {
        s.fail(join(join(path, "chain"), i), "root index out of range");
        return std::nullopt;
      }
    h.chain.push_back(*roots);
  }
  try {
    validate_howe_datum(h);
  } catch (const std::invalid_argument& e) {
    s.fail(path, e.what());
    return std::nullopt;
  }
  return h;
}

}  // namespace io
}  // namespace convexdl
