#include "convexdl/cli_reports.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "convexdl/affine.hpp"
#include "convexdl/convexity.hpp"
#include "convexdl/group_models.hpp"
#include "convexdl/lang_orbit.hpp"
#include "instance_io.hpp"

namespace convexdl {

using io::join;
using io::Schema;

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"affine",  "convexity",      "group",    "howe",
                                              "lang_orbit", "standard", "steinberg", "uniformization"};
  return names;
}

bool is_suite(const std::string& name) {
  const auto& n = suite_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

std::uint64_t instance_seed(std::uint64_t seed, const std::string& suite, std::uint64_t index) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : suite + ":" + std::to_string(index)) h = (h ^ c) * 1099511628211ULL;
  std::uint64_t z = seed + h + 0x9e3779b97f4a7c15ULL;  // splitmix64 finalizer
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

int default_jobs() {
  if (const char* env = std::getenv("CONVEXDL_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v <= 1024) return static_cast<int>(v);
  }
  return 1;
}

void write_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    if (!out.flush()) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::vector<std::string> json_diff(const Json& expected, const Json& actual, const std::string& path) {
  std::vector<std::string> out;
  const std::string here = path.empty() ? "/" : path;
  if (expected.is_object() && actual.is_object()) {
    std::set<std::string> keys;
    for (const auto& [k, _] : expected.items()) keys.insert(k);
    for (const auto& [k, _] : actual.items()) keys.insert(k);
    for (const auto& k : keys) {
      const std::string p = path + "/" + k;
      if (!expected.contains(k)) out.push_back(p + ": unexpected, got " + actual[k].dump());
      else if (!actual.contains(k)) out.push_back(p + ": expected " + expected[k].dump() + ", missing");
      else {
        auto sub = json_diff(expected[k], actual[k], p);
        out.insert(out.end(), sub.begin(), sub.end());
      }
    }
    return out;
  }
  if (expected.is_array() && actual.is_array() && expected.size() == actual.size()) {
    for (std::size_t i = 0; i < expected.size(); ++i) {
      auto sub = json_diff(expected[i], actual[i], path + "/" + std::to_string(i));
      out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
  }
  if (expected != actual) out.push_back(here + ": expected " + expected.dump() + ", got " + actual.dump());
  return out;
}

// ---------------------------------------------------------------- config

namespace {

const std::vector<std::string> kConfigKeys{"types", "suites", "field_grid", "budgets", "seed", "group_model", "output", "csv"};

}  // namespace

ScanConfig parse_scan_config(const Json& j) {
  Schema s;
  ScanConfig c;
  c.echo = j;
  if (!j.is_object()) {
    s.fail("", "config must be a JSON object");
    s.finish();
  }
  s.reject_unknown(j, "", kConfigKeys);

  if (const Json* seed = s.get(j, "", "seed")) {
    if (!seed->is_number_unsigned() && !(seed->is_number_integer() && seed->get<long long>() >= 0))
      s.fail("/seed", "expected a non-negative 64-bit integer");
    else c.seed = seed->get<std::uint64_t>();
  }

  if (const Json* su = s.get(j, "", "suites")) {
    if (!su->is_array() || su->empty()) s.fail("/suites", "expected a non-empty array of suite names");
    else
      for (std::size_t i = 0; i < su->size(); ++i) {
        const Json& v = (*su)[i];
        if (!v.is_string() || !is_suite(v.get<std::string>())) s.fail(join("/suites", i), "unknown suite " + v.dump());
        else if (std::find(c.suites.begin(), c.suites.end(), v.get<std::string>()) == c.suites.end())
          c.suites.push_back(v.get<std::string>());
      }
  }

  const bool needs_types =
      std::any_of(c.suites.begin(), c.suites.end(), [](const std::string& n) { return n != "group"; });
  if (const Json* ty = s.get(j, "", "types", needs_types)) {
    if (!ty->is_array()) s.fail("/types", "expected an array");
    else
      for (std::size_t i = 0; i < ty->size(); ++i) {
        const std::string p = join("/types", i);
        const Json& v = (*ty)[i];
        TypeEntry e;
        Json cartan = v;
        const Json* sig = nullptr;
        if (v.is_object() && (v.contains("code") || v.contains("sigma"))) {
          s.reject_unknown(v, p, {"code", "cartan_matrix", "sigma"});
          cartan = v.contains("code") ? v["code"] : Json{{"cartan_matrix", v.value("cartan_matrix", Json())}};
          sig = v.contains("sigma") ? &v["sigma"] : nullptr;
        }
        auto rs = io::read_cartan(s, cartan, v.is_object() && v.contains("code") ? join(p, "code") : p);
        if (!rs) continue;
        e.cartan = io::cartan_json(*rs);
        if (sig && !(sig->is_string() && sig->get<std::string>() == "all")) {
          if (!sig->is_array()) s.fail(join(p, "sigma"), "expected \"all\" or an array of permutations");
          else {
            std::vector<std::vector<int>> perms;
            for (std::size_t k = 0; k < sig->size(); ++k)
              if (auto d = io::read_sigma(s, *rs, (*sig)[k], join(join(p, "sigma"), k))) perms.push_back(d->perm);
            e.sigmas = perms;
          }
        }
        c.types.push_back(e);
      }
  }

  c.field_grid = {{2, 1}};
  if (const Json* fg = s.get(j, "", "field_grid", false)) {
    c.field_grid.clear();
    if (!fg->is_array() || fg->empty()) s.fail("/field_grid", "expected a non-empty array of [q, m] pairs");
    else
      for (std::size_t i = 0; i < fg->size(); ++i) {
        const Json& v = (*fg)[i];
        if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) {
          s.fail(join("/field_grid", i), "expected [q, m]");
          continue;
        }
        const Json spec{{"q", v[0]}, {"m", v[1]}};
        if (io::read_field(s, spec, join("/field_grid", i)))
          c.field_grid.emplace_back(v[0].get<int>(), v[1].get<int>());
      }
  }

  if (const Json* b = s.get(j, "", "budgets", false)) {
    const std::string p = "/budgets";
    s.reject_unknown(*b, p,
                     {"enumeration_bits", "instances", "round_trips", "lang_samples", "howe_data", "howe_max_depth",
                      "standard_max_rank", "group_elements", "affine_bound"});
    Budgets& B = c.budgets;
    auto set = [&](const char* key, int& field, long long hi) {
      if (auto v = s.integer(*b, p, key, 1, hi, field)) field = static_cast<int>(*v);
    };
    set("enumeration_bits", B.enumeration_bits, 24);
    set("instances", B.instances, 1'000'000);
    set("round_trips", B.round_trips, 1'000'000);
    set("lang_samples", B.lang_samples, 10'000'000);
    set("howe_data", B.howe_data, 100'000);
    set("howe_max_depth", B.howe_max_depth, 16);
    set("standard_max_rank", B.standard_max_rank, kMaxRank);
    if (auto v = s.integer(*b, p, "group_elements", 1, 1LL << 40, static_cast<long long>(B.group_elements)))
      B.group_elements = static_cast<std::uint64_t>(*v);
    if (const Json* ab = s.get(*b, p, "affine_bound", false)) {
      auto r = io::read_rationals(s, Json::array({*ab}), join(p, "affine_bound"));
      if (r && (*r)[0] <= Rational(0)) s.fail(join(p, "affine_bound"), "must be positive");
      else if (r) B.affine_bound = format_rational((*r)[0]);
    }
  }

  if (const Json* g = s.get(j, "", "group_model", false)) {
    c.group_models = g->is_array() ? *g : Json::array({*g});
    for (std::size_t i = 0; i < c.group_models.size(); ++i) {
      const Json& m = c.group_models[i];
      const std::string p = g->is_array() ? join("/group_model", i) : std::string("/group_model");
      s.reject_unknown(m, p, {"n", "q", "m", "psi_scalars", "cross_section", "point_sets"});
      s.integer(m, p, "n", 2, kMaxMatrixSize);
      const auto q = s.integer(m, p, "q", 2, 64);
      const auto mm = s.integer(m, p, "m", 1, 6, 1);
      s.boolean(m, p, "cross_section", true);
      if (q && mm) io::read_field(s, Json{{"q", *q}, {"m", *mm}}, p);
      if (const Json* ps = s.get(m, p, "point_sets", false)) {
        if (!ps->is_array()) s.fail(join(p, "point_sets"), "expected an array");
        else
          for (std::size_t k = 0; k < ps->size(); ++k) {
            const std::string pp = join(join(p, "point_sets"), k);
            s.reject_unknown((*ps)[k], pp, {"r", "m", "twist", "howe"});
            s.integer((*ps)[k], pp, "r", 0, kMaxLevel);
            s.integer((*ps)[k], pp, "m", 0, 6, 0);
          }
      }
    }
    if (std::find(c.suites.begin(), c.suites.end(), "group") == c.suites.end() && !c.group_models.empty())
      s.fail("/group_model", "given but the group suite is not selected");
  } else if (std::find(c.suites.begin(), c.suites.end(), "group") != c.suites.end()) {
    s.fail("/group_model", "missing; required by the group suite");
  }

  if (const Json* o = s.get(j, "", "output", false)) {
    if (!o->is_string() || o->get<std::string>().empty()) s.fail("/output", "expected a path");
    else c.output = o->get<std::string>();
  }
  if (const Json* o = s.get(j, "", "csv", false)) {
    if (!o->is_string() || o->get<std::string>().empty()) s.fail("/csv", "expected a path");
    else c.csv = o->get<std::string>();
  }
  s.finish();
  return c;
}

// ---------------------------------------------------------------- instances

namespace {

const std::string kRoot = "/instance";

struct Header {
  RootSystemPtr rs;
  DiagramAut sigma;
};

std::optional<Header> read_header(Schema& s, const Json& inst, bool with_sigma = true) {
  const Json* t = s.get(inst, kRoot, "type");
  if (!t) return std::nullopt;
  auto rs = io::read_cartan(s, *t, join(kRoot, "type"));
  if (!rs) return std::nullopt;
  if (!with_sigma) return Header{rs, identity_aut(rs->rank())};
  const Json* sg = s.get(inst, kRoot, "sigma");
  if (!sg) return std::nullopt;
  auto sigma = io::read_sigma(s, *rs, *sg, join(kRoot, "sigma"));
  if (!sigma) return std::nullopt;
  return Header{rs, *sigma};
}

std::uint64_t ipow(std::uint64_t b, std::size_t e) {
  std::uint64_t r = 1;
  while (e--) r *= b;
  return r;
}

std::vector<TwistedElement> convex_pool(const RootSystemPtr& rs, const DiagramAut& sigma) {
  std::vector<TwistedElement> pool;
  for (const auto& cls : enumerate_twisted_classes(rs, sigma))
    if (cls.elliptic)
      for (auto& x : convex_elements_of_class(cls)) pool.push_back(x);
  return pool;
}

HAVector random_on(const HASetup& S, const std::vector<int>& roots, std::mt19937_64& rng) {
  HAVector v = S.zero();
  for (int a : roots) v.entries[static_cast<std::size_t>(a)] = static_cast<Elem>(rng() % S.field().size());
  return v;
}

Outcome run_convexity(const Json& inst) {
  Schema s;
  s.reject_unknown(inst, kRoot, {"type", "sigma"});
  auto h = read_header(s, inst);
  s.finish();
  const auto classes = enumerate_twisted_classes(h->rs, h->sigma);
  Json counts = Json::array(), missing = Json::array();
  int elliptic = 0;
  long mixed = 0, harness = 0;
  bool inverse_ok = true;
  for (std::size_t ci = 0; ci < classes.size(); ++ci) {
    const auto& cls = classes[ci];
    if (!cls.elliptic) continue;
    ++elliptic;
    const auto flags = class_convexity_flags(cls);
    long count = 0;
    for (std::size_t k = 0; k < flags.size(); ++k) {
      const auto& x = cls.members[k];
      if (is_convex(twisted_inverse(x)) != static_cast<bool>(flags[k])) inverse_ok = false;
      if (is_convex(x, PairDomain::AllPairs) != static_cast<bool>(flags[k])) ++mixed;
      if (!flags[k]) continue;
      ++count;
      harness += static_cast<long>(subadditive_check(x).size() + ordering_check(x).size());
    }
    counts.push_back(count);
    if (count == 0) missing.push_back(ci);
  }
  Outcome o;
  o.observed = {{"classes", classes.size()},     {"elliptic_classes", elliptic}, {"convex_counts", counts},
                {"classes_without_convex", missing}, {"inverse_agreement", inverse_ok}, {"harness_violations", harness},
                {"mixed_pair_verdict_changes", mixed}};
  o.pass = missing.empty() && inverse_ok && harness == 0;
  return o;
}

Outcome run_standard(const Json& inst) {
  Schema s;
  s.reject_unknown(inst, kRoot, {"type", "sigma"});
  auto h = read_header(s, inst);
  s.finish();
  const auto W = enumerate_weyl_group(h->rs);
  const auto levis = enumerate_levi_subsystems(h->rs, W);
  const auto classes = enumerate_twisted_classes(h->rs, h->sigma);
  long pairs = 0;
  Json failures = Json::array();
  for (std::size_t ci = 0; ci < classes.size(); ++ci) {
    if (!classes[ci].elliptic) continue;
    for (std::size_t k = 0; k < classes[ci].members.size(); ++k) {
      const auto& x0 = classes[ci].members[k];
      for (std::size_t li = 0; li < levis.size(); ++li) {
        if (!levi_is_stable(levis[li], x0)) continue;
        ++pairs;
        const auto r = find_standard_convex(h->rs, h->sigma, levis[li], x0, W);
        if (!(r.levi_is_standard && r.x_convex))
          failures.push_back(Json{{"class", ci}, {"member", k}, {"levi", levis[li].roots},
                                  {"levi_is_standard", r.levi_is_standard}, {"x_convex", r.x_convex}});
      }
    }
  }
  Outcome o;
  o.observed = {{"pairs", pairs}, {"failures", failures}};
  o.pass = failures.empty();
  return o;
}

struct SetupInstance {
  HASetupInput input;
  int bits = 0;
};

std::optional<SetupInstance> read_setup_instance(Schema& s, const Json& inst) {
  auto h = read_header(s, inst);
  const Json* f = s.get(inst, kRoot, "field");
  const Json* st = s.get(inst, kRoot, "setup");
  const auto bits = s.integer(inst, kRoot, "budget_bits", 1, 24);
  if (!h || !f || !st || !bits) return std::nullopt;
  auto fs = io::read_field(s, *f, join(kRoot, "field"));
  if (!fs) return std::nullopt;
  auto in = io::read_setup(s, h->rs, h->sigma, *fs, *st, join(kRoot, "setup"));
  if (!in) return std::nullopt;
  return SetupInstance{*in, static_cast<int>(*bits)};
}

Outcome run_uniformization(const Json& inst) {
  Schema s;
  s.reject_unknown(inst, kRoot, {"type", "sigma", "field", "setup", "budget_bits", "z", "boundary"});
  auto si = read_setup_instance(s, inst);
  const Json* zj = s.get(inst, kRoot, "z");
  const Json* bj = s.get(inst, kRoot, "boundary");
  s.finish();
  const HASetup S(si->input);
  const int N = S.system().size();
  auto z = io::read_vector(s, S.field(), N, *zj, join(kRoot, "z"));
  auto boundary = io::read_vector(s, S.field(), N, *bj, join(kRoot, "boundary"));
  if (z && !supported_on(*z, S.A())) s.fail(join(kRoot, "z"), "support must lie in A");
  if (boundary && !supported_on(*boundary, S.A_delta())) s.fail(join(kRoot, "boundary"), "support must lie in A cap Delta_x");
  if (!S.convex()) s.fail(join(join(kRoot, "setup"), "x"), "x must be convex");
  s.finish();

  Outcome o;
  std::vector<HAVector> pts;
  try {
    pts = enumerate_V(S, *z, si->bits);
  } catch (const BudgetRefused& e) {
    o.refused = true;
    o.observed = {{"refused_bits", e.required_bits}};
    return o;
  }
  const HAVector w = solve_uniformization(S, *z, *boundary);
  const auto Q = static_cast<std::uint64_t>(S.field().size());
  const std::uint64_t expected = ipow(Q, S.A_delta().size());
  auto project = [&](const HAVector& v) {
    std::vector<Elem> p;
    for (int a : S.A_delta()) p.push_back(v.entries[static_cast<std::size_t>(a)]);
    return p;
  };
  std::set<std::vector<Elem>> proj;
  long matching = 0;
  bool oracle_agrees = false;
  const auto want = project(*boundary);
  for (const auto& p : pts) {
    const auto key = project(p);
    proj.insert(key);
    if (key == want) {
      ++matching;
      oracle_agrees = p == w;
    }
  }
  const bool bijective = proj.size() == pts.size() && pts.size() == expected;
  const bool matches = matching == 1 && oracle_agrees;
  o.observed = {{"w", io::vector_json(S.field(), w)},
                {"points", pts.size()},
                {"expected_points", expected},
                {"projection_bijective", bijective},
                {"solver_matches_oracle", matches},
                {"residual_in_target", in_V(S, *z, w)}};
  o.pass = bijective && matches && in_V(S, *z, w);
  return o;
}

Outcome run_steinberg(const Json& inst) {
  Schema s;
  s.reject_unknown(inst, kRoot, {"type", "sigma", "field", "setup", "budget_bits", "round_trips", "seed"});
  auto si = read_setup_instance(s, inst);
  const auto trips = s.integer(inst, kRoot, "round_trips", 0, 10'000'000);
  const Json* sj = s.get(inst, kRoot, "seed");
  if (sj && !sj->is_number_unsigned() && !(sj->is_number_integer() && sj->get<long long>() >= 0))
    s.fail(join(kRoot, "seed"), "expected a non-negative integer");
  s.finish();
  const HASetup S(si->input);
  if (!S.convex()) s.fail(join(join(kRoot, "setup"), "x"), "x must be convex");
  s.finish();

  Outcome o;
  BijectivityReport rep;
  try {
    rep = steinberg_bijectivity(S, si->bits);
  } catch (const BudgetRefused& e) {
    o.refused = true;
    o.observed = {{"refused_bits", e.required_bits}};
    return o;
  }
  std::mt19937_64 rng(sj->get<std::uint64_t>());
  long failures = 0;
  int depth = 0;
  int bound = 0;
  for (int a = 0; a < S.system().num_positive(); ++a) bound = std::max(bound, S.n_x()[static_cast<std::size_t>(a)]);
  for (long t = 0; t < *trips; ++t) {
    const HAVector target = random_on(S, S.x_A_pos(), rng);
    const auto pre = invert_steinberg(S, target);
    depth = std::max(depth, pre.depth);
    const bool ok = supported_on(pre.z, S.P()) && supported_on(pre.y, S.A_minus_delta()) &&
                    steinberg_linear_map(S, pre.z, pre.y) == target;
    if (!ok) ++failures;
  }
  o.observed = {{"bijective", rep.bijective},
                {"cardinality_identity", rep.cardinality_identity},
                {"domain_size", rep.domain_size},
                {"distinct_images", rep.distinct_images},
                {"round_trip_failures", failures},
                {"max_depth", depth},
                {"depth_within_bound", depth <= bound}};
  o.pass = rep.bijective && rep.cardinality_identity && failures == 0 && depth <= bound;
  return o;
}

Outcome run_group_cross_section(Schema& s, const Json& inst) {
  s.reject_unknown(inst, kRoot, {"kind", "type", "sigma", "x", "field", "psi_scalars"});
  auto h = read_header(s, inst);
  const Json* xj = s.get(inst, kRoot, "x");
  const Json* fj = s.get(inst, kRoot, "field");
  const Json* pj = s.get(inst, kRoot, "psi_scalars");
  s.finish();
  auto x = io::read_element(s, h->rs, h->sigma, *xj, join(kRoot, "x"));
  auto fs = io::read_field(s, *fj, join(kRoot, "field"));
  s.finish();
  const Field f(*fs);
  std::vector<Elem> psi;
  if (!pj->is_array()) s.fail(join(kRoot, "psi_scalars"), "expected an array");
  else
    for (std::size_t i = 0; i < pj->size(); ++i)
      if (auto e = io::read_elem(s, f, (*pj)[i], join(join(kRoot, "psi_scalars"), i))) psi.push_back(*e);
  if (!is_elliptic(*x)) s.fail(join(kRoot, "x"), "x must be elliptic");
  s.finish();
  const bool convex = is_convex(*x);
  CrossSectionReport rep;
  try {
    rep = cross_section_group_check(*x, *fs, psi, !convex);
  } catch (const BudgetRefused& e) {
    Outcome o;
    o.refused = true;
    o.observed = {{"refused_bits", e.required_bits}};
    return o;
  } catch (const std::invalid_argument& e) {
    s.fail(kRoot, e.what());
    s.finish();
  }
  Outcome o;
  o.observed = {{"convex", convex},
                {"domain_size", rep.domain_size},
                {"codomain_size", rep.codomain_size},
                {"distinct_images", rep.distinct_images},
                {"lands_in_target", rep.lands_in_target},
                {"injective", rep.injective},
                {"surjective", rep.surjective}};
  // Non-convex elements are recorded only.
  o.pass = !convex || rep.bijective();
  return o;
}

Outcome run_group_point_sets(Schema& s, const Json& inst) {
  s.reject_unknown(inst, kRoot, {"kind", "model", "howe", "budget"});
  const Json* mj = s.get(inst, kRoot, "model");
  const auto budget = s.integer(inst, kRoot, "budget", 1, 1LL << 40);
  s.finish();
  const std::string mp = join(kRoot, "model");
  s.reject_unknown(*mj, mp, {"n", "q", "m", "r", "twist"});
  ModelSpec spec;
  const auto n = s.integer(*mj, mp, "n", 2, kMaxMatrixSize);
  const auto q = s.integer(*mj, mp, "q", 2, 64);
  const auto m = s.integer(*mj, mp, "m", 0, 6, 0);
  const auto r = s.integer(*mj, mp, "r", 0, kMaxLevel, 0);
  const Json* tw = s.get(*mj, mp, "twist", false);
  if (tw) {
    const std::string tp = join(mp, "twist");
    s.reject_unknown(*tw, tp, {"word", "outer"});
    if (const Json* w = s.get(*tw, tp, "word", false))
      if (auto word = s.int_list(*w, join(tp, "word"))) spec.twist.word = *word;
    if (auto outer = s.boolean(*tw, tp, "outer", false)) spec.twist.outer = *outer;
  }
  s.finish();
  spec.n = static_cast<int>(*n);
  spec.q = static_cast<int>(*q);
  spec.m = static_cast<int>(*m);
  spec.r = static_cast<int>(*r);
  Outcome o;
  std::optional<GroupModel> model;
  try {
    model = build_model(spec, static_cast<std::uint64_t>(*budget));
  } catch (const BudgetRefused& e) {
    o.refused = true;
    o.observed = {{"refused_bits", e.required_bits}};
    return o;
  } catch (const std::invalid_argument& e) {
    s.fail(mp, e.what());
    s.finish();
  }
  std::optional<HoweDatum> howe;
  const Json* hj = s.get(inst, kRoot, "howe", false);
  if (hj && !hj->is_null()) {
    const std::string hp = join(kRoot, "howe");
    s.reject_unknown(*hj, hp, {"simple_subsets", "depths"});
    const Json* ss = s.get(*hj, hp, "simple_subsets");
    const Json* dp = s.get(*hj, hp, "depths");
    std::vector<std::vector<int>> subsets;
    if (ss && ss->is_array())
      for (std::size_t i = 0; i < ss->size(); ++i)
        if (auto l = s.int_list((*ss)[i], join(join(hp, "simple_subsets"), i))) subsets.push_back(*l);
    auto depths = dp ? io::read_rationals(s, *dp, join(hp, "depths")) : std::nullopt;
    s.finish();
    try {
      howe = howe_from_simple_subsets(model->x(), subsets, *depths);
    } catch (const std::exception& e) {
      s.fail(hp, e.what());
      s.finish();
    }
  }
  PointSetReport rep;
  try {
    rep = enumerate_dl_sets(*model, howe ? &*howe : nullptr);
  } catch (const std::invalid_argument& e) {
    s.fail(kRoot, e.what());
    s.finish();
  }
  Json ids = Json::array();
  for (const auto& row : rep.identities)
    ids.push_back(Json{{"name", row.name}, {"lhs", row.lhs}, {"rhs", row.rhs}, {"pass", row.pass}});
  o.observed = {{"counts", rep.counts}, {"identities", ids}, {"group_order", model->group_order()}};
  o.pass = rep.all_pass();
  return o;
}

Outcome run_group(const Json& inst) {
  Schema s;
  const Json* k = s.get(inst, kRoot, "kind");
  s.finish();
  if (*k == "cross_section") return run_group_cross_section(s, inst);
  if (*k == "point_sets") return run_group_point_sets(s, inst);
  s.fail(join(kRoot, "kind"), "expected \"cross_section\" or \"point_sets\"");
  s.finish();
  return {};
}

struct PointInstance {
  Header h;
  TwistedElement x;
  ApartmentPoint p;
  Rational bound;
};

std::optional<PointInstance> read_point_instance(Schema& s, const Json& inst) {
  auto h = read_header(s, inst);
  const Json* xj = s.get(inst, kRoot, "x");
  const Json* pj = s.get(inst, kRoot, "point");
  const Json* bj = s.get(inst, kRoot, "bound");
  if (!h || !xj || !pj || !bj) return std::nullopt;
  auto x = io::read_element(s, h->rs, h->sigma, *xj, join(kRoot, "x"));
  auto coords = io::read_rationals(s, *pj, join(kRoot, "point"));
  auto bound = io::read_rationals(s, Json::array({*bj}), join(kRoot, "bound"));
  if (!x || !coords || !bound) return std::nullopt;
  if (static_cast<int>(coords->size()) != h->rs->rank()) {
    s.fail(join(kRoot, "point"), "needs one coordinate per simple root");
    return std::nullopt;
  }
  ApartmentPoint p{*coords};
  if (!point_compatible(*x, p)) {
    s.fail(join(kRoot, "point"), "point is not compatible with x");
    return std::nullopt;
  }
  if (!is_elliptic(*x)) {
    s.fail(join(kRoot, "x"), "x must be elliptic");
    return std::nullopt;
  }
  return PointInstance{*h, *x, p, (*bound)[0]};
}

Outcome run_affine(const Json& inst) {
  Schema s;
  s.reject_unknown(inst, kRoot, {"type", "sigma", "x", "point", "bound"});
  auto pi = read_point_instance(s, inst);
  s.finish();
  const RootSystem& rs = *pi->h.rs;
  const AffineFrobenius F(pi->x, pi->p);
  const auto orbits = f_orbits_and_order(F, pi->bound);

  std::vector<AffineRoot> covered, expected;
  bool meets = true, level_constant = true, profiles_valid = true;
  int profiles = 0;
  for (const auto& orb : orbits) {
    for (const auto& f : orb.members) {
      covered.push_back(f);
      if (evaluate(rs, f, pi->p) != orb.level) level_constant = false;
    }
    if (orb.slice) continue;
    const bool hit = std::any_of(orb.members.begin(), orb.members.end(),
                                 [&](const AffineRoot& f) { return in_delta_tilde(pi->x, pi->p, f); });
    if (!hit) meets = false;
    try {
      const auto prof = orbit_profile(F, orb);
      if (!prof) profiles_valid = false;
      else {
        validate_profile(prof->lang());
        ++profiles;
      }
    } catch (const std::exception&) {
      profiles_valid = false;
    }
  }
  for (const auto& f : build_affine_roots(rs, pi->p, pi->bound))
    if (evaluate(rs, f, pi->p) > Rational(0)) expected.push_back(f);
  std::sort(covered.begin(), covered.end());
  std::sort(expected.begin(), expected.end());
  const bool partition = std::adjacent_find(covered.begin(), covered.end()) == covered.end() && covered == expected;
  Outcome o;
  o.observed = {{"orbits", orbits.size()},          {"profiles", profiles},      {"partition", partition},
                {"meets_delta", meets},             {"profiles_valid", profiles_valid},
                {"level_constant", level_constant}, {"affine_roots", expected.size()}};
  o.pass = partition && meets && profiles_valid && level_constant;
  return o;
}

Outcome run_howe(const Json& inst) {
  Schema s;
  s.reject_unknown(inst, kRoot, {"type", "datum", "r"});
  auto h = read_header(s, inst, false);
  const Json* dj = s.get(inst, kRoot, "datum");
  const Json* rj = s.get(inst, kRoot, "r");
  s.finish();
  auto datum = io::read_howe(s, h->rs, *dj, join(kRoot, "datum"));
  auto r = io::read_rationals(s, Json::array({*rj}), join(kRoot, "r"));
  s.finish();
  const RootSystem& rs = *h->rs;
  const auto p = origin(rs);
  LevelLabels L;
  try {
    L = howe_levels(*datum, (*r)[0], p);
  } catch (const std::invalid_argument& e) {
    s.fail(join(kRoot, "r"), e.what());
    s.finish();
  }
  bool monotone = true;
  for (const auto& f : build_affine_roots(rs, p, (*r)[0] + Rational(2))) {
    const auto a = howe_support(*datum, f, p);
    const AffineRoot g = f.slice ? AffineRoot{true, -1, f.n + 1} : AffineRoot{false, f.alpha, f.n + 1};
    const auto b = howe_support(*datum, g, p);
    if ((a.in_K_plus && !a.in_K) || (a.in_E && !a.in_H) || (a.in_H && !a.in_K)) monotone = false;
    if ((a.in_K && !b.in_K) || (a.in_K_plus && !b.in_K_plus) || (a.in_H && !b.in_H) || (a.in_E && !b.in_E))
      monotone = false;
  }
  Outcome o;
  o.observed = {{"levels", io::rationals_json(L.s_values)},
                {"orbits", L.orbits.size()},
                {"symmetric", L.symmetric},
                {"disjoint", L.disjoint},
                {"exhaustive", L.exhaustive},
                {"involution", L.involution},
                {"middle_self_paired", L.middle_self_paired},
                {"monotone", monotone}};
  o.pass = L.symmetric && L.disjoint && L.exhaustive && L.involution && monotone;
  return o;
}

Outcome run_lang_orbit(const Json& inst) {
  Schema s;
  s.reject_unknown(inst, kRoot, {"field", "profiles", "samples", "seed"});
  const Json* fj = s.get(inst, kRoot, "field");
  const Json* pj = s.get(inst, kRoot, "profiles");
  const auto samples = s.integer(inst, kRoot, "samples", 0, 100'000'000);
  const Json* sj = s.get(inst, kRoot, "seed");
  if (sj && !sj->is_number_unsigned() && !(sj->is_number_integer() && sj->get<long long>() >= 0))
    s.fail(join(kRoot, "seed"), "expected a non-negative integer");
  s.finish();
  auto fs = io::read_field(s, *fj, join(kRoot, "field"));
  std::vector<LangProfile> profiles;
  if (!pj->is_array()) s.fail(join(kRoot, "profiles"), "expected an array");
  else
    for (std::size_t i = 0; i < pj->size(); ++i) {
      const std::string pp = join(join(kRoot, "profiles"), i);
      const auto len = s.integer((*pj)[i], pp, "length", 1, 1 << 20);
      const Json* a = s.get((*pj)[i], pp, "a");
      if (!len || !a) continue;
      auto seq = s.int_list(*a, join(pp, "a"));
      if (!seq) continue;
      LangProfile p{static_cast<int>(*len), *seq};
      try {
        validate_profile(p);
        profiles.push_back(p);
      } catch (const std::exception& e) {
        s.fail(pp, e.what());
      }
    }
  s.finish();
  const Field f(*fs);
  std::mt19937_64 rng(sj->get<std::uint64_t>());
  long failures = 0;
  Json first = Json::array();
  for (const auto& p : profiles)
    for (long t = 0; t < *samples; ++t) {
      const auto v = sample_lang_hypothesis(p, f, rng);
      std::vector<std::string> bad;
      try {
        bad = lang_orbit_values(p, f, v).failures;
      } catch (const PreconditionError& e) {
        bad = {std::string("sampler broke the hypothesis: ") + e.what()};
      }
      failures += static_cast<long>(bad.size());
      for (const auto& b : bad)
        if (first.size() < 5) first.push_back(b);
    }
  Outcome o;
  o.observed = {{"profiles", profiles.size()},
                {"samples", static_cast<long>(profiles.size()) * *samples},
                {"failures", failures},
                {"first_failures", first}};
  o.pass = failures == 0;
  return o;
}

}  // namespace

Outcome run_instance(const std::string& suite, const Json& instance) {
  if (!instance.is_object()) throw UsageError({kRoot + ": expected an object"});
  if (suite == "convexity") return run_convexity(instance);
  if (suite == "standard") return run_standard(instance);
  if (suite == "uniformization") return run_uniformization(instance);
  if (suite == "steinberg") return run_steinberg(instance);
  if (suite == "group") return run_group(instance);
  if (suite == "affine") return run_affine(instance);
  if (suite == "howe") return run_howe(instance);
  if (suite == "lang_orbit") return run_lang_orbit(instance);
  throw UsageError({"unknown suite \"" + suite + "\""});
}

// ---------------------------------------------------------------- scan

namespace {

struct Cell {
  RootSystemPtr rs;
  DiagramAut sigma;
  Json type;
};

std::vector<Cell> cells_of(const ScanConfig& c) {
  std::vector<Cell> out;
  for (const auto& t : c.types) {
    Schema s;
    auto rs = io::read_cartan(s, t.cartan, "/types");
    s.finish();
    if (t.sigmas) {
      for (const auto& perm : *t.sigmas) out.push_back({rs, make_diagram_aut(*rs, perm), t.cartan});
    } else {
      for (const auto& sg : diagram_automorphisms(*rs)) out.push_back({rs, sg, t.cartan});
    }
  }
  return out;
}

struct Task {
  std::string suite;
  std::uint64_t index = 0;
  std::function<Json(std::uint64_t seed)> make;
};

Json base_instance(const Cell& c) { return Json{{"type", c.type}, {"sigma", c.sigma.perm}}; }

Json make_setup_instance(const Cell& c, const FieldSpec& fs, int bits, std::mt19937_64& rng) {
  const HASetupInput in = random_ha_input(c.rs, c.sigma, fs, rng, bits);
  Json j = base_instance(c);
  j["field"] = io::field_json(Field(fs));
  j["setup"] = io::setup_json(in);
  j["budget_bits"] = bits;
  return j;
}

ApartmentPoint random_point(const TwistedElement& x, std::mt19937_64& rng) {
  const int l = x.system().rank();
  for (int attempt = 0; attempt < 32; ++attempt) {
    ApartmentPoint p;
    const long long den = 1 + static_cast<long long>(rng() % 4);
    for (int i = 0; i < l; ++i) p.coords.emplace_back(static_cast<long long>(rng() % static_cast<unsigned>(den)), den);
    if (point_compatible(x, p)) return p;
  }
  return origin(x.system());
}

void add_tasks(const ScanConfig& c, const std::string& suite, std::vector<Task>& tasks) {
  std::uint64_t idx = 0;
  auto push = [&](std::function<Json(std::uint64_t)> f) { tasks.push_back({suite, idx++, std::move(f)}); };
  const Budgets& B = c.budgets;
  const auto cells = cells_of(c);
  if (suite == "convexity") {
    for (const auto& cell : cells) push([cell](std::uint64_t) { return base_instance(cell); });
  } else if (suite == "standard") {
    for (const auto& cell : cells)
      if (cell.rs->rank() <= B.standard_max_rank) push([cell](std::uint64_t) { return base_instance(cell); });
  } else if (suite == "uniformization" || suite == "steinberg") {
    const bool un = suite == "uniformization";
    for (const auto& cell : cells)
      for (const auto& [q, m] : c.field_grid)
        for (int t = 0; t < B.instances; ++t)
          push([cell, fs = FieldSpec{q, m, {}}, B, un](std::uint64_t seed) {
            std::mt19937_64 rng(seed);
            Json j = make_setup_instance(cell, fs, B.enumeration_bits, rng);
            if (un) {
              Schema s;
              const auto in = io::read_setup(s, cell.rs, cell.sigma, fs, j["setup"], "/setup");
              s.finish();
              const HASetup S(*in);
              j["z"] = io::vector_json(S.field(), random_on(S, S.A(), rng));
              j["boundary"] = io::vector_json(S.field(), random_on(S, S.A_delta(), rng));
            } else {
              j["round_trips"] = B.round_trips;
              j["seed"] = rng();
            }
            return j;
          });
  } else if (suite == "affine") {
    for (const auto& cell : cells)
      for (int t = 0; t < B.instances; ++t)
        push([cell, bound = B.affine_bound](std::uint64_t seed) {
          std::mt19937_64 rng(seed);
          const auto pool = convex_pool(cell.rs, cell.sigma);
          if (pool.empty()) throw std::logic_error("no convex elliptic element in this coset");
          const auto& x = pool[rng() % pool.size()];
          const auto p = random_point(x, rng);
          Json j = base_instance(cell);
          j["x"] = io::element_json(x);
          j["point"] = io::rationals_json(p.coords);
          j["bound"] = bound;
          return j;
        });
  } else if (suite == "howe") {
    std::set<std::string> seen;
    for (const auto& cell : cells) {
      if (!seen.insert(cell.type.dump()).second) continue;
      for (int t = 0; t < B.howe_data; ++t)
        push([cell, depth = B.howe_max_depth](std::uint64_t seed) {
          std::mt19937_64 rng(seed);
          const auto h = random_howe_datum(cell.rs, rng, depth);
          const Rational r = h.d() >= 1 ? h.depth(h.d() - 1) : h.depth(0);
          return Json{{"type", cell.type}, {"datum", io::howe_json(h)}, {"r", format_rational(r)}};
        });
    }
  } else if (suite == "lang_orbit") {
    for (const auto& cell : cells)
      for (const auto& [q, m] : c.field_grid)
        push([cell, fs = FieldSpec{q, m, {}}, B](std::uint64_t seed) {
          std::set<std::pair<int, std::vector<int>>> seen;
          const auto p = origin(*cell.rs);
          const Rational bound = parse_rational(B.affine_bound);
          for (const auto& x : convex_pool(cell.rs, cell.sigma)) {
            const AffineFrobenius F(x, p);
            for (const auto& orb : f_orbits_and_order(F, bound))
              if (auto prof = orbit_profile(F, orb)) seen.insert({prof->lang().length, prof->a_sequence});
          }
          Json profiles = Json::array();
          for (const auto& [len, a] : seen) profiles.push_back(Json{{"length", len}, {"a", a}});
          return Json{{"field", io::field_json(Field(fs))}, {"profiles", profiles}, {"samples", B.lang_samples},
                      {"seed", seed}};
        });
  } else if (suite == "group") {
    for (const auto& gm : c.group_models) {
      const int n = gm["n"].get<int>();
      const FieldSpec fs{gm["q"].get<int>(), gm.value("m", 1), {}};
      const Field f(fs);
      if (gm.value("cross_section", true)) {
        auto rs = build_root_system("A" + std::to_string(n - 1));
        std::vector<Json> psi{Json::array()};
        if (gm.contains("psi_scalars")) {
          psi.clear();
          for (const auto& choice : gm["psi_scalars"]) {
            Json row = Json::array();
            for (const auto& e : choice) row.push_back(e.is_number_integer() ? io::elem_json(f, e.get<Elem>()) : e);
            psi.push_back(row);
          }
        }
        for (const auto& sigma : diagram_automorphisms(*rs))
          for (const auto& cls : enumerate_twisted_classes(rs, sigma)) {
            if (!cls.elliptic) continue;
            for (const auto& x : cls.members)
              for (const auto& p : psi) {
                Json j{{"kind", "cross_section"}, {"type", io::cartan_json(*rs)}, {"sigma", sigma.perm},
                       {"x", io::element_json(x)},  {"field", io::field_json(f)},   {"psi_scalars", p}};
                push([j](std::uint64_t) { return j; });
              }
          }
      }
      for (const auto& ps : gm.value("point_sets", Json::array())) {
        Json model{{"n", n}, {"q", fs.q}, {"m", ps.value("m", 0)}, {"r", ps.value("r", 0)}};
        if (ps.contains("twist")) model["twist"] = ps["twist"];
        Json j{{"kind", "point_sets"}, {"model", model}, {"howe", ps.value("howe", Json())}, {"budget", B.group_elements}};
        push([j](std::uint64_t) { return j; });
      }
    }
  }
}

Json suite_notes(const std::string& suite, const std::vector<Outcome>& outs) {
  Json n = Json::object();
  if (suite == "convexity") {
    long mixed = 0;
    for (const auto& o : outs) mixed += o.observed.value("mixed_pair_verdict_changes", 0L);
    n["pair_domain"] = "same-sign pairs";
    n["mixed_pair_verdict_changes"] = mixed;
  } else if (suite == "standard") {
    n["levi_stability"] = "stable under the single map x0";
  } else if (suite == "uniformization" || suite == "steinberg") {
    n["phi_order"] = "composition in the listed order of B";
  } else if (suite == "group") {
    long nonconvex = 0, nonconvex_bijective = 0;
    for (const auto& o : outs)
      if (o.observed.contains("convex") && !o.observed["convex"].get<bool>()) {
        ++nonconvex;
        if (o.observed["injective"].get<bool>() && o.observed["surjective"].get<bool>() &&
            o.observed["lands_in_target"].get<bool>())
          ++nonconvex_bijective;
      }
    n["nonconvex_elliptic_checked"] = nonconvex;
    n["nonconvex_elliptic_bijective"] = nonconvex_bijective;
  } else if (suite == "howe") {
    long self = 0;
    for (const auto& o : outs) self += o.observed.value("middle_self_paired", false) ? 1 : 0;
    n["middle_orbit_self_paired"] = self;
  }
  return n;
}

std::string csv_table(const std::vector<Task>& tasks, const std::vector<Json>& instances, const std::vector<Outcome>& outs) {
  std::ostringstream os;
  os << "index,n,q,m,r,name,count\n";
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (tasks[i].suite != "group" || instances[i].value("kind", "") != "point_sets" || !outs[i].observed.contains("counts"))
      continue;
    const Json& m = instances[i]["model"];
    for (const auto& [k, v] : outs[i].observed["counts"].items())
      os << tasks[i].index << ',' << m["n"] << ',' << m["q"] << ',' << m["m"] << ',' << m["r"] << ',' << k << ',' << v
         << '\n';
  }
  return os.str();
}

}  // namespace

ScanResult cmd_scan(const ScanConfig& config, const ScanOptions& options) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  std::vector<Task> tasks;
  for (const auto& suite : config.suites) add_tasks(config, suite, tasks);

  std::vector<Json> instances(tasks.size());
  std::vector<Outcome> outcomes(tasks.size());
  std::vector<double> seconds(tasks.size(), 0.0);
  std::atomic<std::size_t> next{0};
  const int jobs = std::max(1, options.jobs);

  auto worker = [&]() {
    if (jobs > 1) omp_set_num_threads(1);
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const auto t0 = Clock::now();
      const Task& t = tasks[i];
      try {
        instances[i] = t.make(instance_seed(config.seed, t.suite, t.index));
        outcomes[i] = run_instance(t.suite, instances[i]);
      } catch (const BudgetRefused& e) {
        outcomes[i].refused = true;
        outcomes[i].observed = {{"refused_bits", e.required_bits}};
      } catch (const std::exception& e) {
        outcomes[i].pass = false;
        outcomes[i].observed = {{"error", e.what()}};
      }
      seconds[i] = std::chrono::duration<double>(Clock::now() - t0).count();
    }
  };
  if (jobs == 1) worker();
  else {
    std::vector<std::thread> pool;
    for (int k = 0; k < jobs; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  Json suites = Json::object(), timing_suites = Json::object(), counterexamples = Json::array();
  bool all_pass = true;
  std::ostringstream summary;
  for (const auto& suite : config.suites) {
    long pass = 0, fail = 0, refused = 0;
    double secs = 0;
    std::vector<Outcome> mine;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (tasks[i].suite != suite) continue;
      secs += seconds[i];
      mine.push_back(outcomes[i]);
      if (outcomes[i].refused) ++refused;
      else if (outcomes[i].pass) ++pass;
      else {
        ++fail;
        counterexamples.push_back(
            Json{{"suite", suite}, {"index", tasks[i].index}, {"instance", instances[i]}, {"expected", outcomes[i].observed}});
      }
    }
    if (fail > 0) all_pass = false;
    suites[suite] = {{"instances", pass + fail + refused},
                     {"pass", pass},
                     {"fail", fail},
                     {"refused", refused},
                     {"notes", suite_notes(suite, mine)}};
    timing_suites[suite] = secs;
    summary << suite << ": " << pass << "/" << (pass + fail) << " passed";
    if (refused) summary << ", " << refused << " refused by budget";
    summary << '\n';
  }
  summary << (all_pass ? "all suites pass" : "FAILURES: " + std::to_string(counterexamples.size()) + " counterexamples")
          << '\n';

  if (!options.instances_dir.empty())
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (instances[i].is_null()) continue;
      const Json replay{{"suite", tasks[i].suite}, {"instance", instances[i]}, {"expected", outcomes[i].observed}};
      write_atomic(options.instances_dir + "/" + tasks[i].suite + "-" + std::to_string(tasks[i].index) + ".json",
                   replay.dump(2) + "\n");
    }
  if (!config.csv.empty()) write_atomic(config.csv, csv_table(tasks, instances, outcomes));

  ScanResult r;
  r.all_pass = all_pass;
  r.summary = summary.str();
  r.report = {{"all_pass", all_pass},
              {"config", config.echo},
              {"counterexamples", counterexamples},
              {"seed", config.seed},
              {"suites", suites},
              {"versions", {{"convexdl", "1.0.0"}, {"report_format", 1}, {"compiler", __VERSION__},
                            {"json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}},
              {"timing", {{"suites_seconds", timing_suites},
                          {"wall_seconds", std::chrono::duration<double>(Clock::now() - start).count()},
                          {"jobs", jobs}}}};
  if (!config.output.empty()) write_atomic(config.output, r.report.dump(2) + "\n");
  return r;
}

VerifyResult cmd_verify(const std::string& suite, const Json& replay) {
  if (!is_suite(suite)) throw UsageError({"unknown suite \"" + suite + "\""});
  Schema s;
  if (!replay.is_object()) s.fail("", "replay file must be a JSON object");
  s.finish();
  s.reject_unknown(replay, "", {"suite", "instance", "expected", "index"});
  const Json* fs = s.get(replay, "", "suite", false);
  if (fs && (!fs->is_string() || fs->get<std::string>() != suite))
    s.fail("/suite", "file is for suite " + fs->dump() + ", not \"" + suite + "\"");
  const Json* inst = s.get(replay, "", "instance");
  const Json* expected = s.get(replay, "", "expected");
  s.finish();
  const Outcome o = run_instance(suite, *inst);
  VerifyResult r;
  r.observed = o.observed;
  r.diff = json_diff(*expected, o.observed);
  r.status = (r.diff.empty() && o.pass && !o.refused) ? 0 : 1;
  return r;
}

}  // namespace convexdl
