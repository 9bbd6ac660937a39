#include <gtest/gtest.h>

#include <set>

#include "convexdl/ha_space.hpp"
#include "convexdl/lang_orbit.hpp"

using namespace convexdl;

namespace {

int idx(const RootSystem& rs, std::vector<int> c) { return rs.find(c); }

HASetup a2_setup(FieldSpec fs, std::vector<int> B = {}, std::vector<Elem> c = {}) {
  auto rs = build_root_system("A2");
  HASetupInput in;
  in.x = TwistedElement::from_word(rs, {1, 2});
  for (int a = 0; a < rs->size(); ++a) in.A.push_back(a);
  in.B = std::move(B);
  in.ad_coefficients = std::move(c);
  in.field = fs;
  return HASetup(in);
}

HAVector random_vector(const HASetup& s, const std::vector<int>& support, std::mt19937_64& rng) {
  HAVector v = s.zero();
  for (int a : support) v.entries[a] = static_cast<Elem>(rng() % s.field().size());
  return v;
}

}  // namespace

TEST(Field, PrimeFieldsMatchModularArithmetic) {
  for (int p : {2, 3, 5, 7}) {
    Field f({p, 1, {}});
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b) {
        EXPECT_EQ(f.add(a, b), (a + b) % p);
        EXPECT_EQ(f.mul(a, b), (a * b) % p);
      }
  }
}

TEST(Field, F4AndF9) {
  Field f4({2, 2, {}});
  EXPECT_EQ(f4.modulus(), (std::vector<int>{1, 1, 1}));
  const Elem t = f4.from_coeffs({0, 1});
  EXPECT_EQ(f4.mul(t, t), f4.from_coeffs({1, 1}));
  EXPECT_EQ(f4.frob(t), f4.from_coeffs({1, 1}));
  Field f9({3, 2, {}});
  EXPECT_EQ(f9.modulus(), (std::vector<int>{1, 0, 1}));
  const Elem i = f9.from_coeffs({0, 1});
  EXPECT_EQ(f9.mul(i, i), f9.from_int(-1));
  EXPECT_THROW(Field({6, 1, {}}), FieldError);
  EXPECT_THROW(Field({2, 7, {}}), FieldError);
  EXPECT_THROW(Field({2, 2, {1, 0, 1}}), FieldError);  // t^2 + 1 = (t + 1)^2
}

TEST(Field, Axioms) {
  for (FieldSpec fs : std::vector<FieldSpec>{{2, 3, {}}, {4, 2, {}}, {3, 2, {}}, {5, 2, {}}, {2, 6, {}}}) {
    Field f(fs);
    const int n = f.size();
    for (int a = 0; a < n; ++a) {
      if (a) EXPECT_EQ(f.mul(a, f.inv(a)), 1);
      EXPECT_EQ(f.frob_inv(f.frob(a)), a);
      EXPECT_EQ(f.frob_pow(a, f.m()), a);
      for (int b = 0; b < n; ++b) {
        EXPECT_EQ(f.frob(f.mul(a, b)), f.mul(f.frob(a), f.frob(b)));
        EXPECT_EQ(f.frob(f.add(a, b)), f.add(f.frob(a), f.frob(b)));
        for (int c = 0; c < n; c += 3) {
          EXPECT_EQ(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
          EXPECT_EQ(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        }
      }
    }
    int fixed = 0;
    for (int a = 0; a < n; ++a) fixed += f.in_base_field(a);
    EXPECT_EQ(fixed, fs.q);
  }
}

TEST(HASpace, SetupValidation) {
  auto rs = build_root_system("A2");
  HASetupInput in;
  in.x = TwistedElement::from_word(rs, {1, 2});
  in.A = {idx(*rs, {1, 0})};  // not x-stable
  in.field = {2, 1, {}};
  EXPECT_THROW(HASetup{in}, std::invalid_argument);
  in.A = {0, 1, 2, 3, 4, 5};
  in.B = {idx(*rs, {1, 0})};
  in.ad_coefficients = {1};
  EXPECT_THROW(HASetup{in}, std::invalid_argument);  // B must be negative
  in.B = {idx(*rs, {-1, -1})};
  EXPECT_NO_THROW(HASetup{in});
  // Absorption failure: A = x-orbit {a1+a2, -a1, -a2}, B = {-a1}; (a1+a2) - a1 = a2 lies outside A.
  in.A = {idx(*rs, {1, 1}), idx(*rs, {-1, 0}), idx(*rs, {0, -1})};
  in.B = {idx(*rs, {-1, 0})};
  EXPECT_THROW(HASetup{in}, std::invalid_argument);
}

TEST(HASpace, AdExamples) {
  auto s = a2_setup({2, 1, {}});
  const RootSystem& rs = s.system();
  const int beta = idx(rs, {-1, -1});
  ASSERT_TRUE(std::binary_search(s.A().begin(), s.A().end(), beta));
  auto s2 = a2_setup({2, 1, {}}, {beta, idx(rs, {-1, 0})}, {1, 1});
  const auto e1 = s2.basis(idx(rs, {1, 0}));
  // a1 + beta = -a2 is a root, so e_{a1} picks up an e_{-a2} term.
  auto img1 = apply_ad(s2, beta, 1, e1);
  EXPECT_EQ(img1.entries[idx(rs, {1, 0})], 1);
  EXPECT_EQ(img1.entries[idx(rs, {0, -1})], 1);
  EXPECT_EQ(apply_ad(s2, beta, 0, e1), e1);
  // -a2 + beta is not a root, nor is -a2 + 2 beta.
  const auto em2 = s2.basis(idx(rs, {0, -1}));
  EXPECT_EQ(apply_ad(s2, beta, 1, em2), em2);
  const auto e12 = s2.basis(idx(rs, {1, 1}));
  // (a1+a2) + beta = 0 is not a root; 2 steps give beta itself.
  auto img = apply_ad(s2, beta, 1, e12);
  EXPECT_EQ(img.entries[idx(rs, {1, 1})], 1);
  EXPECT_EQ(img.entries[beta], 1);
  auto img2 = apply_ad(s2, idx(rs, {-1, 0}), 1, e12);
  EXPECT_EQ(img2.entries[idx(rs, {0, 1})], 1);
  EXPECT_EQ(img2.entries[idx(rs, {1, 1})], 1);
  EXPECT_THROW(apply_ad(s, beta, 1, e1), std::invalid_argument);
}

TEST(HASpace, FrobeniusExample) {
  auto s = a2_setup({2, 2, {}});
  const RootSystem& rs = s.system();
  const Elem t = s.field().from_coeffs({0, 1});
  auto v = apply_twisted_frobenius(s, s.basis(idx(rs, {1, 0}), t));
  EXPECT_EQ(v, s.basis(idx(rs, {0, 1}), s.field().from_coeffs({1, 1})));
  EXPECT_EQ(apply_twisted_frobenius(s, s.zero()), s.zero());
  std::mt19937_64 rng(1);
  for (int k = 0; k < 50; ++k) {
    auto w = random_vector(s, s.A(), rng);
    EXPECT_EQ(apply_twisted_frobenius_inv(s, apply_twisted_frobenius(s, w)), w);
    const Elem lam = static_cast<Elem>(rng() % 4);
    HAVector lw = w;
    for (auto& e : lw.entries) e = s.field().mul(lam, e);
    HAVector fl = apply_twisted_frobenius(s, w);
    for (auto& e : fl.entries) e = s.field().mul(s.field().frob(lam), e);
    EXPECT_EQ(apply_twisted_frobenius(s, lw), fl);
  }
}

TEST(HASpace, UniformizationSmall) {
  auto rs = build_root_system("A2");
  const int b1 = idx(*rs, {-1, -1});
  auto s = a2_setup({2, 1, {}}, {b1}, {1});
  EXPECT_EQ(solve_uniformization(s, s.zero(), s.zero()), s.zero());
  std::mt19937_64 rng(7);
  for (int k = 0; k < 20; ++k) {
    auto z = random_vector(s, s.A(), rng);
    auto all = enumerate_V(s, z);
    EXPECT_EQ(all.size(), 1u << s.A_delta().size());
    EXPECT_EQ(all, enumerate_V_serial(s, z));
    for (const auto& w : all) {
      HAVector bd = s.zero();
      for (int a : s.A_delta()) bd.entries[a] = w.entries[a];
      EXPECT_EQ(solve_uniformization(s, z, bd), w);
    }
  }
  // z supported on A cap -Delta_x: 0 is a solution.
  auto z = random_vector(s, s.A_minus_delta(), rng);
  EXPECT_TRUE(in_V(s, z, s.zero()));
}

TEST(HASpace, RandomInstancesAgreeWithOracle) {
  std::mt19937_64 rng(2024);
  for (const char* code : {"A2", "B2", "A3", "G2"}) {
    auto rs = build_root_system(code);
    for (const auto& sigma : diagram_automorphisms(*rs))
      for (FieldSpec fs : std::vector<FieldSpec>{{2, 1, {}}, {3, 1, {}}, {2, 2, {}}}) {
        for (int rep = 0; rep < 3; ++rep) {
          HASetup s(random_ha_input(rs, sigma, fs, rng, 14));
          ASSERT_TRUE(s.convex());
          auto z = random_vector(s, s.A(), rng);
          auto all = enumerate_V(s, z, 14);
          std::uint64_t expect = 1;
          for (std::size_t i = 0; i < s.A_delta().size(); ++i) expect *= s.field().size();
          ASSERT_EQ(all.size(), expect) << code;
          std::set<std::vector<Elem>> proj;
          for (const auto& w : all) {
            HAVector bd = s.zero();
            for (int a : s.A_delta()) bd.entries[a] = w.entries[a];
            proj.insert(bd.entries);
            EXPECT_EQ(solve_uniformization(s, z, bd), w);
          }
          EXPECT_EQ(proj.size(), all.size());
          auto bij = steinberg_bijectivity(s, 14);
          EXPECT_TRUE(bij.cardinality_identity);
          EXPECT_TRUE(bij.bijective) << code;
          int max_n = 0;
          for (int a = 0; a < rs->num_positive(); ++a) max_n = std::max(max_n, s.n_x()[a]);
          for (int k = 0; k < 20; ++k) {
            auto t = random_vector(s, s.x_A_pos(), rng);
            auto pre = invert_steinberg(s, t);
            EXPECT_EQ(steinberg_linear_map(s, pre.z, pre.y), t);
            EXPECT_LE(pre.depth, max_n);
          }
        }
      }
  }
}

TEST(HASpace, SerialParallelAgree) {
  std::mt19937_64 rng(99);
  auto rs = build_root_system("A3");
  for (int rep = 0; rep < 4; ++rep) {
    HASetup s(random_ha_input(rs, identity_aut(3), {2, 1, {}}, rng, 10));
    auto z = random_vector(s, s.A(), rng);
    EXPECT_EQ(enumerate_V(s, z, 10), enumerate_V_serial(s, z, 10));
    auto a = steinberg_bijectivity(s, 10), b = steinberg_bijectivity_serial(s, 10);
    EXPECT_EQ(a.distinct_images, b.distinct_images);
    EXPECT_EQ(a.bijective, b.bijective);
  }
}

TEST(HASpace, SteinbergBasics) {
  auto s = a2_setup({2, 1, {}});
  EXPECT_EQ(steinberg_linear_map(s, s.zero(), s.zero()), s.zero());
  std::mt19937_64 rng(3);
  auto y = random_vector(s, s.A_minus_delta(), rng);
  EXPECT_EQ(steinberg_linear_map(s, s.zero(), y), y);
  auto pre = invert_steinberg(s, s.zero());
  EXPECT_EQ(pre.z, s.zero());
  EXPECT_EQ(pre.y, s.zero());
  EXPECT_TRUE(steinberg_bijectivity(s).bijective);
  EXPECT_THROW(steinberg_linear_map(s, s.basis(s.A_minus_delta().front()), s.zero()), std::invalid_argument);
}

TEST(HASpace, BudgetAndPreconditions) {
  auto rs = build_root_system("A3");
  HASetupInput in;
  in.x = TwistedElement::from_word(rs, {1, 2, 3});
  for (int a = 0; a < rs->size(); ++a) in.A.push_back(a);
  in.field = {2, 2, {}};
  HASetup s(in);
  EXPECT_THROW(enumerate_V(s, s.zero()), BudgetRefused);
  // Non-convex elliptic element: solver refuses.
  for (const char* code : {"A3", "B3", "A4", "D4"}) {
    auto r = build_root_system(code);
    for (const auto& cls : enumerate_twisted_classes(r, {}))
      if (cls.elliptic)
        for (const auto& m : cls.members)
          if (!is_convex(m)) {
            HASetupInput bad;
            bad.x = m;
            for (int a = 0; a < r->size(); ++a) bad.A.push_back(a);
            bad.field = {2, 1, {}};
            HASetup hs(bad);
            EXPECT_THROW(solve_uniformization(hs, hs.zero(), hs.zero()), PreconditionError);
            return;
          }
  }
  FAIL() << "no non-convex elliptic element found";
}

TEST(LangOrbit, Identities) {
  Field f({2, 3, {}});
  std::mt19937_64 rng(11);
  for (LangProfile p : std::vector<LangProfile>{{2, {0, 1, 2}}, {3, {0, 2, 3}}, {6, {0, 1, 3, 4, 6}}, {5, {0, 1, 2, 4, 5}}}) {
    EXPECT_TRUE(lang_orbit_values(p, f, std::vector<Elem>(p.length, 0)).failures.empty());
    for (int k = 0; k < 200; ++k) {
      auto v = sample_lang_hypothesis(p, f, rng);
      EXPECT_TRUE(lang_orbit_values(p, f, v).failures.empty());
    }
  }
  // b = 1: L(x)_0 = x_0^{q^N} - x_0.
  LangProfile p{4, {0, 2, 4}};
  for (int k = 0; k < 50; ++k) {
    auto v = sample_lang_hypothesis(p, f, rng);
    auto L = lang_map_orbit(f, v);
    EXPECT_EQ(L[0], f.sub(f.frob_pow(v[0], 4), v[0]));
  }
  std::vector<Elem> bad(4, 0);
  bad[1] = 1;
  EXPECT_THROW(lang_orbit_values(p, f, bad), PreconditionError);
  EXPECT_THROW(validate_profile({3, {0, 3}}), std::invalid_argument);
}
