#include <gtest/gtest.h>

#include <set>

#include "convexdl/affine.hpp"

using namespace convexdl;

namespace {

ApartmentPoint pt(std::vector<Rational> c) { return {std::move(c)}; }

TwistedElement coxeter(const RootSystemPtr& rs) {
  std::vector<int> w;
  for (int i = 1; i <= rs->rank(); ++i) w.push_back(i);
  return TwistedElement::from_word(rs, w);
}

// Brute-force jump set: every value alpha(p) + n and every integer, clipped to [0, bound].
std::set<Rational> brute_jumps(const RootSystem& rs, const ApartmentPoint& p, long long bound) {
  std::set<Rational> out;
  for (long long k = 0; k <= bound; ++k) out.insert(Rational(k));
  for (int a = 0; a < rs.size(); ++a)
    for (long long n = -bound - 5; n <= bound + 5; ++n) {
      const Rational v = root_value(rs, a, p) + Rational(n);
      if (v >= 0 && v <= bound) out.insert(v);
    }
  return out;
}

}  // namespace

TEST(Rationals, ParseAndFormat) {
  EXPECT_EQ(parse_rational("-2/4"), Rational(-1, 2));
  EXPECT_EQ(format_rational(Rational(3, 6)), "1/2");
  EXPECT_EQ(format_rational(Rational(4)), "4");
  EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
  EXPECT_THROW(parse_rational("abc"), std::invalid_argument);
}

TEST(Jumps, A1OriginAndMidpoint) {
  auto rs = build_root_system("A1");
  Jumps j0(*rs, origin(*rs));
  EXPECT_EQ(j0.residues(), std::vector<Rational>{Rational(0)});
  EXPECT_EQ(j0.r_plus(Rational(0)), Rational(1));
  EXPECT_FALSE(j0.r_minus(Rational(0)).has_value());
  EXPECT_EQ(*j0.r_minus(Rational(3)), Rational(2));

  Jumps jh(*rs, pt({Rational(1, 2)}));
  EXPECT_EQ(jh.residues(), (std::vector<Rational>{Rational(0), Rational(1, 2)}));
  EXPECT_EQ(jh.r_plus(Rational(0)), Rational(1, 2));
  EXPECT_EQ(jh.r_plus(Rational(1, 4)), Rational(1, 2));
  EXPECT_EQ(*jh.r_minus(Rational(1)), Rational(1, 2));
  EXPECT_TRUE(jh.contains(Rational(5, 2)));
  EXPECT_FALSE(jh.contains(Rational(1, 3)));
  EXPECT_FALSE(jh.contains(Rational(-1, 2)));
}

TEST(Jumps, MatchesBruteForce) {
  for (const char* code : {"A2", "B2", "G2"}) {
    auto rs = build_root_system(code);
    for (auto c : {std::vector<Rational>{Rational(1, 3), Rational(1, 3)}, std::vector<Rational>{Rational(1, 2), Rational(0)},
                   std::vector<Rational>{Rational(2, 3), Rational(1, 2)}}) {
      const auto p = pt(c);
      Jumps j(*rs, p);
      const auto brute = brute_jumps(*rs, p, 3);
      const auto got = j.up_to(Rational(3));
      EXPECT_EQ(std::set<Rational>(got.begin(), got.end()), brute) << code;
      for (auto it = brute.begin(); std::next(it) != brute.end(); ++it) {
        EXPECT_EQ(j.r_plus(*it), *std::next(it));
        EXPECT_EQ(*j.r_minus(*std::next(it)), *it);
      }
    }
  }
}

TEST(AffineRoots, SortedAndBounded) {
  auto rs = build_root_system("A2");
  const auto p = pt({Rational(1, 3), Rational(1, 3)});
  const auto roots = build_affine_roots(*rs, p, Rational(2));
  Rational prev(-1);
  for (const auto& f : roots) {
    const Rational v = evaluate(*rs, f, p);
    EXPECT_GE(v, prev);
    EXPECT_GE(v, 0);
    EXPECT_LE(v, 2);
    prev = v;
  }
  EXPECT_EQ(roots.front(), (AffineRoot{true, -1, 0}));
}

TEST(AffineFrobenius, PreservesValueAndOrderDividesTwistedOrder) {
  auto rs = build_root_system("A2");
  const auto x = coxeter(rs);
  const auto p = origin(*rs);
  AffineFrobenius F(x, p);
  for (const auto& f : build_affine_roots(*rs, p, Rational(3))) {
    EXPECT_EQ(evaluate(*rs, F.apply(f), p), evaluate(*rs, f, p));
    AffineRoot g = f;
    for (int k = 0; k < x.order(); ++k) g = F.apply(g);
    EXPECT_EQ(g, f);
  }
}

TEST(AffineFrobenius, RejectsIncompatiblePoint) {
  auto rs = build_root_system("A2");
  const auto p = pt({Rational(1, 2), Rational(0)});
  EXPECT_FALSE(point_compatible(coxeter(rs), p));
  EXPECT_THROW(AffineFrobenius(coxeter(rs), p), std::invalid_argument);
}

TEST(Orbits, PartitionAndSignChangesAlternate) {
  for (const char* code : {"A1", "A2", "B2", "G2", "A3"}) {
    auto rs = build_root_system(code);
    for (const auto& sigma : diagram_automorphisms(*rs))
      for (const auto& cls : enumerate_twisted_classes(rs, sigma)) {
        if (!cls.elliptic) continue;
        const auto convex = convex_elements_of_class(cls);
        ASSERT_FALSE(convex.empty());
        AffineFrobenius F(convex.front(), origin(*rs));
        const auto orbits = f_orbits_and_order(F, Rational(2));
        std::set<AffineRoot> seen;
        std::size_t total = 0;
        for (std::size_t i = 0; i < orbits.size(); ++i) {
          const auto& o = orbits[i];
          if (i > 0) EXPECT_LE(orbits[i - 1].level, o.level);
          for (const auto& g : o.members) seen.insert(g), ++total;
          if (o.slice) {
            EXPECT_EQ(o.members.size(), 1u);
            EXPECT_FALSE(orbit_profile(F, o).has_value());
            continue;
          }
          EXPECT_TRUE(in_delta_tilde(F.x(), F.point(), o.members.front()));
          const auto prof = orbit_profile(F, o);
          ASSERT_TRUE(prof.has_value());
          EXPECT_NO_THROW(validate_profile(prof->lang()));
          EXPECT_GE(prof->b(), 1);
          EXPECT_EQ(prof->orbit.size(), o.members.size());
        }
        EXPECT_EQ(seen.size(), total);
        std::size_t positive = 0;
        for (const auto& f : build_affine_roots(*rs, origin(*rs), Rational(2)))
          if (evaluate(*rs, f, origin(*rs)) > 0) ++positive;
        EXPECT_EQ(total, positive);
      }
  }
}

TEST(Orbits, SignChangeNeedsMinusDelta) {
  auto rs = build_root_system("A2");
  AffineFrobenius F(coxeter(rs), origin(*rs));
  const auto orbits = f_orbits_and_order(F, Rational(1));
  for (const auto& o : orbits) {
    if (o.slice) continue;
    EXPECT_THROW(sign_change_sequence(F, o, o.members.front()), std::invalid_argument);
  }
}

TEST(Howe, ValidationRejectsBadChains) {
  auto rs = build_root_system("A2");
  const auto x = coxeter(rs);
  EXPECT_NO_THROW(howe_from_simple_subsets(x, {{}, {0, 1}}, {Rational(1), Rational(2)}));
  // {alpha_1} is not stable under the Coxeter element.
  EXPECT_THROW(howe_from_simple_subsets(x, {{0}, {0, 1}}, {Rational(1), Rational(2)}), std::invalid_argument);
  EXPECT_THROW(howe_from_simple_subsets(x, {{}, {0, 1}}, {Rational(2), Rational(1)}), std::invalid_argument);
  EXPECT_THROW(howe_from_simple_subsets(x, {{}, {0, 1}}, {Rational(0), Rational(1)}), std::invalid_argument);
  EXPECT_THROW(howe_from_simple_subsets(x, {{}}, {Rational(1)}), std::invalid_argument);
  EXPECT_NO_THROW(howe_from_simple_subsets(x, {{}, {0, 1}}, {Rational(2), Rational(2)}));
}

TEST(Howe, SupportThresholds) {
  auto rs = build_root_system("A1");
  const auto x = coxeter(rs);
  const auto p = origin(*rs);
  const auto h = howe_from_simple_subsets(x, {{}, {0}}, {Rational(2), Rational(3)});
  // Root-type at chain index 1: threshold r_0 / 2 = 1.
  const auto at0 = howe_support(h, AffineRoot{false, 0, 0}, p);
  EXPECT_FALSE(at0.in_K);
  const auto at1 = howe_support(h, AffineRoot{false, 0, 1}, p);
  EXPECT_TRUE(at1.in_K);
  EXPECT_FALSE(at1.in_K_plus);
  EXPECT_TRUE(at1.in_H);
  EXPECT_FALSE(at1.in_E);
  const auto at2 = howe_support(h, AffineRoot{false, 0, 2}, p);
  EXPECT_TRUE(at2.in_K_plus && at2.in_E);
  // Slices: E needs s > r_{d-1} = 2.
  EXPECT_TRUE(howe_support(h, AffineRoot{true, -1, 0}, p).in_K);
  EXPECT_FALSE(howe_support(h, AffineRoot{true, -1, 0}, p).in_H);
  EXPECT_FALSE(howe_support(h, AffineRoot{true, -1, 2}, p).in_E);
  EXPECT_TRUE(howe_support(h, AffineRoot{true, -1, 3}, p).in_E);
  EXPECT_THROW(howe_support(h, AffineRoot{false, 0, -1}, p), std::invalid_argument);
}

TEST(Howe, SupportIsMonotone) {
  std::mt19937_64 rng(11);
  for (const char* code : {"A1", "A2", "B2"}) {
    auto rs = build_root_system(code);
    for (int t = 0; t < 10; ++t) {
      const auto h = random_howe_datum(rs, rng, 3);
      const auto p = origin(*rs);
      for (const auto& f : build_affine_roots(*rs, p, Rational(8))) {
        const auto s = howe_support(h, f, p);
        if (s.in_K_plus) EXPECT_TRUE(s.in_K);
        if (s.in_E) EXPECT_TRUE(s.in_H);
        if (s.in_H) EXPECT_TRUE(s.in_K);
        const auto g = f.slice ? AffineRoot{true, -1, f.n + 1} : AffineRoot{false, f.alpha, f.n + 1};
        const auto sg = howe_support(h, g, p);
        EXPECT_TRUE(!s.in_K || sg.in_K);
        EXPECT_TRUE(!s.in_E || sg.in_E);
      }
    }
  }
}

TEST(Howe, SL2LevelsAtOrigin) {
  auto rs = build_root_system("A1");
  const auto h = howe_from_simple_subsets(coxeter(rs), {{}, {0}}, {Rational(2), Rational(2)});
  const auto L = howe_levels(h, Rational(2), origin(*rs));
  EXPECT_EQ(L.s_values, (std::vector<Rational>{Rational(0), Rational(1), Rational(2)}));
  EXPECT_TRUE(L.symmetric);
  EXPECT_TRUE(L.disjoint);
  EXPECT_TRUE(L.exhaustive);
  EXPECT_TRUE(L.involution);
  // D = {(+-alpha, 1)}, one orbit of length 2 paired with itself.
  ASSERT_EQ(L.orbits.size(), 1u);
  EXPECT_EQ(L.orbits[0].members.size(), 2u);
  EXPECT_EQ(L.pairs.size(), 1u);
  EXPECT_EQ(L.pairs[0].partner, 0);
  EXPECT_TRUE(L.middle_self_paired);
}

TEST(Howe, RandomDataPairingIsInvolution) {
  std::mt19937_64 rng(5);
  for (const char* code : {"A1", "A2", "B2", "G2"}) {
    auto rs = build_root_system(code);
    for (int t = 0; t < 8; ++t) {
      const auto h = random_howe_datum(rs, rng, 3);
      const Rational r = h.d() >= 1 ? h.depth(h.d() - 1) : h.depth(0);
      const auto L = howe_levels(h, r, origin(*rs));
      EXPECT_TRUE(L.symmetric && L.disjoint && L.exhaustive && L.involution) << code;
      // Brute-force partner check.
      for (const auto& pr : L.pairs) {
        for (const auto& f : L.orbits[pr.orbit].members) {
          const AffineRoot g{false, rs->negate(f.alpha), r.numerator() - f.n};
          const auto& t = L.orbits[pr.partner].members;
          EXPECT_NE(std::find(t.begin(), t.end(), g), t.end());
        }
      }
    }
  }
}

TEST(Howe, RejectsNonIntegralLevel) {
  auto rs = build_root_system("A1");
  const auto h = howe_from_simple_subsets(coxeter(rs), {{}, {0}}, {Rational(2), Rational(2)});
  EXPECT_THROW(howe_levels(h, Rational(3, 2), origin(*rs)), std::invalid_argument);
  EXPECT_THROW(howe_levels(h, Rational(0), origin(*rs)), std::invalid_argument);
}
