#pragma once

#include <boost/rational.hpp>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "convexdl/convexity.hpp"
#include "convexdl/lang_orbit.hpp"

namespace convexdl {

using Rational = boost::rational<long long>;

Rational parse_rational(const std::string& s);  // "3", "-1/2"
std::string format_rational(const Rational& r);

// Root-type (alpha, n) or a torus slice at integer level n.
struct AffineRoot {
  bool slice = false;
  int alpha = -1;
  long long n = 0;
  bool operator==(const AffineRoot& o) const { return slice == o.slice && alpha == o.alpha && n == o.n; }
  bool operator<(const AffineRoot& o) const;
};

// coords[i] = alpha_i(point) for the simple roots.
struct ApartmentPoint {
  std::vector<Rational> coords;
};

ApartmentPoint origin(const RootSystem& rs);
Rational root_value(const RootSystem& rs, int alpha, const ApartmentPoint& p);
Rational evaluate(const RootSystem& rs, const AffineRoot& f, const ApartmentPoint& p);
std::string format_affine_root(const RootSystem& rs, const AffineRoot& f);

// All f with 0 <= f(p) <= bound, sorted by value, slices first at equal value.
std::vector<AffineRoot> build_affine_roots(const RootSystem& rs, const ApartmentPoint& p, const Rational& bound);

// The jump set {f(p) >= 0}, periodic with period 1.
class Jumps {
 public:
  Jumps(const RootSystem& rs, const ApartmentPoint& p);
  const std::vector<Rational>& residues() const { return residues_; }  // sorted, in [0, 1)
  bool contains(const Rational& r) const;
  Rational r_plus(const Rational& r) const;
  std::optional<Rational> r_minus(const Rational& r) const;  // absent at the minimum
  std::vector<Rational> up_to(const Rational& bound) const;

 private:
  std::vector<Rational> residues_;
};

// Action of x on enlarged affine roots fixing the point: F(alpha, n) = (x alpha, n + alpha(p) - (x alpha)(p)).
class AffineFrobenius {
 public:
  // Throws std::invalid_argument if p is not compatible with x (non-integral shift).
  AffineFrobenius(TwistedElement x, ApartmentPoint p);
  AffineRoot apply(const AffineRoot& f) const;
  const TwistedElement& x() const { return x_; }
  const ApartmentPoint& point() const { return p_; }

 private:
  TwistedElement x_;
  ApartmentPoint p_;
  std::vector<long long> shift_;
};

bool point_compatible(const TwistedElement& x, const ApartmentPoint& p);

// Membership in Delta~+ / -Delta~+: positive value and vector part in Delta_x / -Delta_x.
bool in_delta_tilde(const TwistedElement& x, const ApartmentPoint& p, const AffineRoot& f);
bool in_minus_delta_tilde(const TwistedElement& x, const ApartmentPoint& p, const AffineRoot& f);

struct AffineOrbit {
  std::vector<AffineRoot> members;  // base, F(base), F^2(base), ...
  Rational level;
  bool slice = false;
};

// Orbits of F on the positive affine roots up to bound, in the total order of the orbit space.
std::vector<AffineOrbit> f_orbits_and_order(const AffineFrobenius& F, const Rational& bound);

struct OrbitProfile {
  std::vector<AffineRoot> orbit;  // starting at base_f
  AffineRoot base_f;
  std::vector<int> a_sequence;
  int b() const { return static_cast<int>(a_sequence.size()) / 2; }
  LangProfile lang() const { return {static_cast<int>(orbit.size()), a_sequence}; }
};

// base_f must lie in -Delta~+.
OrbitProfile sign_change_sequence(const AffineFrobenius& F, const AffineOrbit& orbit, const AffineRoot& base_f);
// Profile from the first member of the orbit lying in -Delta~+; nullopt for slices.
std::optional<OrbitProfile> orbit_profile(const AffineFrobenius& F, const AffineOrbit& orbit);

struct HoweDatum {
  TwistedElement x;
  std::vector<std::vector<int>> chain;  // Phi_0 < ... < Phi_d = Phi, each sorted root indices
  std::vector<Rational> depths;         // r_0 .. r_d
  int d() const { return static_cast<int>(chain.size()) - 1; }
  Rational depth(int i) const { return i < 0 ? Rational(0) : depths[static_cast<std::size_t>(i)]; }
};

// Throws std::invalid_argument naming the violated condition.
void validate_howe_datum(const HoweDatum& h);
// Chain given by simple-root subsets, expanded to standard Levi subsystems.
HoweDatum howe_from_simple_subsets(const TwistedElement& x, const std::vector<std::vector<int>>& subsets,
                                   std::vector<Rational> depths);

struct HoweClass {
  int i = 0;
  Rational r;
};
HoweClass howe_classify(const HoweDatum& h, int alpha);

struct HoweSupport {
  bool in_K = false, in_K_plus = false, in_H = false, in_E = false;
};
HoweSupport howe_support(const HoweDatum& h, const AffineRoot& f, const ApartmentPoint& p);

struct OrbitPair {
  int orbit = -1, partner = -1;  // indices into LevelLabels::orbits
};

struct LevelLabels {
  Rational r;
  std::vector<Rational> s_values;
  std::vector<std::vector<AffineRoot>> partition;  // C^0 .. C^m
  std::vector<AffineOrbit> orbits;                 // F-orbits of D
  std::vector<OrbitPair> pairs;
  bool symmetric = false;
  bool disjoint = false;
  bool exhaustive = false;
  bool involution = false;
  bool middle_self_paired = false;
};

// M = Phi_{d-1}. r must be a positive integer for the orbit pairing.
LevelLabels howe_levels(const HoweDatum& h, const Rational& r, const ApartmentPoint& p);

// Random datum over the type: chain of x-stable standard-conjugate Levis, integer depths, x convex elliptic.
HoweDatum random_howe_datum(const RootSystemPtr& rs, std::mt19937_64& rng, int max_depth);

}  // namespace convexdl
