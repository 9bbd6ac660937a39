#pragma once

#include <random>
#include <string>
#include <vector>

#include "convexdl/convexity.hpp"
#include "convexdl/field.hpp"

namespace convexdl {

// Combinatorial shape of one F-orbit: its length and the sign-change markers 0 = a_0 < ... < a_{2b} = length.
struct LangProfile {
  int length = 0;
  std::vector<int> a;
  int b() const { return static_cast<int>(a.size()) / 2; }
};

void validate_profile(const LangProfile& p);

// L(v)_i = v_{i-1}^q - v_i, indices mod length.
std::vector<Elem> lang_map_orbit(const Field& f, const std::vector<Elem>& v);

struct LangCheckReport {
  std::vector<std::string> failures;  // empty when every identity holds
};

// Throws PreconditionError when L(vec) is not supported on the even markers.
LangCheckReport lang_orbit_values(const LangProfile& p, const Field& f, const std::vector<Elem>& vec);

// Chooses the even-marker coordinates uniformly and propagates along the orbit.
std::vector<Elem> sample_lang_hypothesis(const LangProfile& p, const Field& f, std::mt19937_64& rng);

}  // namespace convexdl
