#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "convexdl/twisted_weyl.hpp"

namespace convexdl {

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Delta_x = Phi+ ∩ x(Phi-), as sorted root indices.
std::vector<int> delta_set(const TwistedElement& x);
// Least i >= 1 with x^i(a) of sign opposite to a. Throws PreconditionError for non-elliptic x.
int n_value(const TwistedElement& x, int root);
std::vector<int> n_table(const TwistedElement& x);

enum class PairDomain { SameSign, AllPairs };

struct QCViolation {
  int alpha, beta, sum;
  bool operator==(const QCViolation&) const = default;
};

struct ConvexityCertificate {
  std::vector<int> delta_x;
  std::vector<int> n_table;
  std::vector<int> n_table_inv;
  std::vector<QCViolation> qc_violations;
  std::vector<QCViolation> qc_violations_inv;
  bool convex = false;
};

std::vector<QCViolation> quasi_convexity_violations(const TwistedElement& x, const std::vector<int>& n,
                                                    PairDomain domain = PairDomain::SameSign);
ConvexityCertificate convexity_certificate(const TwistedElement& x, PairDomain domain = PairDomain::SameSign);
bool is_convex(const TwistedElement& x, PairDomain domain = PairDomain::SameSign);

std::vector<TwistedElement> convex_elements_of_class(const TwistedClass& cls, PairDomain domain = PairDomain::SameSign);
// Parallel kernel over class members and its serial reference; flags[i] = members[i] is convex.
std::vector<char> class_convexity_flags(const TwistedClass& cls, PairDomain domain = PairDomain::SameSign);
std::vector<char> class_convexity_flags_serial(const TwistedClass& cls, PairDomain domain = PairDomain::SameSign);

struct SubadditiveViolation {
  int alpha, beta, i, j, combo;
};
// Checks n_x(i a + j b) <= max(n_x(a), n_x(b)) over a, b > 0. Requires x elliptic and quasi-convex.
std::vector<SubadditiveViolation> subadditive_check(const TwistedElement& x);

struct OrderViolation {
  int clause;
  int alpha, beta;
};
// Both clauses of the ordering property over pairs with beta - alpha in Z>=0 Delta_x. Requires x convex.
std::vector<OrderViolation> ordering_check(const TwistedElement& x);
// Whether v (simple-root coordinates) is a nonnegative integer combination of the given roots.
bool in_nonnegative_cone(const RootSystem& rs, const std::vector<int>& gens, const std::vector<int>& v);

struct LeviSubsystem {
  std::vector<int> roots;       // sorted root indices
  std::vector<int> generators;  // roots spanning it
  bool operator==(const LeviSubsystem& o) const { return roots == o.roots; }
};

// Phi ∩ R-span(generators).
LeviSubsystem levi_from_generators(const RootSystem& rs, std::vector<int> generators);
LeviSubsystem standard_levi(const RootSystem& rs, const std::vector<int>& simple_subset);
bool is_levi(const RootSystem& rs, const std::vector<int>& roots);
bool levi_is_stable(const LeviSubsystem& levi, const TwistedElement& x);
// Every Levi subsystem (all W-conjugates of standard ones), sorted by (size, roots).
std::vector<LeviSubsystem> enumerate_levi_subsystems(const RootSystemPtr& rs, const WeylGroup& W);

struct StandardConvexResult {
  std::optional<TwistedElement> chamber_element;
  std::vector<int> chamber_word;
  std::vector<int> new_simple_roots;
  std::optional<TwistedElement> x_new;
  std::vector<int> standard_subset;  // J with u^{-1}(levi) = Phi_J
  bool levi_is_standard = false;
  bool x_convex = false;
};

// Brute-force search over u in W for a chamber making levi standard and u^{-1} x0 u convex.
StandardConvexResult find_standard_convex(const RootSystemPtr& rs, const DiagramAut& sigma, const LeviSubsystem& levi,
                                          const TwistedElement& x0, const WeylGroup& W);

}  // namespace convexdl
