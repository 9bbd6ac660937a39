#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <tuple>
#include <vector>

#include "convexdl/convexity.hpp"
#include "convexdl/field.hpp"

namespace convexdl {

// Dense coefficient vector indexed by root; entries outside the support set are zero.
struct HAVector {
  std::vector<Elem> entries;
  bool operator==(const HAVector& o) const { return entries == o.entries; }
  bool operator<(const HAVector& o) const { return entries < o.entries; }
};

class BudgetRefused : public std::runtime_error {
 public:
  BudgetRefused(double required_bits, int budget_bits);
  double required_bits;
  int budget_bits;
};

using AdConstantKey = std::tuple<int, int, int>;  // (alpha, beta, i)

struct HASetupInput {
  TwistedElement x;
  std::vector<int> A;                        // x-stable set of roots
  std::vector<int> B;                        // ordered subset of -Delta_x
  std::vector<Elem> ad_coefficients;         // c_j, aligned with B
  std::map<AdConstantKey, Elem> ad_constants;  // c_{alpha,beta,i}; absent keys mean 1
  FieldSpec field;
};

class HASetup {
 public:
  explicit HASetup(HASetupInput in);

  const TwistedElement& x() const { return x_; }
  const TwistedElement& x_inv() const { return xi_; }
  const RootSystem& system() const { return x_.system(); }
  const Field& field() const { return *field_; }
  const std::vector<int>& A() const { return A_; }
  const std::vector<int>& B() const { return B_; }
  const std::vector<Elem>& ad_coefficients() const { return coeffs_; }
  const std::map<AdConstantKey, Elem>& ad_constants() const { return constants_; }
  Elem ad_constant(int alpha, int beta, int i) const;
  bool in_A(int root) const { return in_A_[static_cast<std::size_t>(root)] != 0; }
  bool convex() const { return convex_; }
  const std::vector<int>& n_x() const { return n_; }
  const std::vector<int>& n_x_inv() const { return n_inv_; }

  // Root subsets of A used by the solver and the section map, each sorted by root index.
  const std::vector<int>& A_delta() const { return A_delta_; }          // A cap Delta_x
  const std::vector<int>& A_minus_delta() const { return A_mdelta_; }   // A cap -Delta_x
  const std::vector<int>& P() const { return P_; }                      // A cap x(Phi+) cap Phi+
  const std::vector<int>& x_A_pos() const { return xApos_; }            // x(A cap Phi+)
  const std::vector<int>& A_pos() const { return Apos_; }               // A cap Phi+

  // phi_matrix()[a][g] is the e_a coefficient of phi(e_g).
  const std::vector<std::vector<Elem>>& phi_matrix() const { return M_; }
  HAVector zero() const;
  HAVector basis(int root, Elem c = 1) const;

 private:
  TwistedElement x_, xi_;
  std::shared_ptr<const Field> field_;
  std::vector<int> A_, B_;
  std::vector<Elem> coeffs_;
  std::map<AdConstantKey, Elem> constants_;
  std::vector<char> in_A_;
  bool convex_ = false;
  std::vector<int> n_, n_inv_;
  std::vector<int> A_delta_, A_mdelta_, P_, xApos_, Apos_;
  std::vector<std::vector<Elem>> M_;
};

HAVector apply_ad(const HASetup& s, int beta, Elem c, const HAVector& v);
HAVector apply_phi(const HASetup& s, const HAVector& v);
HAVector apply_twisted_frobenius(const HASetup& s, const HAVector& v);
HAVector apply_twisted_frobenius_inv(const HASetup& s, const HAVector& v);
HAVector ha_add(const Field& f, const HAVector& a, const HAVector& b);
HAVector ha_sub(const Field& f, const HAVector& a, const HAVector& b);
HAVector ha_neg(const Field& f, const HAVector& a);
bool supported_on(const HAVector& v, const std::vector<int>& roots);

// phi(w) - F(w) - z
HAVector v_residual(const HASetup& s, const HAVector& z, const HAVector& w);
bool in_V(const HASetup& s, const HAVector& z, const HAVector& w);

// Two-stage elimination. Throws PreconditionError if x is not convex or a dependency is unresolved.
HAVector solve_uniformization(const HASetup& s, const HAVector& z, const HAVector& boundary);

constexpr int kDefaultEnumerationBits = 20;
double enumeration_bits(const HASetup& s, std::size_t coordinates);
// All F_{q^m}-points of V(phi, x, z), sorted.
std::vector<HAVector> enumerate_V(const HASetup& s, const HAVector& z, int budget_bits = kDefaultEnumerationBits);
std::vector<HAVector> enumerate_V_serial(const HASetup& s, const HAVector& z, int budget_bits = kDefaultEnumerationBits);

// -phi(z) + y - F(z); z on P, y on A cap -Delta_x.
HAVector steinberg_linear_map(const HASetup& s, const HAVector& z, const HAVector& y);

struct SteinbergPreimage {
  HAVector z, y;
  int depth = 0;  // number of descent steps
};
SteinbergPreimage invert_steinberg(const HASetup& s, const HAVector& target);

struct BijectivityReport {
  std::uint64_t domain_size = 0;
  std::uint64_t codomain_size = 0;
  std::uint64_t distinct_images = 0;
  bool cardinality_identity = false;  // |P| + |A cap -Delta_x| == |x(A cap Phi+)|
  bool bijective = false;
};
BijectivityReport steinberg_bijectivity(const HASetup& s, int budget_bits = kDefaultEnumerationBits);
BijectivityReport steinberg_bijectivity_serial(const HASetup& s, int budget_bits = kDefaultEnumerationBits);

// Random convex elliptic x in the coset of sigma, B a shuffled subset of -Delta_x, A a union of
// x-orbits closed under absorption, random constants. |A| * log2(q^m) stays within budget_bits.
HASetupInput random_ha_input(const RootSystemPtr& rs, const DiagramAut& sigma, const FieldSpec& field,
                             std::mt19937_64& rng, int budget_bits);

}  // namespace convexdl
