#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "convexdl/affine.hpp"
#include "convexdl/field.hpp"
#include "convexdl/ha_space.hpp"

namespace convexdl {

constexpr int kMaxMatrixSize = 3;
constexpr int kMaxLevel = 2;

// k[w]/w^{r+1}; coefficient i multiplies w^i.
struct TElem {
  std::array<Elem, kMaxLevel + 1> c{};
  bool operator==(const TElem& o) const { return c == o.c; }
};

class TruncatedRing {
 public:
  TruncatedRing(const FieldSpec& base, int level);

  const Field& field() const { return *field_; }
  std::shared_ptr<const Field> field_ptr() const { return field_; }
  int level() const { return r_; }
  std::uint64_t size() const;  // |k|^{r+1}

  TElem zero() const { return {}; }
  TElem one() const;
  TElem scalar(Elem a) const;
  TElem element(std::uint64_t index) const;  // base-|k| digits, lowest coefficient first
  std::uint64_t index(const TElem& a) const;

  TElem add(const TElem& a, const TElem& b) const;
  TElem sub(const TElem& a, const TElem& b) const;
  TElem neg(const TElem& a) const;
  TElem mul(const TElem& a, const TElem& b) const;
  bool is_unit(const TElem& a) const { return a.c[0] != 0; }
  TElem inv(const TElem& a) const;  // throws FieldError for non-units
  TElem frob(const TElem& a) const;
  TElem frob_inv(const TElem& a) const;
  int valuation(const TElem& a) const;  // r+1 for zero

 private:
  std::shared_ptr<const Field> field_;
  int r_;
};

struct Matrix {
  int n = 0;
  std::array<TElem, kMaxMatrixSize * kMaxMatrixSize> e{};
  TElem& at(int i, int j) { return e[static_cast<std::size_t>(i * kMaxMatrixSize + j)]; }
  const TElem& at(int i, int j) const { return e[static_cast<std::size_t>(i * kMaxMatrixSize + j)]; }
  bool operator==(const Matrix& o) const { return n == o.n && e == o.e; }
};

Matrix identity_matrix(const TruncatedRing& R, int n);
Matrix mat_mul(const TruncatedRing& R, const Matrix& a, const Matrix& b);
TElem mat_det(const TruncatedRing& R, const Matrix& a);
Matrix mat_inv(const TruncatedRing& R, const Matrix& a);  // throws FieldError if det is not a unit
Matrix mat_transpose(const Matrix& a);
Matrix mat_frob(const TruncatedRing& R, const Matrix& a);
Matrix mat_frob_inv(const TruncatedRing& R, const Matrix& a);
std::string format_matrix(const TruncatedRing& R, const Matrix& a);

// Type A_{n-1}: position (i, j), i != j, carries the root e_i - e_j.
class TypeARoots {
 public:
  explicit TypeARoots(int n);
  const RootSystemPtr& system() const { return rs_; }
  int n() const { return n_; }
  int root(int i, int j) const { return root_[static_cast<std::size_t>(i * n_ + j)]; }
  std::pair<int, int> position(int root) const { return pos_[static_cast<std::size_t>(root)]; }

 private:
  int n_;
  RootSystemPtr rs_;
  std::vector<int> root_;
  std::vector<std::pair<int, int>> pos_;
};

// Permutation pi of {0..n-1} with w(e_i - e_j) = e_{pi(i)} - e_{pi(j)} for the W-part w of x.
std::vector<int> weyl_permutation(const TypeARoots& roots, const TwistedElement& x);

struct TwistSpec {
  std::vector<int> word;  // 1-based simple reflections
  bool outer = false;     // compose with the transpose-inverse involution
};

struct ModelSpec {
  int n = 2;
  int q = 2;
  int m = 0;  // degree of the counting field over F_q; 0 picks the least m with F^m = sigma_q^m
  int r = 0;
  TwistSpec twist;
};

constexpr std::uint64_t kDefaultGroupBudget = 20'000'000;

// SL_n over k[w]/w^{r+1}, k = F_{q^m}, with F(g) = A theta^eps(sigma_q(g)) A^{-1}.
class GroupModel {
 public:
  const ModelSpec& spec() const { return spec_; }
  int n() const { return spec_.n; }
  const TruncatedRing& ring() const { return *ring_; }
  const TypeARoots& roots() const { return *roots_; }
  const TwistedElement& x() const { return x_; }  // action of F on root subgroups
  bool elliptic() const { return elliptic_; }
  const Matrix& twist_matrix() const { return A_; }
  std::uint64_t group_order() const { return sl_order_; }  // |SL_n(k[w]/w^{r+1})|

  Matrix frobenius(const Matrix& g) const;
  Matrix frobenius_inv(const Matrix& g) const;
  Matrix lang(const Matrix& g) const;  // g^{-1} F(g)

 private:
  friend GroupModel build_model(const ModelSpec&, std::uint64_t);
  ModelSpec spec_;
  std::shared_ptr<const TruncatedRing> ring_;
  std::shared_ptr<const TypeARoots> roots_;
  TwistedElement x_;
  bool elliptic_ = false;
  Matrix A_, A_inv_;
  std::uint64_t sl_order_ = 0;
};

// Throws BudgetRefused when |SL_n(ring)| exceeds budget, std::invalid_argument for bad specs.
GroupModel build_model(const ModelSpec& spec, std::uint64_t budget = kDefaultGroupBudget);
bool frobenius_is_homomorphism(const GroupModel& model, std::mt19937_64& rng, int pairs);

// Calls fn(g) for every element of SL_n(ring); fn must be thread-safe in the parallel version.
void for_each_sl(const GroupModel& model, const std::function<void(const Matrix&)>& fn);

// Subgroup membership.
bool in_torus(const GroupModel& model, const Matrix& g);
bool in_lower_unipotent(const GroupModel& model, const Matrix& g);
// Unipotent matrix supported on the given roots (sorted root indices).
bool supported_unipotent(const GroupModel& model, const Matrix& g, const std::vector<int>& roots);

struct IdentityRow {
  std::string name;
  std::uint64_t lhs = 0, rhs = 0;
  bool pass = false;
};

struct PointSetReport {
  std::map<std::string, std::uint64_t> counts;
  std::vector<IdentityRow> identities;
  bool all_pass() const;
};

// Counts X_r, Y_r, G^F, T^F and, given a Howe datum for x, the strata X^flat, Z, Z^K, X^natural.
PointSetReport enumerate_dl_sets(const GroupModel& model, const HoweDatum* howe = nullptr);
PointSetReport enumerate_dl_sets_serial(const GroupModel& model, const HoweDatum* howe = nullptr);

// The Howe subgroup membership tests at the origin, exposed for tests.
class HoweGroups {
 public:
  HoweGroups(const GroupModel& model, const HoweDatum& h);
  bool in_K(const Matrix& g) const;
  bool in_I(const Matrix& g) const;  // (K cap U)(E cap T)(K+ cap Ubar)
  bool in_E_torus(const Matrix& g) const;
  int affine_factor_dim() const { return m_prime_; }
  int torus_factor_dim() const;  // dim (E cap T_r)

 private:
  bool coeffs_allowed(const TElem& a, int root, int kind) const;
  const GroupModel& model_;
  HoweDatum h_;
  std::vector<std::array<char, kMaxLevel + 1>> K_, Kp_;  // per root and level
  std::array<char, kMaxLevel + 1> E_slice_{};
  int m_prime_ = 0;
};

struct CrossSectionReport {
  std::uint64_t domain_size = 0;
  std::uint64_t codomain_size = 0;
  std::uint64_t distinct_images = 0;
  bool lands_in_target = false;
  bool injective = false;
  bool surjective = false;
  bool bijective() const { return lands_in_target && injective && surjective; }
};

// (h, g) -> h^{-1} g Psi(h) on ({}^xU cap U) x (Ubar cap {}^xU) over F_{q^m}, Psi(h) = D P theta^eps(h) P^{-1} D^{-1}.
// Throws PreconditionError with the convexity certificate when x is not convex elliptic,
// unless allow_nonconvex is set.
CrossSectionReport cross_section_group_check(const TwistedElement& x, const FieldSpec& field,
                                             const std::vector<Elem>& psi_scalars, bool allow_nonconvex = false);
CrossSectionReport cross_section_group_check_serial(const TwistedElement& x, const FieldSpec& field,
                                                    const std::vector<Elem>& psi_scalars,
                                                    bool allow_nonconvex = false);

}  // namespace convexdl
