#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace convexdl {

using IntMatrix = std::vector<std::vector<int>>;

constexpr int kMaxRank = 8;

// Convention: cartan_matrix[i][j] = <alpha_i, alpha_j^vee> = 2(alpha_i, alpha_j)/(alpha_j, alpha_j).
// symmetrizer[j] = (alpha_j, alpha_j)/2, scaled so the shortest root in each component has 1.
struct CartanDatum {
  std::string series;
  int rank = 0;
  IntMatrix cartan_matrix;
  std::vector<int> symmetrizer;
};

class InvalidCartan : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// "A2", "B3", "G2", "A1xA1", "D4xA2" ... Bourbaki numbering of simple roots.
CartanDatum cartan_from_code(const std::string& code);
// Validates and symmetrizes an explicit matrix. Throws InvalidCartan naming the failed condition.
CartanDatum cartan_from_matrix(const IntMatrix& m, std::string series = "custom");

struct Root {
  std::vector<int> coeffs;
  bool positive() const;
  bool operator==(const Root& o) const { return coeffs == o.coeffs; }
  bool operator<(const Root& o) const { return coeffs < o.coeffs; }
};

// Roots are indexed 0..size()-1. Indices [0, N) are the positive roots ordered by height then
// lexicographically descending (so simple root i has index i); index i + N holds -root(i).
class RootSystem {
 public:
  explicit RootSystem(CartanDatum datum);

  const CartanDatum& datum() const { return datum_; }
  int rank() const { return datum_.rank; }
  int size() const { return static_cast<int>(roots_.size()); }
  int num_positive() const { return npos_; }

  const Root& root(int idx) const { return roots_.at(static_cast<std::size_t>(idx)); }
  const std::vector<int>& coeffs(int idx) const { return roots_[static_cast<std::size_t>(idx)].coeffs; }
  bool is_positive(int idx) const { return idx < npos_; }
  int negate(int idx) const { return idx < npos_ ? idx + npos_ : idx - npos_; }
  int height(int idx) const { return heights_[static_cast<std::size_t>(idx)]; }
  int max_height() const { return heights_.empty() ? 0 : heights_[static_cast<std::size_t>(npos_ - 1)]; }

  // -1 when the vector is not a root.
  int find(const std::vector<int>& coeffs) const;
  int index_of(const Root& r) const;  // throws for foreign roots
  // Index of a+b, or -1 when a+b is not a root.
  int add(int a, int b) const { return add_[static_cast<std::size_t>(a * size() + b)]; }
  int inner(int a, int b) const { return inner_[static_cast<std::size_t>(a * size() + b)]; }
  int pairing(int a, int b) const { return 2 * inner(a, b) / inner(b, b); }
  int reflect(int a, int b) const;  // s_b(a)
  int vector_inner(const std::vector<int>& u, const std::vector<int>& v) const;

  // Permutation of root indices induced by the simple reflection s_i (0-based i).
  const std::vector<int>& simple_reflection(int i) const { return simple_refl_[static_cast<std::size_t>(i)]; }

 private:
  CartanDatum datum_;
  std::vector<Root> roots_;
  std::vector<int> heights_;
  int npos_ = 0;
  std::vector<int> add_;
  std::vector<int> inner_;
  std::vector<std::vector<int>> simple_refl_;
  std::vector<std::pair<std::vector<int>, int>> sorted_lookup_;
};

using RootSystemPtr = std::shared_ptr<const RootSystem>;

RootSystemPtr build_root_system(const CartanDatum& datum);
inline RootSystemPtr build_root_system(const std::string& code) { return build_root_system(cartan_from_code(code)); }

std::optional<Root> add_roots(const RootSystem& rs, const Root& a, const Root& b);
int cartan_pairing(const RootSystem& rs, const Root& a, const Root& b);

// Exact rank over Q of an integer matrix (fraction-free elimination).
int rational_rank(IntMatrix m);

std::string format_root(const RootSystem& rs, int idx);

}  // namespace convexdl
