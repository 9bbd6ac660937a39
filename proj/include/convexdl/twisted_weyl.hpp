#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "convexdl/root_system.hpp"

namespace convexdl {

// Permutation of simple-root indices (0-based) preserving the Cartan matrix.
struct DiagramAut {
  std::vector<int> perm;
  bool is_identity() const;
  int order() const;
  bool operator==(const DiagramAut& o) const { return perm == o.perm; }
};

DiagramAut identity_aut(int rank);
// Throws std::invalid_argument unless perm is a Cartan-preserving permutation.
DiagramAut make_diagram_aut(const RootSystem& rs, std::vector<int> perm);
// All diagram automorphisms, identity first, then lexicographic by perm.
std::vector<DiagramAut> diagram_automorphisms(const RootSystem& rs);
// Root permutation induced by sigma.
std::vector<int> diagram_action(const RootSystem& rs, const DiagramAut& sigma);

// x = w sigma^k acting on roots; action[a] = x(a), computed as sigma first, then w.
class TwistedElement {
 public:
  TwistedElement() = default;
  TwistedElement(RootSystemPtr rs, std::vector<int> action, DiagramAut sigma, int sigma_power);

  static TwistedElement identity(RootSystemPtr rs, DiagramAut sigma = {});
  // word entries are 1-based simple reflection labels; the element is s_{w1} s_{w2} ... sigma^k.
  static TwistedElement from_word(RootSystemPtr rs, const std::vector<int>& word, DiagramAut sigma = {}, int sigma_power = 0);
  static TwistedElement pure_sigma(RootSystemPtr rs, const DiagramAut& sigma);

  int act(int root) const { return action_[static_cast<std::size_t>(root)]; }
  const std::vector<int>& action() const { return action_; }
  const DiagramAut& sigma() const { return sigma_; }
  int sigma_power() const { return sigma_power_; }
  const RootSystem& system() const { return *rs_; }
  const RootSystemPtr& system_ptr() const { return rs_; }
  // Images of the simple roots; determines the element.
  std::vector<int> simple_images() const;
  // Column j holds the coefficients of x(alpha_j).
  IntMatrix matrix() const;
  // Permutation of roots of the W-part, i.e. x composed with sigma^{-k}.
  std::vector<int> w_action() const;
  int order() const;

  bool operator==(const TwistedElement& o) const { return action_ == o.action_; }
  bool operator<(const TwistedElement& o) const { return action_ < o.action_; }

 private:
  RootSystemPtr rs_;
  std::vector<int> action_;
  DiagramAut sigma_;
  int sigma_power_ = 0;
};

Root act(const TwistedElement& x, const Root& a);
TwistedElement twisted_product(const TwistedElement& x, const TwistedElement& y);
TwistedElement twisted_inverse(const TwistedElement& x);
TwistedElement twisted_power(const TwistedElement& x, int k);
TwistedElement conjugate(const TwistedElement& u, const TwistedElement& x);  // u x u^{-1}
bool is_elliptic(const TwistedElement& x);
int coxeter_length(const TwistedElement& x);  // |{a > 0 : w(a) < 0}| of the W-part

class EnumerationRefused : public std::runtime_error {
 public:
  EnumerationRefused(std::size_t required, std::size_t cap);
  std::size_t required;
  std::size_t cap;
};

constexpr std::size_t kDefaultWeylCap = 51840;

// Elements of W in breadth-first order by length (left multiplication by s_1..s_l), with reduced words.
struct WeylGroup {
  std::vector<TwistedElement> elements;
  std::vector<std::vector<int>> words;
};
std::size_t weyl_order(const RootSystem& rs);
WeylGroup enumerate_weyl_group(const RootSystemPtr& rs, std::size_t cap = kDefaultWeylCap);

struct TwistedClass {
  std::vector<TwistedElement> members;
  bool elliptic = false;
};

// Classes of the coset W sigma under W-conjugation, ordered by first appearance in the coset
// enumeration order (w sigma for w in WeylGroup order).
std::vector<TwistedClass> enumerate_twisted_classes(const RootSystemPtr& rs, const DiagramAut& sigma,
                                                    std::size_t cap = kDefaultWeylCap);

}  // namespace convexdl
