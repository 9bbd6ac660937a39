#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace convexdl {

using Elem = std::uint8_t;

// Description of F_{q^m}. The modulus is monic of degree e*m over F_p (q = p^e),
// listed lowest coefficient first; empty means "pick the default".
struct FieldSpec {
  int q = 2;
  int m = 1;
  std::vector<int> modulus;
};

class FieldError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Exact table-driven arithmetic in F_{q^m}, with q^m <= 64.
// Elements are indices 0..size()-1 whose base-p digits are the polynomial coefficients.
class Field {
 public:
  explicit Field(const FieldSpec& spec);

  int p() const { return p_; }
  int q() const { return q_; }
  int m() const { return m_; }
  int degree() const { return k_; }  // over F_p
  int size() const { return n_; }
  const std::vector<int>& modulus() const { return modulus_; }
  FieldSpec spec() const { return {q_, m_, modulus_}; }

  Elem add(Elem a, Elem b) const { return add_[a * n_ + b]; }
  Elem sub(Elem a, Elem b) const { return add_[a * n_ + neg_[b]]; }
  Elem neg(Elem a) const { return neg_[a]; }
  Elem mul(Elem a, Elem b) const { return mul_[a * n_ + b]; }
  Elem inv(Elem a) const;
  Elem frob(Elem a) const { return frob_[a]; }          // a^q
  Elem frob_inv(Elem a) const { return frob_inv_[a]; }  // unique b with b^q = a
  Elem pow(Elem a, unsigned long long e) const;
  Elem frob_pow(Elem a, int j) const;  // a^{q^j}, j may be negative
  Elem from_int(long long v) const;    // image of an integer under Z -> F_p
  bool in_base_field(Elem a) const { return frob_[a] == a; }

  std::vector<int> coeffs(Elem a) const;
  Elem from_coeffs(const std::vector<int>& c) const;

 private:
  int p_, e_, q_, m_, k_, n_;
  std::vector<int> modulus_;
  std::vector<Elem> add_, mul_, neg_, inv_, frob_, frob_inv_;
};

bool is_prime(int n);
// Returns (p, e) with q = p^e, or throws FieldError.
std::pair<int, int> prime_power(int q);
// Exhaustive trial division by every monic polynomial of degree <= deg/2.
bool is_irreducible(const std::vector<int>& poly, int p);
// Smallest monic irreducible of the given degree, ordered by the integer sum c_i p^i.
std::vector<int> default_modulus(int p, int degree);

}  // namespace convexdl
