#include "convexdl/field.hpp"

#include <string>
#include <tuple>

namespace convexdl {

namespace {

using Poly = std::vector<int>;

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

// Remainder of a modulo the monic polynomial b over F_p.
Poly poly_mod(Poly a, const Poly& b, int p) {
  trim(a);
  const int db = static_cast<int>(b.size()) - 1;
  while (static_cast<int>(a.size()) - 1 >= db) {
    const int shift = static_cast<int>(a.size()) - 1 - db;
    const int lead = a.back();
    for (int i = 0; i <= db; ++i) a[shift + i] = ((a[shift + i] - lead * b[i]) % p + p) % p;
    trim(a);
  }
  return a;
}

}  // namespace

bool is_prime(int n) {
  if (n < 2) return false;
  for (int d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::pair<int, int> prime_power(int q) {
  if (q < 2) throw FieldError("q must be a prime power >= 2, got " + std::to_string(q));
  int p = 2;
  while (q % p != 0) ++p;
  int e = 0, r = q;
  while (r % p == 0) r /= p, ++e;
  if (r != 1) throw FieldError("q must be a prime power, got " + std::to_string(q));
  return {p, e};
}

bool is_irreducible(const std::vector<int>& poly, int p) {
  Poly f = poly;
  trim(f);
  const int deg = static_cast<int>(f.size()) - 1;
  if (deg < 1 || f.back() != 1) return false;
  for (int d = 1; 2 * d <= deg; ++d) {
    int count = 1;
    for (int i = 0; i < d; ++i) count *= p;
    for (int code = 0; code < count; ++code) {
      Poly g(static_cast<std::size_t>(d + 1), 0);
      int c = code;
      for (int i = 0; i < d; ++i) g[i] = c % p, c /= p;
      g[d] = 1;
      if (poly_mod(f, g, p).empty()) return false;
    }
  }
  return true;
}

std::vector<int> default_modulus(int p, int degree) {
  int count = 1;
  for (int i = 0; i < degree; ++i) count *= p;
  for (int code = 0; code < count; ++code) {
    Poly f(static_cast<std::size_t>(degree + 1), 0);
    int c = code;
    for (int i = 0; i < degree; ++i) f[i] = c % p, c /= p;
    f[degree] = 1;
    if (is_irreducible(f, p)) return f;
  }
  throw FieldError("no irreducible polynomial found");  // unreachable for prime p
}

Field::Field(const FieldSpec& spec) : q_(spec.q), m_(spec.m), modulus_(spec.modulus) {
  std::tie(p_, e_) = prime_power(q_);
  if (m_ < 1) throw FieldError("extension degree m must be positive");
  k_ = e_ * m_;
  n_ = 1;
  for (int i = 0; i < k_; ++i) {
    n_ *= p_;
    if (n_ > 64) throw FieldError("q^m exceeds 64");
  }
  if (modulus_.empty()) modulus_ = default_modulus(p_, k_);
  if (static_cast<int>(modulus_.size()) != k_ + 1) throw FieldError("modulus must have degree e*m = " + std::to_string(k_) + " over F_p");
  for (int c : modulus_)
    if (c < 0 || c >= p_) throw FieldError("modulus coefficients must lie in [0, p)");
  if (!is_irreducible(modulus_, p_)) throw FieldError("modulus is not a monic irreducible polynomial over F_p");

  const std::size_t nn = static_cast<std::size_t>(n_) * n_;
  add_.resize(nn);
  mul_.resize(nn);
  neg_.resize(n_);
  for (int a = 0; a < n_; ++a) {
    const auto ca = coeffs(static_cast<Elem>(a));
    std::vector<int> cn(ca.size());
    for (std::size_t i = 0; i < ca.size(); ++i) cn[i] = (p_ - ca[i]) % p_;
    neg_[a] = from_coeffs(cn);
    for (int b = 0; b < n_; ++b) {
      const auto cb = coeffs(static_cast<Elem>(b));
      std::vector<int> s(ca.size());
      for (std::size_t i = 0; i < ca.size(); ++i) s[i] = (ca[i] + cb[i]) % p_;
      add_[a * n_ + b] = from_coeffs(s);
      Poly prod(static_cast<std::size_t>(2 * k_), 0);
      for (int i = 0; i < k_; ++i)
        for (int j = 0; j < k_; ++j) prod[i + j] = (prod[i + j] + ca[i] * cb[j]) % p_;
      Poly r = poly_mod(prod, modulus_, p_);
      r.resize(static_cast<std::size_t>(k_), 0);
      mul_[a * n_ + b] = from_coeffs(r);
    }
  }
  inv_.assign(n_, 0);
  for (int a = 1; a < n_; ++a)
    for (int b = 1; b < n_; ++b)
      if (mul_[a * n_ + b] == 1) inv_[a] = static_cast<Elem>(b);
  frob_.resize(n_);
  for (int a = 0; a < n_; ++a) frob_[a] = pow(static_cast<Elem>(a), static_cast<unsigned long long>(q_));
  // q-th root as the (m-1)-fold q-power.
  frob_inv_.resize(n_);
  for (int a = 0; a < n_; ++a) {
    Elem b = static_cast<Elem>(a);
    for (int i = 0; i < m_ - 1; ++i) b = frob_[b];
    frob_inv_[a] = b;
  }
}

Elem Field::inv(Elem a) const {
  if (a == 0) throw FieldError("inverse of zero");
  return inv_[a];
}

Elem Field::pow(Elem a, unsigned long long e) const {
  Elem r = 1, b = a;
  while (e) {
    if (e & 1) r = mul(r, b);
    b = mul(b, b);
    e >>= 1;
  }
  return r;
}

Elem Field::frob_pow(Elem a, int j) const {
  j %= m_;
  if (j < 0) j += m_;
  for (int i = 0; i < j; ++i) a = frob_[a];
  return a;
}

Elem Field::from_int(long long v) const {
  long long r = v % p_;
  if (r < 0) r += p_;
  return static_cast<Elem>(r);
}

std::vector<int> Field::coeffs(Elem a) const {
  std::vector<int> c(static_cast<std::size_t>(k_));
  int v = a;
  for (int i = 0; i < k_; ++i) c[i] = v % p_, v /= p_;
  return c;
}

Elem Field::from_coeffs(const std::vector<int>& c) const {
  if (static_cast<int>(c.size()) != k_) throw FieldError("coefficient vector has wrong length");
  int v = 0;
  for (int i = k_ - 1; i >= 0; --i) {
    if (c[i] < 0 || c[i] >= p_) throw FieldError("coefficient out of range");
    v = v * p_ + c[i];
  }
  return static_cast<Elem>(v);
}

}  // namespace convexdl
