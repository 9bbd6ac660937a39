#include "convexdl/group_models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "convexdl/convexity.hpp"

namespace convexdl {

// ---------------------------------------------------------------- ring

TruncatedRing::TruncatedRing(const FieldSpec& base, int level)
    : field_(std::make_shared<const Field>(base)), r_(level) {
  if (level < 0 || level > kMaxLevel) throw std::invalid_argument("truncation level must lie in [0, " + std::to_string(kMaxLevel) + "]");
}

std::uint64_t TruncatedRing::size() const {
  std::uint64_t s = 1;
  for (int i = 0; i <= r_; ++i) s *= static_cast<std::uint64_t>(field_->size());
  return s;
}

TElem TruncatedRing::one() const { return scalar(1); }

TElem TruncatedRing::scalar(Elem a) const {
  TElem t;
  t.c[0] = a;
  return t;
}

TElem TruncatedRing::element(std::uint64_t index) const {
  TElem t;
  const auto Q = static_cast<std::uint64_t>(field_->size());
  for (int i = 0; i <= r_; ++i) t.c[i] = static_cast<Elem>(index % Q), index /= Q;
  return t;
}

std::uint64_t TruncatedRing::index(const TElem& a) const {
  std::uint64_t v = 0;
  for (int i = r_; i >= 0; --i) v = v * static_cast<std::uint64_t>(field_->size()) + a.c[i];
  return v;
}

TElem TruncatedRing::add(const TElem& a, const TElem& b) const {
  TElem t;
  for (int i = 0; i <= r_; ++i) t.c[i] = field_->add(a.c[i], b.c[i]);
  return t;
}

TElem TruncatedRing::sub(const TElem& a, const TElem& b) const {
  TElem t;
  for (int i = 0; i <= r_; ++i) t.c[i] = field_->sub(a.c[i], b.c[i]);
  return t;
}

TElem TruncatedRing::neg(const TElem& a) const {
  TElem t;
  for (int i = 0; i <= r_; ++i) t.c[i] = field_->neg(a.c[i]);
  return t;
}

TElem TruncatedRing::mul(const TElem& a, const TElem& b) const {
  TElem t;
  for (std::size_t k = 0; k < t.c.size() && static_cast<int>(k) <= r_; ++k) {
    Elem s = 0;
    for (std::size_t i = 0; i <= k; ++i)
      if (a.c[i] != 0) s = field_->add(s, field_->mul(a.c[i], b.c[k - i]));
    t.c[k] = s;
  }
  return t;
}

TElem TruncatedRing::inv(const TElem& a) const {
  if (!is_unit(a)) throw FieldError("element of positive valuation is not invertible");
  // Solve a * b = 1 coefficient by coefficient.
  TElem b;
  const Elem a0inv = field_->inv(a.c[0]);
  b.c[0] = a0inv;
  for (int k = 1; k <= r_; ++k) {
    Elem s = 0;
    for (int i = 1; i <= k; ++i) s = field_->add(s, field_->mul(a.c[i], b.c[k - i]));
    b.c[k] = field_->mul(field_->neg(s), a0inv);
  }
  return b;
}

TElem TruncatedRing::frob(const TElem& a) const {
  TElem t;
  for (int i = 0; i <= r_; ++i) t.c[i] = field_->frob(a.c[i]);
  return t;
}

TElem TruncatedRing::frob_inv(const TElem& a) const {
  TElem t;
  for (int i = 0; i <= r_; ++i) t.c[i] = field_->frob_inv(a.c[i]);
  return t;
}

int TruncatedRing::valuation(const TElem& a) const {
  for (int i = 0; i <= r_; ++i)
    if (a.c[i] != 0) return i;
  return r_ + 1;
}

// ---------------------------------------------------------------- matrices

Matrix identity_matrix(const TruncatedRing& R, int n) {
  Matrix m;
  m.n = n;
  for (int i = 0; i < n; ++i) m.at(i, i) = R.one();
  return m;
}

Matrix mat_mul(const TruncatedRing& R, const Matrix& a, const Matrix& b) {
  Matrix m;
  m.n = a.n;
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j) {
      TElem s;
      for (int k = 0; k < a.n; ++k) s = R.add(s, R.mul(a.at(i, k), b.at(k, j)));
      m.at(i, j) = s;
    }
  return m;
}

namespace {

TElem minor2(const TruncatedRing& R, const Matrix& a, int r0, int r1, int c0, int c1) {
  return R.sub(R.mul(a.at(r0, c0), a.at(r1, c1)), R.mul(a.at(r0, c1), a.at(r1, c0)));
}

Matrix adjugate(const TruncatedRing& R, const Matrix& a) {
  Matrix m;
  m.n = a.n;
  if (a.n == 1) {
    m.at(0, 0) = R.one();
  } else if (a.n == 2) {
    m.at(0, 0) = a.at(1, 1);
    m.at(1, 1) = a.at(0, 0);
    m.at(0, 1) = R.neg(a.at(0, 1));
    m.at(1, 0) = R.neg(a.at(1, 0));
  } else {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        // cofactor C_{ji} placed at (i, j)
        const int r0 = j == 0 ? 1 : 0, r1 = j == 2 ? 1 : 2;
        const int c0 = i == 0 ? 1 : 0, c1 = i == 2 ? 1 : 2;
        const TElem mnr = minor2(R, a, r0, r1, c0, c1);
        m.at(i, j) = (i + j) % 2 == 0 ? mnr : R.neg(mnr);
      }
  }
  return m;
}

}  // namespace

TElem mat_det(const TruncatedRing& R, const Matrix& a) {
  if (a.n == 1) return a.at(0, 0);
  if (a.n == 2) return minor2(R, a, 0, 1, 0, 1);
  TElem d = R.mul(a.at(0, 0), minor2(R, a, 1, 2, 1, 2));
  d = R.sub(d, R.mul(a.at(0, 1), minor2(R, a, 1, 2, 0, 2)));
  return R.add(d, R.mul(a.at(0, 2), minor2(R, a, 1, 2, 0, 1)));
}

Matrix mat_inv(const TruncatedRing& R, const Matrix& a) {
  const TElem d = mat_det(R, a);
  const TElem di = R.inv(d);
  Matrix m = adjugate(R, a);
  if (!(d == R.one()))
    for (auto& e : m.e) e = R.mul(e, di);
  return m;
}

Matrix mat_transpose(const Matrix& a) {
  Matrix m;
  m.n = a.n;
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j) m.at(i, j) = a.at(j, i);
  return m;
}

Matrix mat_frob(const TruncatedRing& R, const Matrix& a) {
  Matrix m = a;
  for (auto& e : m.e) e = R.frob(e);
  return m;
}

Matrix mat_frob_inv(const TruncatedRing& R, const Matrix& a) {
  Matrix m = a;
  for (auto& e : m.e) e = R.frob_inv(e);
  return m;
}

std::string format_matrix(const TruncatedRing& R, const Matrix& a) {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < a.n; ++i) {
    os << (i ? "; " : "");
    for (int j = 0; j < a.n; ++j) {
      os << (j ? " " : "") << "(";
      for (int k = 0; k <= R.level(); ++k) os << (k ? "," : "") << static_cast<int>(a.at(i, j).c[k]);
      os << ")";
    }
  }
  os << "]";
  return os.str();
}

namespace {

// theta(g) = J g^{-T} J with J the antidiagonal permutation matrix.
Matrix theta(const TruncatedRing& R, const Matrix& g) {
  const Matrix t = mat_transpose(mat_inv(R, g));
  Matrix m;
  m.n = g.n;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) m.at(i, j) = t.at(g.n - 1 - i, g.n - 1 - j);
  return m;
}

Matrix permutation_matrix(const TruncatedRing& R, const std::vector<int>& pi) {
  Matrix m;
  m.n = static_cast<int>(pi.size());
  for (int j = 0; j < m.n; ++j) m.at(pi[j], j) = R.one();
  return m;
}

Matrix conj(const TruncatedRing& R, const Matrix& a, const Matrix& g, const Matrix& a_inv) {
  return mat_mul(R, mat_mul(R, a, g), a_inv);
}

std::uint64_t ipow(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// Whether x acts through a nontrivial diagram automorphism.
bool has_outer_part(const TwistedElement& x) { return x.w_action() != x.action(); }

}  // namespace

// ---------------------------------------------------------------- type A roots

TypeARoots::TypeARoots(int n) : n_(n) {
  if (n < 2 || n > kMaxMatrixSize) throw std::invalid_argument("matrix size must lie in [2, " + std::to_string(kMaxMatrixSize) + "]");
  rs_ = build_root_system("A" + std::to_string(n - 1));
  root_.assign(static_cast<std::size_t>(n * n), -1);
  pos_.assign(static_cast<std::size_t>(rs_->size()), {-1, -1});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      std::vector<int> c(static_cast<std::size_t>(n - 1), 0);
      for (int k = std::min(i, j); k < std::max(i, j); ++k) c[k] = i < j ? 1 : -1;
      const int idx = rs_->find(c);
      root_[i * n + j] = idx;
      pos_[idx] = {i, j};
    }
}

std::vector<int> weyl_permutation(const TypeARoots& roots, const TwistedElement& x) {
  const int n = roots.n();
  const auto w = x.w_action();
  std::vector<int> pi(static_cast<std::size_t>(n));
  std::iota(pi.begin(), pi.end(), 0);
  do {
    bool ok = true;
    for (int i = 0; i < n && ok; ++i)
      for (int j = 0; j < n && ok; ++j)
        if (i != j && w[roots.root(i, j)] != roots.root(pi[i], pi[j])) ok = false;
    if (ok) return pi;
  } while (std::next_permutation(pi.begin(), pi.end()));
  throw std::logic_error("W-part of x is not induced by a permutation");
}

// ---------------------------------------------------------------- model

Matrix GroupModel::frobenius(const Matrix& g) const {
  Matrix h = mat_frob(*ring_, g);
  if (spec_.twist.outer) h = theta(*ring_, h);
  return conj(*ring_, A_, h, A_inv_);
}

Matrix GroupModel::frobenius_inv(const Matrix& g) const {
  Matrix h = conj(*ring_, A_inv_, g, A_);
  if (spec_.twist.outer) h = theta(*ring_, h);
  return mat_frob_inv(*ring_, h);
}

Matrix GroupModel::lang(const Matrix& g) const { return mat_mul(*ring_, mat_inv(*ring_, g), frobenius(g)); }

GroupModel build_model(const ModelSpec& spec, std::uint64_t budget) {
  GroupModel M;
  M.spec_ = spec;
  M.roots_ = std::make_shared<const TypeARoots>(spec.n);
  const auto& rs = M.roots_->system();
  if (spec.twist.outer && spec.n < 3) throw std::invalid_argument("SL_2 has no outer twist");
  for (int s : spec.twist.word)
    if (s < 1 || s >= spec.n) throw std::invalid_argument("twist word entry " + std::to_string(s) + " out of range");
  DiagramAut sigma = identity_aut(rs->rank());
  if (spec.twist.outer)
    for (const auto& a : diagram_automorphisms(*rs))
      if (a.perm != sigma.perm) sigma = a;
  M.x_ = TwistedElement::from_word(rs, spec.twist.word, sigma, spec.twist.outer ? 1 : 0);
  M.elliptic_ = is_elliptic(M.x_);

  const int order = M.x_.order();
  if (spec.m == 0) M.spec_.m = order;
  else if (spec.m % order != 0)
    throw std::invalid_argument("counting degree m = " + std::to_string(spec.m) + " must be a multiple of the order " +
                                std::to_string(order) + " of x");
  M.ring_ = std::make_shared<const TruncatedRing>(FieldSpec{spec.q, M.spec_.m, {}}, spec.r);

  const auto Q = static_cast<std::uint64_t>(M.ring_->field().size());
  std::uint64_t sl = Q * (Q * Q - 1);
  if (spec.n == 3) sl = Q * Q * Q * (Q * Q - 1) * (Q * Q * Q - 1);
  M.sl_order_ = sl * ipow(Q, spec.r * (spec.n * spec.n - 1));
  if (M.sl_order_ > budget)
    throw BudgetRefused(std::log2(static_cast<double>(M.sl_order_)), static_cast<int>(std::log2(static_cast<double>(budget))));

  const auto pi = weyl_permutation(*M.roots_, M.x_);
  M.A_ = permutation_matrix(*M.ring_, pi);
  M.A_inv_ = mat_transpose(M.A_);

  // F must carry the root subgroup of alpha onto that of x(alpha).
  for (int a = 0; a < rs->size(); ++a) {
    const auto [i, j] = M.roots_->position(a);
    Matrix u = identity_matrix(*M.ring_, spec.n);
    u.at(i, j) = M.ring_->one();
    const Matrix v = M.frobenius(u);
    const auto [k, l] = M.roots_->position(M.x_.act(a));
    for (int s = 0; s < spec.n; ++s)
      for (int t = 0; t < spec.n; ++t) {
        const bool expect_nonzero = s == t || (s == k && t == l);
        if ((v.at(s, t) == M.ring_->zero()) == expect_nonzero) throw std::logic_error("Frobenius twist does not realize x");
      }
  }
  return M;
}

namespace {

Matrix random_sl(const GroupModel& M, std::mt19937_64& rng) {
  const auto& R = M.ring();
  Matrix g = identity_matrix(R, M.n());
  for (int step = 0; step < 12; ++step) {
    Matrix u = identity_matrix(R, M.n());
    const int a = static_cast<int>(rng() % static_cast<unsigned>(M.roots().system()->size()));
    const auto [i, j] = M.roots().position(a);
    u.at(i, j) = R.element(rng() % R.size());
    g = mat_mul(R, g, u);
  }
  // A torus factor diag(t, t^{-1}, 1...).
  TElem t = R.element(rng() % R.size());
  t.c[0] = static_cast<Elem>(1 + rng() % static_cast<unsigned>(R.field().size() - 1));
  Matrix d = identity_matrix(R, M.n());
  d.at(0, 0) = t;
  d.at(1, 1) = R.inv(t);
  return mat_mul(R, g, d);
}

}  // namespace

bool frobenius_is_homomorphism(const GroupModel& model, std::mt19937_64& rng, int pairs) {
  const auto& R = model.ring();
  for (int k = 0; k < pairs; ++k) {
    const Matrix g = random_sl(model, rng), h = random_sl(model, rng);
    if (!(model.frobenius(mat_mul(R, g, h)) == mat_mul(R, model.frobenius(g), model.frobenius(h)))) return false;
    if (!(model.frobenius_inv(model.frobenius(g)) == g)) return false;
    if (!(mat_det(R, model.frobenius(g)) == R.one())) return false;
  }
  return true;
}

// ---------------------------------------------------------------- enumeration

namespace {

std::uint64_t outer_count(const GroupModel& M) { return ipow(M.ring().size(), M.n()); }

// Every g in SL_n(ring) whose first row has the given index.
template <class Visit>
void sl_with_first_row(const GroupModel& M, std::uint64_t outer, Visit&& visit) {
  const auto& R = M.ring();
  const std::uint64_t S = R.size();
  const int n = M.n();
  Matrix g;
  g.n = n;
  std::uint64_t o = outer;
  for (int j = 0; j < n; ++j) g.at(0, j) = R.element(o % S), o /= S;
  if (n == 2) {
    const TElem a = g.at(0, 0), b = g.at(0, 1);
    if (R.is_unit(a)) {
      const TElem ai = R.inv(a);
      for (std::uint64_t s = 0; s < S; ++s) {
        g.at(1, 0) = R.element(s);
        g.at(1, 1) = R.mul(R.add(R.one(), R.mul(b, g.at(1, 0))), ai);
        visit(g);
      }
    } else if (R.is_unit(b)) {
      const TElem bi = R.inv(b);
      for (std::uint64_t s = 0; s < S; ++s) {
        g.at(1, 1) = R.element(s);
        g.at(1, 0) = R.mul(R.sub(R.mul(a, g.at(1, 1)), R.one()), bi);
        visit(g);
      }
    }
    return;
  }
  // n == 3: free second row, then solve row3 . (row1 x row2) = 1.
  const std::uint64_t S3 = S * S * S;
  for (std::uint64_t r2 = 0; r2 < S3; ++r2) {
    std::uint64_t v = r2;
    for (int j = 0; j < 3; ++j) g.at(1, j) = R.element(v % S), v /= S;
    const TElem c[3] = {minor2(R, g, 0, 1, 1, 2), R.neg(minor2(R, g, 0, 1, 0, 2)), minor2(R, g, 0, 1, 0, 1)};
    int piv = -1;
    for (int k = 0; k < 3 && piv < 0; ++k)
      if (R.is_unit(c[k])) piv = k;
    if (piv < 0) continue;
    const TElem ci = R.inv(c[piv]);
    const int f0 = piv == 0 ? 1 : 0, f1 = piv == 2 ? 1 : 2;
    for (std::uint64_t s = 0; s < S * S; ++s) {
      g.at(2, f0) = R.element(s % S);
      g.at(2, f1) = R.element(s / S);
      const TElem rest = R.add(R.mul(g.at(2, f0), c[f0]), R.mul(g.at(2, f1), c[f1]));
      g.at(2, piv) = R.mul(R.sub(R.one(), rest), ci);
      visit(g);
    }
  }
}

template <class Acc, class Fn>
Acc reduce_sl(const GroupModel& M, bool parallel, Fn fn) {
  Acc total{};
  const auto outer = static_cast<long long>(outer_count(M));
  if (!parallel) {
    for (long long o = 0; o < outer; ++o) sl_with_first_row(M, static_cast<std::uint64_t>(o), [&](const Matrix& g) { fn(total, g); });
    return total;
  }
#pragma omp parallel
  {
    Acc local{};
#pragma omp for schedule(dynamic, 4)
    for (long long o = 0; o < outer; ++o) sl_with_first_row(M, static_cast<std::uint64_t>(o), [&](const Matrix& g) { fn(local, g); });
#pragma omp critical
    total += local;
  }
  return total;
}

}  // namespace

void for_each_sl(const GroupModel& model, const std::function<void(const Matrix&)>& fn) {
  for (std::uint64_t o = 0; o < outer_count(model); ++o) sl_with_first_row(model, o, fn);
}

bool in_torus(const GroupModel& model, const Matrix& g) {
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      if (i != j && !(g.at(i, j) == model.ring().zero())) return false;
  return true;
}

bool in_lower_unipotent(const GroupModel& model, const Matrix& g) {
  for (int i = 0; i < g.n; ++i) {
    if (!(g.at(i, i) == model.ring().one())) return false;
    for (int j = i + 1; j < g.n; ++j)
      if (!(g.at(i, j) == model.ring().zero())) return false;
  }
  return true;
}

bool supported_unipotent(const GroupModel& model, const Matrix& g, const std::vector<int>& roots) {
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      if (i == j) {
        if (!(g.at(i, i) == model.ring().one())) return false;
      } else if (!(g.at(i, j) == model.ring().zero()) && !std::binary_search(roots.begin(), roots.end(), model.roots().root(i, j))) {
        return false;
      }
    }
  return true;
}

bool PointSetReport::all_pass() const {
  return std::all_of(identities.begin(), identities.end(), [](const IdentityRow& r) { return r.pass; });
}

// ---------------------------------------------------------------- Howe groups

HoweGroups::HoweGroups(const GroupModel& model, const HoweDatum& h) : model_(model), h_(h) {
  if (h.x.action() != model.x().action()) throw std::invalid_argument("inconsistent Howe datum: x differs from the model's twist");
  validate_howe_datum(h);
  const auto& rs = *model.roots().system();
  const int r = model.ring().level();
  const auto p = origin(rs);
  // E cap T must be a full filtration step of T; proper Levi tori below depth r_{d-1} are not modelled.
  const int d = h.d();
  for (int i = 0; i < d; ++i) {
    if (h.chain[i].empty()) continue;
    for (int n = 1; n <= r; ++n)
      if (Rational(n) > h.depth(i - 1) && Rational(n) <= h.depth(d - 1))
        throw std::invalid_argument("Howe datum with nontoral Levi below depth r_{d-1} is not supported by the torus model");
  }
  K_.assign(static_cast<std::size_t>(rs.size()), {});
  Kp_.assign(static_cast<std::size_t>(rs.size()), {});
  for (int a = 0; a < rs.size(); ++a)
    for (int n = 0; n <= r; ++n) {
      const auto s = howe_support(h, AffineRoot{false, a, n}, p);
      K_[a][n] = s.in_K;
      Kp_[a][n] = s.in_K_plus;
    }
  for (int n = 0; n <= r; ++n) E_slice_[n] = howe_support(h, AffineRoot{true, -1, n}, p).in_E;
  const auto xi = twisted_inverse(model.x());
  for (int a = 0; a < rs.size(); ++a)
    for (int n = 0; n <= r; ++n) {
      if (!rs.is_positive(a)) m_prime_ += Kp_[a][n];
      else if (rs.is_positive(xi.act(a))) m_prime_ += K_[a][n];
    }
}

int HoweGroups::torus_factor_dim() const {
  int levels = 0;
  for (int n = 0; n <= model_.ring().level(); ++n) levels += E_slice_[n];
  return levels * (model_.n() - 1);
}

bool HoweGroups::coeffs_allowed(const TElem& a, int root, int kind) const {
  const auto& table = kind == 0 ? K_[root] : Kp_[root];
  for (int n = 0; n <= model_.ring().level(); ++n)
    if (a.c[n] != 0 && !table[n]) return false;
  return true;
}

bool HoweGroups::in_K(const Matrix& g) const {
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      if (i != j && !coeffs_allowed(g.at(i, j), model_.roots().root(i, j), 0)) return false;
  return true;
}

bool HoweGroups::in_E_torus(const Matrix& g) const {
  if (!in_torus(model_, g)) return false;
  for (int i = 0; i < g.n; ++i)
    for (int n = 0; n <= model_.ring().level(); ++n)
      if (!E_slice_[n] && g.at(i, i).c[n] != (n == 0 ? 1 : 0)) return false;
  return true;
}

bool HoweGroups::in_I(const Matrix& g) const {
  const auto& R = model_.ring();
  const int n = g.n;
  // g = u t ubar  <=>  w0 g w0 = L D U with unit pivots.
  Matrix a;
  a.n = n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a.at(i, j) = g.at(n - 1 - i, n - 1 - j);
  Matrix L = identity_matrix(R, n), U = identity_matrix(R, n), D;
  D.n = n;
  for (int k = 0; k < n; ++k) {
    const TElem p = a.at(k, k);
    if (!R.is_unit(p)) return false;
    const TElem pi = R.inv(p);
    D.at(k, k) = p;
    for (int i = k + 1; i < n; ++i) L.at(i, k) = R.mul(a.at(i, k), pi);
    for (int j = k + 1; j < n; ++j) U.at(k, j) = R.mul(a.at(k, j), pi);
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) a.at(i, j) = R.sub(a.at(i, j), R.mul(L.at(i, k), a.at(k, j)));
  }
  auto flip = [n](int i) { return n - 1 - i; };
  Matrix t;
  t.n = n;
  for (int i = 0; i < n; ++i) t.at(i, i) = D.at(flip(i), flip(i));
  if (!in_E_torus(t)) return false;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      // L (lower) becomes the upper factor u, U (upper) becomes ubar.
      const int root = model_.roots().root(i, j);
      if (i < j && !coeffs_allowed(L.at(flip(i), flip(j)), root, 0)) return false;
      if (i > j && !coeffs_allowed(U.at(flip(i), flip(j)), root, 1)) return false;
    }
  return true;
}

// ---------------------------------------------------------------- point sets

namespace {

enum Slot { kGF, kTF, kKF, kX, kYlift, kXflat, kXflatK, kZ, kZK, kXnat, kSlots };

struct SlotCounts {
  std::array<std::uint64_t, kSlots> c{};
  SlotCounts& operator+=(const SlotCounts& o) {
    for (int i = 0; i < kSlots; ++i) c[i] += o.c[i];
    return *this;
  }
};

PointSetReport dl_sets(const GroupModel& M, const HoweDatum* howe, bool parallel) {
  const auto& R = M.ring();
  const auto& rs = *M.roots().system();
  const auto xi = twisted_inverse(M.x());
  std::vector<int> S;  // Phi^- cap x(Phi^+)
  for (int a = 0; a < rs.size(); ++a)
    if (!rs.is_positive(a) && rs.is_positive(xi.act(a))) S.push_back(a);
  std::unique_ptr<HoweGroups> hg;
  if (howe) hg = std::make_unique<HoweGroups>(M, *howe);
  const Matrix I = identity_matrix(R, M.n());

  auto lower_split = [&](const Matrix& h, Matrix& t, Matrix& v) {
    for (int i = 0; i < h.n; ++i)
      for (int j = i + 1; j < h.n; ++j)
        if (!(h.at(i, j) == R.zero())) return false;
    t = I;
    for (int i = 0; i < h.n; ++i) t.at(i, i) = h.at(i, i);
    v = mat_mul(R, mat_inv(R, t), h);
    return true;
  };

  const auto counts = reduce_sl<SlotCounts>(M, parallel, [&](SlotCounts& acc, const Matrix& g) {
    const Matrix h = M.lang(g);
    const bool fixed = h == I;
    acc.c[kGF] += fixed;
    if (fixed && in_torus(M, g)) ++acc.c[kTF];
    const bool x = supported_unipotent(M, h, S);
    acc.c[kX] += x;
    Matrix t, v;
    const bool split = lower_split(h, t, v);
    if (split && supported_unipotent(M, v, S)) ++acc.c[kYlift];
    if (!hg) return;
    const bool inK = hg->in_K(g);
    if (fixed && inK) ++acc.c[kKF];
    if (x && hg->in_K(h)) {
      ++acc.c[kXflat];
      if (inK) ++acc.c[kXflatK];
    }
    if (hg->in_I(M.frobenius_inv(h))) {
      ++acc.c[kZ];
      if (inK) ++acc.c[kZK];
    }
    if (inK && split && hg->in_E_torus(t) && supported_unipotent(M, v, S) && hg->in_K(v)) ++acc.c[kXnat];
  });

  PointSetReport rep;
  const auto Q = static_cast<std::uint64_t>(R.field().size());
  const std::uint64_t units = (Q - 1) * ipow(Q, R.level());
  const std::uint64_t Tk = ipow(units, M.n() - 1);
  rep.counts["k_size"] = Q;
  rep.counts["G_r_F"] = counts.c[kGF];
  rep.counts["T_r_F"] = counts.c[kTF];
  rep.counts["T_r_k"] = Tk;
  rep.counts["X_r"] = counts.c[kX];
  rep.counts["Y_r_lift"] = counts.c[kYlift];
  rep.counts["Y_r"] = counts.c[kYlift] / Tk;
  auto row = [&](std::string name, std::uint64_t l, std::uint64_t r) { rep.identities.push_back({std::move(name), l, r, l == r}); };
  row("|Y_r lift| = |Y_r| * |T_r(k)|", counts.c[kYlift], rep.counts["Y_r"] * Tk);
  row("|X_r| = |Y_r| * |T_r^F|", counts.c[kX], rep.counts["Y_r"] * counts.c[kTF]);
  if (hg) {
    const std::uint64_t kmp = ipow(Q, hg->affine_factor_dim());
    rep.counts["K_r_F"] = counts.c[kKF];
    rep.counts["X_r_flat"] = counts.c[kXflat];
    rep.counts["X_r_flat_K"] = counts.c[kXflatK];
    rep.counts["Z"] = counts.c[kZ];
    rep.counts["Z_K"] = counts.c[kZK];
    rep.counts["X_natural"] = counts.c[kXnat];
    rep.counts["m_prime"] = static_cast<std::uint64_t>(hg->affine_factor_dim());
    row("|Z| * |K^F| = |G^F| * |Z^K|", counts.c[kZ] * counts.c[kKF], counts.c[kGF] * counts.c[kZK]);
    row("|X^flat| * |K^F| = |G^F| * |X^flat,K|", counts.c[kXflat] * counts.c[kKF], counts.c[kGF] * counts.c[kXflatK]);
    row("|Z^K| = |X^natural| * |k|^m'", counts.c[kZK], counts.c[kXnat] * kmp);
    if (howe->d() == 0) row("|X^flat| = |X_r| for d = 0", counts.c[kXflat], counts.c[kX]);
  }
  return rep;
}

}  // namespace

PointSetReport enumerate_dl_sets(const GroupModel& model, const HoweDatum* howe) { return dl_sets(model, howe, true); }
PointSetReport enumerate_dl_sets_serial(const GroupModel& model, const HoweDatum* howe) { return dl_sets(model, howe, false); }

// ---------------------------------------------------------------- cross-section

namespace {

CrossSectionReport cross_section(const TwistedElement& x, const FieldSpec& field, const std::vector<Elem>& scalars,
                                 bool allow_nonconvex, bool parallel) {
  const RootSystem& xs = x.system();
  const int n = xs.rank() + 1;
  const TypeARoots roots(n);
  const RootSystem& rs = *roots.system();
  if (rs.size() != xs.size()) throw std::invalid_argument("cross-section check needs a type A root system");
  for (int a = 0; a < rs.size(); ++a)
    if (rs.coeffs(a) != xs.coeffs(a)) throw std::invalid_argument("cross-section check needs a type A root system");
  if (!allow_nonconvex) {
    if (!is_elliptic(x)) throw PreconditionError("cross-section check needs an elliptic x");
    const auto cert = convexity_certificate(x);
    if (!cert.convex) {
      std::ostringstream os;
      os << "x is not convex: " << cert.qc_violations.size() << " quasi-convexity violations for x, "
         << cert.qc_violations_inv.size() << " for x^-1; Delta_x = {";
      for (std::size_t i = 0; i < cert.delta_x.size(); ++i) os << (i ? ", " : "") << format_root(xs, cert.delta_x[i]);
      os << "}";
      throw PreconditionError(os.str());
    }
  }
  const TruncatedRing R(field, 0);
  const Field& K = R.field();
  if (!scalars.empty() && static_cast<int>(scalars.size()) != n) throw std::invalid_argument("Psi scalars must list one entry per basis vector");
  Matrix D = identity_matrix(R, n);
  for (std::size_t i = 0; i < scalars.size(); ++i) {
    if (scalars[i] == 0 || scalars[i] >= K.size()) throw std::invalid_argument("Psi scalars must be nonzero field elements");
    D.at(static_cast<int>(i), static_cast<int>(i)) = R.scalar(scalars[i]);
  }
  const Matrix Dinv = mat_inv(R, D);
  const Matrix P = permutation_matrix(R, weyl_permutation(roots, x));
  const Matrix Pinv = mat_transpose(P);
  const bool outer = has_outer_part(x);
  auto psi = [&](const Matrix& h) {
    const Matrix th = outer ? theta(R, h) : h;
    return conj(R, mat_mul(R, D, P), th, mat_mul(R, Pinv, Dinv));
  };

  const auto xi = twisted_inverse(x);
  std::vector<int> S1, S2, target;
  for (int a = 0; a < rs.size(); ++a) {
    if (!rs.is_positive(xi.act(a))) continue;
    target.push_back(a);
    (rs.is_positive(a) ? S1 : S2).push_back(a);
  }
  const auto Q = static_cast<std::uint64_t>(K.size());
  const int dims = static_cast<int>(target.size());
  const double bits = dims * std::log2(static_cast<double>(Q));
  if (bits > 26) throw BudgetRefused(bits, 26);
  CrossSectionReport rep;
  rep.domain_size = ipow(Q, static_cast<int>(S1.size() + S2.size()));
  rep.codomain_size = ipow(Q, dims);
  std::vector<unsigned char> hit(rep.codomain_size, 0);
  int lands = 1;
  const auto total = static_cast<long long>(rep.domain_size);
  const Matrix I = identity_matrix(R, n);

  auto kernel = [&](long long idx) {
    std::uint64_t v = static_cast<std::uint64_t>(idx);
    Matrix h = I, g = I;
    for (int a : S1) {
      const auto [i, j] = roots.position(a);
      h.at(i, j) = R.scalar(static_cast<Elem>(v % Q)), v /= Q;
    }
    for (int a : S2) {
      const auto [i, j] = roots.position(a);
      g.at(i, j) = R.scalar(static_cast<Elem>(v % Q)), v /= Q;
    }
    const Matrix img = mat_mul(R, mat_mul(R, mat_inv(R, h), g), psi(h));
    bool ok = true;
    std::uint64_t code = 0;
    for (int i = 0; i < n && ok; ++i)
      for (int j = 0; j < n && ok; ++j) {
        if (i == j) {
          ok = img.at(i, i) == R.one();
        } else if (!(img.at(i, j) == R.zero()) && !std::binary_search(target.begin(), target.end(), roots.root(i, j))) {
          ok = false;
        }
      }
    for (auto it = target.rbegin(); ok && it != target.rend(); ++it) {
      const auto [i, j] = roots.position(*it);
      code = code * Q + img.at(i, j).c[0];
    }
    return ok ? static_cast<long long>(code) : -1LL;
  };

  std::uint64_t collisions = 0;
  if (parallel) {
#pragma omp parallel for schedule(static) reduction(min : lands) reduction(+ : collisions)
    for (long long idx = 0; idx < total; ++idx) {
      const long long code = kernel(idx);
      if (code < 0) {
        lands = 0;
        continue;
      }
      unsigned char prev;
#pragma omp atomic capture
      {
        prev = hit[static_cast<std::size_t>(code)];
        hit[static_cast<std::size_t>(code)] = 1;
      }
      collisions += prev;
    }
  } else {
    for (long long idx = 0; idx < total; ++idx) {
      const long long code = kernel(idx);
      if (code < 0) {
        lands = 0;
        continue;
      }
      collisions += hit[static_cast<std::size_t>(code)];
      hit[static_cast<std::size_t>(code)] = 1;
    }
  }
  rep.distinct_images = static_cast<std::uint64_t>(std::count(hit.begin(), hit.end(), 1));
  rep.lands_in_target = lands != 0;
  rep.injective = rep.lands_in_target && collisions == 0;
  rep.surjective = rep.distinct_images == rep.codomain_size;
  return rep;
}

}  // namespace

CrossSectionReport cross_section_group_check(const TwistedElement& x, const FieldSpec& field,
                                             const std::vector<Elem>& psi_scalars, bool allow_nonconvex) {
  return cross_section(x, field, psi_scalars, allow_nonconvex, true);
}

CrossSectionReport cross_section_group_check_serial(const TwistedElement& x, const FieldSpec& field,
                                                    const std::vector<Elem>& psi_scalars, bool allow_nonconvex) {
  return cross_section(x, field, psi_scalars, allow_nonconvex, false);
}

}  // namespace convexdl
