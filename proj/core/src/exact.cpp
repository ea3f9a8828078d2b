#include "near_misses/exact.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <gmpxx.h>

#include "near_misses/error.hpp"

namespace near_misses {

namespace {

__extension__ typedef __int128 i128;

Rational64 normalized(Rational64 r) {
  if (r.den == 0) throw InvalidQuery("rational coefficient with zero denominator");
  if (r.den < 0) {
    r.num = -r.num;
    r.den = -r.den;
  }
  const std::int64_t g = std::gcd(r.num, r.den);
  if (g > 1) {
    r.num /= g;
    r.den /= g;
  }
  return r;
}

Rational64 add(Rational64 x, Rational64 y) {
  mpz_class a = mpz_class(static_cast<long>(x.num)) * static_cast<long>(y.den) +
                mpz_class(static_cast<long>(y.num)) * static_cast<long>(x.den);
  mpz_class b = mpz_class(static_cast<long>(x.den)) * static_cast<long>(y.den);
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  a /= g;
  b /= g;
  if (!a.fits_slong_p() || !b.fits_slong_p()) throw BudgetError("rational coefficient overflow");
  return normalized({a.get_si(), b.get_si()});
}

double to_double(Rational64 r) { return static_cast<double>(r.num) / static_cast<double>(r.den); }

double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

bool mul_ok(i128& acc, i128 factor) { return !__builtin_mul_overflow(acc, factor, &acc); }

std::optional<std::int64_t> integer_root(const mpz_class& t, int m) {
  if (m == 1) {
    if (!t.fits_slong_p()) throw BudgetError("exact value exceeds 64-bit range");
    return t.get_si();
  }
  if (t < 0 && m % 2 == 0) return std::nullopt;
  mpz_class r;
  const mpz_class mag = abs(t);
  if (mpz_root(r.get_mpz_t(), mag.get_mpz_t(), static_cast<unsigned long>(m)) == 0) return std::nullopt;
  if (!r.fits_slong_p()) throw BudgetError("exact value exceeds 64-bit range");
  const std::int64_t v = r.get_si();
  return t < 0 ? -v : v;
}

std::optional<std::int64_t> integer_root(i128 t, int m) {
  if (m == 1) {
    if (t > INT64_MAX || t < INT64_MIN) throw BudgetError("exact value exceeds 64-bit range");
    return static_cast<std::int64_t>(t);
  }
  if (t < 0 && m % 2 == 0) return std::nullopt;
  const i128 mag = t < 0 ? -t : t;
  const double guess = std::pow(static_cast<double>(mag), 1.0 / m);
  const auto base = static_cast<std::int64_t>(std::llround(guess));
  for (std::int64_t r = std::max<std::int64_t>(0, base - 2); r <= base + 2; ++r) {
    i128 p = 1;
    bool ok = true;
    for (int i = 0; i < m && ok; ++i) ok = mul_ok(p, r);
    if (!ok) break;
    if (p == mag) return t < 0 ? -r : r;
    if (p > mag) break;
  }
  return std::nullopt;
}

}  // namespace

RationalPolynomial::RationalPolynomial(std::size_t dim, std::vector<Monomial> terms) : dim_(dim) {
  std::map<std::vector<int>, Rational64> merged;
  for (auto& t : terms) {
    if (t.exponents.size() != dim) throw InvalidQuery("polynomial: exponent vector has wrong length");
    for (int e : t.exponents) {
      if (e < 0) throw InvalidQuery("polynomial: negative exponent");
    }
    const auto c = normalized(t.coef);
    auto it = merged.find(t.exponents);
    if (it == merged.end()) {
      merged.emplace(t.exponents, c);
    } else {
      it->second = add(it->second, c);
    }
  }
  for (auto& [e, c] : merged) {
    if (c.num == 0) continue;
    degree_ = std::max(degree_, std::accumulate(e.begin(), e.end(), 0));
    terms_.push_back({e, c});
  }
}

double RationalPolynomial::value(std::span<const double> x) const {
  double s = 0.0;
  for (const auto& t : terms_) {
    double v = to_double(t.coef);
    for (std::size_t i = 0; i < dim_; ++i) v *= ipow(x[i], t.exponents[i]);
    s += v;
  }
  return s;
}

Eigen::VectorXd RationalPolynomial::gradient(std::span<const double> x) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim_));
  for (const auto& t : terms_) {
    for (std::size_t k = 0; k < dim_; ++k) {
      if (t.exponents[k] == 0) continue;
      double v = to_double(t.coef) * t.exponents[k];
      for (std::size_t i = 0; i < dim_; ++i) v *= ipow(x[i], t.exponents[i] - (i == k ? 1 : 0));
      g(static_cast<Eigen::Index>(k)) += v;
    }
  }
  return g;
}

Eigen::MatrixXd RationalPolynomial::hessian(std::span<const double> x) const {
  const auto d = static_cast<Eigen::Index>(dim_);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
  for (const auto& t : terms_) {
    for (std::size_t k = 0; k < dim_; ++k) {
      for (std::size_t l = k; l < dim_; ++l) {
        std::vector<int> e = t.exponents;
        double v = to_double(t.coef);
        v *= e[k];
        --e[k];
        if (e[k] < 0) continue;
        v *= e[l];
        --e[l];
        if (e[l] < 0 || v == 0.0) continue;
        for (std::size_t i = 0; i < dim_; ++i) v *= ipow(x[i], e[i]);
        h(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) += v;
        if (k != l) h(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k)) += v;
      }
    }
  }
  return h;
}

RationalPolynomial RationalPolynomial::scaled(Rational64 c) const {
  c = normalized(c);
  std::vector<Monomial> out;
  for (const auto& t : terms_) {
    const mpz_class num = mpz_class(static_cast<long>(t.coef.num)) * static_cast<long>(c.num);
    const mpz_class den = mpz_class(static_cast<long>(t.coef.den)) * static_cast<long>(c.den);
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    const mpz_class n2 = num / g, d2 = den / g;
    if (!n2.fits_slong_p() || !d2.fits_slong_p()) throw BudgetError("rational coefficient overflow");
    out.push_back({t.exponents, {n2.get_si(), d2.get_si()}});
  }
  return RationalPolynomial(dim_, std::move(out));
}

RationalPolynomial RationalPolynomial::operator+(const RationalPolynomial& other) const {
  if (other.dim_ != dim_) throw InvalidQuery("polynomial: dimension mismatch in sum");
  std::vector<Monomial> all = terms_;
  all.insert(all.end(), other.terms_.begin(), other.terms_.end());
  return RationalPolynomial(dim_, std::move(all));
}

ExactForm::ExactForm(RationalPolynomial radicand, int root) : radicand_(std::move(radicand)), root_(root) {
  if (root_ < 1) throw InvalidQuery("exact form: root must be >= 1");
  top_degree_ = std::max(radicand_.degree(), root_);
  mpz_class l = 1;
  for (const auto& t : radicand_.terms()) {
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), mpz_class(static_cast<long>(t.coef.den)).get_mpz_t());
  }
  if (!l.fits_slong_p()) throw BudgetError("exact form: denominator lcm overflow");
  lcm_den_ = l.get_si();
  for (const auto& t : radicand_.terms()) {
    const mpz_class c = mpz_class(static_cast<long>(t.coef.num)) * (l / static_cast<long>(t.coef.den));
    if (!c.fits_slong_p()) throw BudgetError("exact form: coefficient overflow");
    int_coef_.push_back(c.get_si());
  }
}

double ExactForm::value(std::span<const double> x) const {
  const double p = radicand_.value(x);
  if (root_ == 1) return p;
  if (root_ == 2) return std::sqrt(p);
  if (root_ % 2 == 1) return std::copysign(std::pow(std::abs(p), 1.0 / root_), p);
  return std::pow(p, 1.0 / root_);
}

Eigen::VectorXd ExactForm::gradient(std::span<const double> x) const {
  if (root_ == 1) return radicand_.gradient(x);
  const double p = radicand_.value(x);
  const double inv_m = 1.0 / root_;
  return inv_m * std::pow(p, inv_m - 1.0) * radicand_.gradient(x);
}

Eigen::MatrixXd ExactForm::hessian(std::span<const double> x) const {
  if (root_ == 1) return radicand_.hessian(x);
  const double p = radicand_.value(x);
  const double inv_m = 1.0 / root_;
  const Eigen::VectorXd g = radicand_.gradient(x);
  return inv_m * std::pow(p, inv_m - 1.0) * radicand_.hessian(x) +
         inv_m * (inv_m - 1.0) * std::pow(p, inv_m - 2.0) * (g * g.transpose());
}

std::optional<std::int64_t> ExactForm::scaled_integer(std::span<const std::int64_t> a, std::int64_t q) const {
  // q^m P(a/q) = S / (L q^{E-m}) with S = sum (L c_e) a^e q^{E-|e|}.
  const auto& terms = radicand_.terms();
  bool overflow = false;
  i128 s = 0;
  for (std::size_t k = 0; k < terms.size() && !overflow; ++k) {
    i128 v = int_coef_[k];
    int total = 0;
    for (std::size_t i = 0; i < a.size() && !overflow; ++i) {
      const int e = terms[k].exponents[i];
      total += e;
      for (int r = 0; r < e && !overflow; ++r) overflow = !mul_ok(v, a[i]);
    }
    for (int r = 0; r < top_degree_ - total && !overflow; ++r) overflow = !mul_ok(v, q);
    if (!overflow) overflow = __builtin_add_overflow(s, v, &s);
  }
  i128 den = lcm_den_;
  for (int r = 0; r < top_degree_ - root_ && !overflow; ++r) overflow = !mul_ok(den, q);
  if (!overflow) {
    if (s % den != 0) return std::nullopt;
    return integer_root(s / den, root_);
  }
  mpz_class sz = 0;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    mpz_class v = static_cast<long>(int_coef_[k]);
    int total = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const int e = terms[k].exponents[i];
      total += e;
      mpz_class p;
      mpz_pow_ui(p.get_mpz_t(), mpz_class(static_cast<long>(a[i])).get_mpz_t(), static_cast<unsigned long>(e));
      v *= p;
    }
    mpz_class p;
    mpz_pow_ui(p.get_mpz_t(), mpz_class(static_cast<long>(q)).get_mpz_t(),
               static_cast<unsigned long>(top_degree_ - total));
    sz += v * p;
  }
  mpz_class dz;
  mpz_pow_ui(dz.get_mpz_t(), mpz_class(static_cast<long>(q)).get_mpz_t(),
             static_cast<unsigned long>(top_degree_ - root_));
  dz *= static_cast<long>(lcm_den_);
  if (!mpz_divisible_p(sz.get_mpz_t(), dz.get_mpz_t())) return std::nullopt;
  return integer_root(mpz_class(sz / dz), root_);
}

}  // namespace near_misses
