#include "kpbbm/rational.hpp"

#include <stdexcept>

namespace kpbbm {

Rational parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
  if (s.empty()) throw std::invalid_argument("empty rational");
  if (auto dot = s.find('.'); dot != std::string::npos) {
    if (s.find('/') != std::string::npos) throw std::invalid_argument("bad rational: " + s);
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    std::string den = "1" + std::string(s.size() - dot - 1, '0');
    if (digits.empty() || digits == "-" || digits == "+") throw std::invalid_argument("bad rational: " + s);
    if (digits[0] == '+') digits.erase(digits.begin());
    Rational q;
    if (q.set_str(digits + "/" + den, 10) != 0) throw std::invalid_argument("bad rational: " + s);
    q.canonicalize();
    return q;
  }
  if (s[0] == '+') s.erase(s.begin());
  Rational q;
  if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + std::string(text));
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + std::string(text));
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

Rational pow(const Rational& base, long exponent) {
  if (exponent < 0) {
    if (base == 0) throw std::domain_error("zero to a negative power");
    return pow(Rational(1) / base, -exponent);
  }
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(exponent));
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(exponent));
  Rational r(num, den);
  r.canonicalize();
  return r;
}

bool is_integer(const Rational& q) { return q.get_den() == 1; }

int sign(const Rational& q) { return sgn(q); }

Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

bool exact_sqrt(const Rational& q, Rational& root) {
  if (q < 0) return false;
  if (!mpz_perfect_square_p(q.get_num_mpz_t()) || !mpz_perfect_square_p(q.get_den_mpz_t())) return false;
  mpz_class n, d;
  mpz_sqrt(n.get_mpz_t(), q.get_num_mpz_t());
  mpz_sqrt(d.get_mpz_t(), q.get_den_mpz_t());
  root = Rational(n, d);
  root.canonicalize();
  return true;
}

bool exact_root(const Rational& q, unsigned n, Rational& root) {
  if (n == 0) return false;
  if (q < 0 && n % 2 == 0) return false;
  mpz_class num = abs(q.get_num()), n_root, d_root;
  if (!mpz_root(n_root.get_mpz_t(), num.get_mpz_t(), n)) return false;
  if (!mpz_root(d_root.get_mpz_t(), q.get_den_mpz_t(), n)) return false;
  root = Rational(q < 0 ? mpz_class(-n_root) : n_root, d_root);
  root.canonicalize();
  return true;
}

}  // namespace kpbbm
