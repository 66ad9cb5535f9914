#pragma once

// Exact arithmetic kernel: multivariate polynomials and rational functions
// over arbitrary-precision rationals, an expression parser, differentiation,
// substitution and univariate power-series expansion.
//
// Rational functions are kept as content-reduced numerator/denominator pairs;
// no multivariate gcd is attempted. Semantic equality is decided exactly by
// cross-multiplication.

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace pnet {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Append-only registry of variable names. Ids are dense and stable, so all
// expression values refer to variables by integer id only.
class VariableTable {
public:
  int add(const std::string& name);
  int find(std::string_view name) const;        // -1 if not registered
  int require(std::string_view name) const;     // throws if not registered
  const std::string& name(int id) const;
  int size() const { return static_cast<int>(names_.size()); }

private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
};

using VarTablePtr = std::shared_ptr<VariableTable>;

// Product of variables with positive exponents, sorted by variable id.
struct Monomial {
  std::vector<std::pair<int, int>> factors;

  static Monomial one() { return Monomial{}; }
  static Monomial variable(int var, int exp = 1);

  bool is_one() const { return factors.empty(); }
  int degree() const;
  int exponent(int var) const;
  Monomial times(const Monomial& other) const;

  bool operator==(const Monomial& other) const { return factors == other.factors; }
};

// Graded lexicographic order (by total degree, ties broken on the exponent of
// the smallest variable id). Returns <0, 0, >0.
int cmp_grlex(const Monomial& a, const Monomial& b);

struct Polynomial {
  // Terms with nonzero coefficients in strictly descending graded-lex order.
  std::vector<std::pair<Monomial, Rat>> terms;

  static Polynomial zero() { return Polynomial{}; }
  static Polynomial constant(const Rat& c);
  static Polynomial variable(int var);

  bool is_zero() const { return terms.empty(); }
  bool is_constant() const;
  Rat constant_value() const;  // requires is_constant()
  bool is_one() const;
  int total_degree() const;

  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-(const Polynomial& other) const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial negated() const;
  Polynomial scaled(const Rat& c) const;

  Polynomial derivative(int var) const;
  void collect_vars(std::set<int>& out) const;

  bool operator==(const Polynomial& other) const { return terms == other.terms; }
};

class DivisionByZeroError : public std::domain_error {
public:
  DivisionByZeroError() : std::domain_error("division by the zero rational function") {}
};

// Canonical form: numerator/denominator have integer coefficients with joint
// content 1, and the leading coefficient of the denominator is positive.
struct RationalFunction {
  Polynomial num;
  Polynomial den;

  RationalFunction() : num(Polynomial::zero()), den(Polynomial::constant(1)) {}
  RationalFunction(Polynomial n, Polynomial d);

  static RationalFunction from_poly(Polynomial p);
  static RationalFunction constant(const Rat& c);
  static RationalFunction integer(long v) { return constant(Rat(v)); }
  static RationalFunction variable(int var);

  bool is_zero() const { return num.is_zero(); }
  bool is_one() const;
  bool is_poly() const { return den.is_one(); }

  RationalFunction operator+(const RationalFunction& o) const;
  RationalFunction operator-(const RationalFunction& o) const;
  RationalFunction operator*(const RationalFunction& o) const;
  RationalFunction operator/(const RationalFunction& o) const;
  RationalFunction negated() const;
  RationalFunction inverse() const;
  RationalFunction pow(long e) const;  // integer exponent, negative inverts

  RationalFunction derivative(int var) const;
  RationalFunction substitute(const std::map<int, RationalFunction>& bindings) const;
  void collect_vars(std::set<int>& out) const;

  // Exact equality as rational functions (cross-multiplication).
  bool equals(const RationalFunction& o) const;
};

struct PowerSeries {
  int var = -1;
  int order = 0;                 // truncation order L
  std::vector<Rat> coeffs;       // length order+1

  bool operator==(const PowerSeries& o) const {
    return var == o.var && order == o.order && coeffs == o.coeffs;
  }
};

// Taylor expansion of `a` at var=0 up to order L by long division. All other
// variables must already be specialized; the denominator needs a nonzero
// constant term.
PowerSeries series_expand(const RationalFunction& a, int var, int order);
PowerSeries series_mul(const PowerSeries& a, const PowerSeries& b);

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& msg, size_t position)
      : std::runtime_error(msg + " at position " + std::to_string(position)), position(position) {}
  size_t position;
};

// Grammar: integers, registered variable names, + - * / ^ and parentheses.
// ^ takes a nonnegative integer literal and binds tighter than unary minus.
RationalFunction parse_expr(const std::string& text, const VariableTable& vars);

std::string to_string(const Monomial& m, const VariableTable& vars);
std::string to_string(const Polynomial& p, const VariableTable& vars);
std::string to_string(const RationalFunction& f, const VariableTable& vars);

}  // namespace pnet
