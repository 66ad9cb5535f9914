#include "pnet/expr.hpp"

#include <algorithm>
#include <cctype>

namespace pnet {

int VariableTable::add(const std::string& name) {
  auto it = index_.find(name);
  if (it != index_.end()) return it->second;
  int id = static_cast<int>(names_.size());
  names_.push_back(name);
  index_.emplace(name, id);
  return id;
}

int VariableTable::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? -1 : it->second;
}

int VariableTable::require(std::string_view name) const {
  int id = find(name);
  if (id < 0) throw std::out_of_range("unknown variable: " + std::string(name));
  return id;
}

const std::string& VariableTable::name(int id) const { return names_.at(id); }

Monomial Monomial::variable(int var, int exp) {
  Monomial m;
  if (exp != 0) m.factors.emplace_back(var, exp);
  return m;
}

int Monomial::degree() const {
  int d = 0;
  for (const auto& [v, e] : factors) d += e;
  return d;
}

int Monomial::exponent(int var) const {
  for (const auto& [v, e] : factors)
    if (v == var) return e;
  return 0;
}

Monomial Monomial::times(const Monomial& other) const {
  Monomial out;
  out.factors.reserve(factors.size() + other.factors.size());
  size_t i = 0, j = 0;
  while (i < factors.size() && j < other.factors.size()) {
    if (factors[i].first < other.factors[j].first) {
      out.factors.push_back(factors[i++]);
    } else if (factors[i].first > other.factors[j].first) {
      out.factors.push_back(other.factors[j++]);
    } else {
      int e = factors[i].second + other.factors[j].second;
      if (e != 0) out.factors.emplace_back(factors[i].first, e);
      ++i;
      ++j;
    }
  }
  while (i < factors.size()) out.factors.push_back(factors[i++]);
  while (j < other.factors.size()) out.factors.push_back(other.factors[j++]);
  return out;
}

int cmp_grlex(const Monomial& a, const Monomial& b) {
  int da = a.degree(), db = b.degree();
  if (da != db) return da < db ? -1 : 1;
  // Same degree: larger exponent on the smallest differing variable id wins.
  size_t i = 0, j = 0;
  while (i < a.factors.size() && j < b.factors.size()) {
    if (a.factors[i].first != b.factors[j].first) {
      // The one holding the smaller variable id has positive exponent there.
      return a.factors[i].first < b.factors[j].first ? 1 : -1;
    }
    if (a.factors[i].second != b.factors[j].second) {
      return a.factors[i].second > b.factors[j].second ? 1 : -1;
    }
    ++i;
    ++j;
  }
  if (i < a.factors.size()) return 1;
  if (j < b.factors.size()) return -1;
  return 0;
}

namespace {

struct GrlexGreater {
  bool operator()(const Monomial& a, const Monomial& b) const { return cmp_grlex(a, b) > 0; }
};

}  // namespace

Polynomial Polynomial::constant(const Rat& c) {
  Polynomial p;
  if (c != 0) p.terms.emplace_back(Monomial::one(), c);
  return p;
}

Polynomial Polynomial::variable(int var) {
  Polynomial p;
  p.terms.emplace_back(Monomial::variable(var), Rat(1));
  return p;
}

bool Polynomial::is_constant() const {
  return terms.empty() || (terms.size() == 1 && terms[0].first.is_one());
}

Rat Polynomial::constant_value() const {
  if (terms.empty()) return Rat(0);
  if (!is_constant()) throw std::logic_error("polynomial is not constant");
  return terms[0].second;
}

bool Polynomial::is_one() const {
  return terms.size() == 1 && terms[0].first.is_one() && terms[0].second == 1;
}

int Polynomial::total_degree() const {
  return terms.empty() ? -1 : terms[0].first.degree();
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  Polynomial out;
  out.terms.reserve(terms.size() + other.terms.size());
  size_t i = 0, j = 0;
  while (i < terms.size() && j < other.terms.size()) {
    int c = cmp_grlex(terms[i].first, other.terms[j].first);
    if (c > 0) {
      out.terms.push_back(terms[i++]);
    } else if (c < 0) {
      out.terms.push_back(other.terms[j++]);
    } else {
      Rat s = terms[i].second + other.terms[j].second;
      if (s != 0) out.terms.emplace_back(terms[i].first, s);
      ++i;
      ++j;
    }
  }
  while (i < terms.size()) out.terms.push_back(terms[i++]);
  while (j < other.terms.size()) out.terms.push_back(other.terms[j++]);
  return out;
}

Polynomial Polynomial::operator-(const Polynomial& other) const { return *this + other.negated(); }

Polynomial Polynomial::negated() const {
  Polynomial out = *this;
  for (auto& [m, c] : out.terms) c = -c;
  return out;
}

Polynomial Polynomial::scaled(const Rat& c) const {
  if (c == 0) return Polynomial::zero();
  Polynomial out = *this;
  for (auto& [m, coeff] : out.terms) coeff *= c;
  return out;
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
  if (is_zero() || other.is_zero()) return Polynomial::zero();
  if (is_constant()) return other.scaled(constant_value());
  if (other.is_constant()) return scaled(other.constant_value());
  std::map<Monomial, Rat, GrlexGreater> acc;
  for (const auto& [ma, ca] : terms) {
    for (const auto& [mb, cb] : other.terms) {
      Monomial m = ma.times(mb);
      auto [it, inserted] = acc.emplace(std::move(m), ca * cb);
      if (!inserted) it->second += ca * cb;
    }
  }
  Polynomial out;
  out.terms.reserve(acc.size());
  for (auto& [m, c] : acc) {
    if (c != 0) out.terms.emplace_back(m, std::move(c));
  }
  return out;
}

Polynomial Polynomial::derivative(int var) const {
  Polynomial out;
  for (const auto& [m, c] : terms) {
    int e = m.exponent(var);
    if (e == 0) continue;
    Monomial dm;
    for (const auto& [v, k] : m.factors) {
      if (v == var) {
        if (k > 1) dm.factors.emplace_back(v, k - 1);
      } else {
        dm.factors.emplace_back(v, k);
      }
    }
    out.terms.emplace_back(std::move(dm), c * e);
  }
  std::sort(out.terms.begin(), out.terms.end(),
            [](const auto& a, const auto& b) { return cmp_grlex(a.first, b.first) > 0; });
  return out;
}

void Polynomial::collect_vars(std::set<int>& out) const {
  for (const auto& [m, c] : terms)
    for (const auto& [v, e] : m.factors) out.insert(v);
}

namespace {

using boost::multiprecision::denominator;
using boost::multiprecision::numerator;

Int gcd_int(Int a, Int b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    Int t = a % b;
    a = std::move(b);
    b = std::move(t);
  }
  return a;
}

// Scale factor making the joint coefficient list integral and primitive.
Rat joint_content_scale(const Polynomial& a, const Polynomial& b) {
  Int lcm = 1;
  for (const Polynomial* p : {&a, &b}) {
    for (const auto& [m, c] : p->terms) {
      Int d = denominator(c);
      lcm = lcm / gcd_int(lcm, d) * d;
    }
  }
  Int g = 0;
  for (const Polynomial* p : {&a, &b}) {
    for (const auto& [m, c] : p->terms) {
      Int scaled = numerator(c) * (lcm / denominator(c));
      g = gcd_int(g, scaled);
    }
  }
  if (g == 0) g = 1;
  return Rat(lcm, g);
}

}  // namespace

RationalFunction::RationalFunction(Polynomial n, Polynomial d) : num(std::move(n)), den(std::move(d)) {
  if (den.is_zero()) throw DivisionByZeroError();
  if (num.is_zero()) {
    den = Polynomial::constant(1);
    return;
  }
  Rat scale = joint_content_scale(num, den);
  if (den.terms[0].second < 0) scale = -scale;
  if (scale != 1) {
    num = num.scaled(scale);
    den = den.scaled(scale);
  }
}

RationalFunction RationalFunction::from_poly(Polynomial p) {
  return RationalFunction(std::move(p), Polynomial::constant(1));
}

RationalFunction RationalFunction::constant(const Rat& c) {
  return from_poly(Polynomial::constant(c));
}

RationalFunction RationalFunction::variable(int var) {
  return from_poly(Polynomial::variable(var));
}

bool RationalFunction::is_one() const { return num == den; }

RationalFunction RationalFunction::operator+(const RationalFunction& o) const {
  if (is_zero()) return o;
  if (o.is_zero()) return *this;
  if (den == o.den) return RationalFunction(num + o.num, den);
  return RationalFunction(num * o.den + o.num * den, den * o.den);
}

RationalFunction RationalFunction::operator-(const RationalFunction& o) const {
  return *this + o.negated();
}

RationalFunction RationalFunction::operator*(const RationalFunction& o) const {
  if (is_zero() || o.is_zero()) return RationalFunction();
  return RationalFunction(num * o.num, den * o.den);
}

RationalFunction RationalFunction::operator/(const RationalFunction& o) const {
  return *this * o.inverse();
}

RationalFunction RationalFunction::negated() const {
  RationalFunction out = *this;
  out.num = out.num.negated();
  return out;
}

RationalFunction RationalFunction::inverse() const {
  if (is_zero()) throw DivisionByZeroError();
  if (num == den) return RationalFunction::constant(1);
  return RationalFunction(den, num);
}

RationalFunction RationalFunction::pow(long e) const {
  if (e < 0) return inverse().pow(-e);
  RationalFunction acc = RationalFunction::constant(1);
  RationalFunction base = *this;
  while (e > 0) {
    if (e & 1) acc = acc * base;
    base = (e >>= 1) ? base * base : base;
  }
  return acc;
}

RationalFunction RationalFunction::derivative(int var) const {
  Polynomial dn = num.derivative(var);
  Polynomial dd = den.derivative(var);
  if (dd.is_zero()) {
    if (dn.is_zero()) return RationalFunction();
    return RationalFunction(std::move(dn), den);
  }
  return RationalFunction(dn * den - num * dd, den * den);
}

namespace {

RationalFunction eval_poly_at(const Polynomial& p, const std::map<int, RationalFunction>& bindings) {
  RationalFunction sum;
  std::map<std::pair<int, int>, RationalFunction> pow_cache;
  for (const auto& [m, c] : p.terms) {
    RationalFunction term = RationalFunction::constant(c);
    for (const auto& [v, e] : m.factors) {
      auto key = std::make_pair(v, e);
      auto it = pow_cache.find(key);
      if (it == pow_cache.end()) {
        auto bound = bindings.find(v);
        RationalFunction base =
            bound == bindings.end() ? RationalFunction::variable(v) : bound->second;
        it = pow_cache.emplace(key, base.pow(e)).first;
      }
      term = term * it->second;
    }
    sum = sum + term;
  }
  return sum;
}

}  // namespace

RationalFunction RationalFunction::substitute(const std::map<int, RationalFunction>& bindings) const {
  RationalFunction n = eval_poly_at(num, bindings);
  RationalFunction d = eval_poly_at(den, bindings);
  if (d.is_zero()) throw DivisionByZeroError();
  return n / d;
}

void RationalFunction::collect_vars(std::set<int>& out) const {
  num.collect_vars(out);
  den.collect_vars(out);
}

bool RationalFunction::equals(const RationalFunction& o) const {
  return (num * o.den - o.num * den).is_zero();
}

PowerSeries series_expand(const RationalFunction& a, int var, int order) {
  if (order < 0) throw std::invalid_argument("series order must be nonnegative");
  std::set<int> vars;
  a.collect_vars(vars);
  vars.erase(var);
  if (!vars.empty()) {
    throw std::invalid_argument("series expansion requires all variables but one specialized");
  }
  auto dense = [&](const Polynomial& p) {
    std::vector<Rat> c;
    for (const auto& [m, coeff] : p.terms) {
      int e = m.exponent(var);
      if (static_cast<size_t>(e) >= c.size()) c.resize(e + 1, Rat(0));
      c[e] += coeff;
    }
    if (c.empty()) c.push_back(Rat(0));
    return c;
  };
  std::vector<Rat> n = dense(a.num), d = dense(a.den);
  if (d[0] == 0) {
    throw std::domain_error("denominator has zero constant term; series at 0 does not exist");
  }
  PowerSeries s;
  s.var = var;
  s.order = order;
  s.coeffs.assign(order + 1, Rat(0));
  for (int i = 0; i <= order; ++i) {
    Rat c = static_cast<size_t>(i) < n.size() ? n[i] : Rat(0);
    for (int j = 1; j <= i && static_cast<size_t>(j) < d.size(); ++j) {
      c -= d[j] * s.coeffs[i - j];
    }
    s.coeffs[i] = c / d[0];
  }
  return s;
}

PowerSeries series_mul(const PowerSeries& a, const PowerSeries& b) {
  if (a.var != b.var) throw std::invalid_argument("series variables differ");
  PowerSeries s;
  s.var = a.var;
  s.order = std::min(a.order, b.order);
  s.coeffs.assign(s.order + 1, Rat(0));
  for (int i = 0; i <= s.order; ++i)
    for (int j = 0; i + j <= s.order && j <= b.order; ++j) {
      if (i <= a.order) s.coeffs[i + j] += a.coeffs[i] * b.coeffs[j];
    }
  return s;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct Parser {
  const std::string& text;
  const VariableTable& vars;
  size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  RationalFunction parse_sum() {
    RationalFunction acc = parse_product();
    for (;;) {
      if (eat('+')) {
        acc = acc + parse_product();
      } else if (eat('-')) {
        acc = acc - parse_product();
      } else {
        return acc;
      }
    }
  }

  RationalFunction parse_product() {
    RationalFunction acc = parse_unary();
    for (;;) {
      if (eat('*')) {
        acc = acc * parse_unary();
      } else if (eat('/')) {
        size_t at = pos;
        RationalFunction rhs = parse_unary();
        if (rhs.is_zero()) throw ParseError("division by zero", at);
        acc = acc / rhs;
      } else {
        return acc;
      }
    }
  }

  RationalFunction parse_unary() {
    if (eat('-')) return parse_unary().negated();
    return parse_power();
  }

  RationalFunction parse_power() {
    RationalFunction base = parse_atom();
    if (eat('^')) {
      skip_ws();
      size_t at = pos;
      if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos]))) {
        throw ParseError("expected nonnegative integer exponent", at);
      }
      long e = 0;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        e = e * 10 + (text[pos] - '0');
        if (e > 100000) throw ParseError("exponent too large", at);
        ++pos;
      }
      return base.pow(e);
    }
    return base;
  }

  RationalFunction parse_atom() {
    skip_ws();
    if (pos >= text.size()) throw ParseError("unexpected end of input", pos);
    char c = text[pos];
    if (c == '(') {
      ++pos;
      RationalFunction inner = parse_sum();
      if (!eat(')')) throw ParseError("expected ')'", pos);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      Int value = 0;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        value = value * 10 + (text[pos] - '0');
        ++pos;
      }
      return RationalFunction::constant(Rat(value));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos;
      while (pos < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
        ++pos;
      }
      std::string name = text.substr(start, pos - start);
      int id = vars.find(name);
      if (id < 0) throw ParseError("unknown variable '" + name + "'", start);
      return RationalFunction::variable(id);
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos);
  }
};

}  // namespace

RationalFunction parse_expr(const std::string& text, const VariableTable& vars) {
  Parser p{text, vars};
  RationalFunction out = p.parse_sum();
  p.skip_ws();
  if (p.pos != text.size()) throw ParseError("trailing input", p.pos);
  return out;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

std::string rat_to_string(const Rat& r) { return r.str(); }

}  // namespace

std::string to_string(const Monomial& m, const VariableTable& vars) {
  if (m.is_one()) return "1";
  std::string out;
  for (const auto& [v, e] : m.factors) {
    if (!out.empty()) out += "*";
    out += vars.name(v);
    if (e != 1) out += "^" + std::to_string(e);
  }
  return out;
}

std::string to_string(const Polynomial& p, const VariableTable& vars) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : p.terms) {
    Rat mag = c < 0 ? Rat(-c) : c;
    if (first) {
      if (c < 0) out += "-";
      first = false;
    } else {
      out += c < 0 ? " - " : " + ";
    }
    if (m.is_one()) {
      out += rat_to_string(mag);
    } else if (mag == 1) {
      out += to_string(m, vars);
    } else {
      out += rat_to_string(mag) + "*" + to_string(m, vars);
    }
  }
  return out;
}

std::string to_string(const RationalFunction& f, const VariableTable& vars) {
  if (f.den.is_one()) return to_string(f.num, vars);
  return "(" + to_string(f.num, vars) + ")/(" + to_string(f.den, vars) + ")";
}

}  // namespace pnet
