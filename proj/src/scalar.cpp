#include "loopcorr/scalar.hpp"

#include <cmath>
#include <sstream>

#include "loopcorr/error.hpp"

namespace loopcorr {

Q parse_rational(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw Error(ErrorCode::InvalidArgument, "empty rational");
  // decimal notation is accepted and converted exactly
  auto dot = s.find('.');
  if (dot != std::string::npos && s.find('/') == std::string::npos) {
    std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
    bool neg = !ip.empty() && ip[0] == '-';
    if (neg || (!ip.empty() && ip[0] == '+')) ip = ip.substr(1);
    if (ip.empty()) ip = "0";
    for (char c : ip + fp)
      if (!std::isdigit(static_cast<unsigned char>(c)))
        throw Error(ErrorCode::InvalidArgument, "bad rational: " + text);
    mpz_class num(ip + fp), den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, fp.size());
    Q q(num, den);
    q.canonicalize();
    return neg ? Q(-q) : q;
  }
  Q q;
  try {
    if (!s.empty() && s[0] == '+') s = s.substr(1);
    q = Q(s, 10);
  } catch (const std::invalid_argument&) {
    throw Error(ErrorCode::InvalidArgument, "bad rational: " + text);
  }
  if (sgn(q.get_den()) == 0) throw Error(ErrorCode::InvalidArgument, "zero denominator: " + text);
  q.canonicalize();
  return q;
}

std::string rational_string(const Q& q) { return q.get_str(); }

CQ CQ::inverse() const {
  Q n = re * re + im * im;
  if (sgn(n) == 0) throw Error(ErrorCode::InvalidArgument, "division by zero");
  return CQ(re / n, -im / n);
}

std::string CQ::str() const {
  if (sgn(im) == 0) return re.get_str();
  if (sgn(re) == 0) return im.get_str() + "i";
  std::string r = re.get_str() + (sgn(im) > 0 ? "+" : "") + im.get_str() + "i";
  return r;
}

std::string var_name(int v) {
  if (v == var::kappa) return "kappa";
  if (v == var::p) return "p";
  if (v == var::lambda) return "lambda";
  if (v >= var::mu_base) return "mu" + std::to_string(v - var::mu_base);
  return "v" + std::to_string(v);
}

Poly Poly::variable(int v, int power) {
  Poly r;
  if (power == 0) r.terms_[{}] = CQ(1);
  else r.terms_[{{v, power}}] = CQ(1);
  return r;
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

CQ Poly::constant() const {
  auto it = terms_.find({});
  return it == terms_.end() ? CQ() : it->second;
}

void Poly::add_term(const Monomial& m, const CQ& c) {
  if (c.is_zero()) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) terms_.erase(it);
}

Poly Poly::operator-() const {
  Poly r;
  for (auto& [m, c] : terms_) r.terms_.emplace(m, -c);
  return r;
}

Poly& Poly::operator+=(const Poly& o) {
  for (auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  for (auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

static Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial r;
  size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) r.push_back(a[i++]);
    else if (i == a.size() || b[j].first < a[i].first) r.push_back(b[j++]);
    else {
      r.emplace_back(a[i].first, a[i].second + b[j].second);
      ++i; ++j;
    }
  }
  return r;
}

Poly& Poly::operator*=(const Poly& o) {
  if (o.is_constant()) return *this *= o.constant();
  Poly r;
  for (auto& [ma, ca] : terms_)
    for (auto& [mb, cb] : o.terms_) r.add_term(mono_mul(ma, mb), ca * cb);
  terms_ = std::move(r.terms_);
  return *this;
}

Poly& Poly::operator*=(const CQ& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

Poly Poly::conj() const {
  Poly r;
  for (auto& [m, c] : terms_) r.terms_.emplace(m, c.conj());
  return r;
}

Poly Poly::substitute(int v, const CQ& value) const { return substitute(std::map<int, CQ>{{v, value}}); }

Poly Poly::substitute(const std::map<int, CQ>& values) const {
  Poly r;
  for (auto& [m, c] : terms_) {
    Monomial rest;
    CQ coeff = c;
    for (auto& [v, e] : m) {
      auto it = values.find(v);
      if (it == values.end()) {
        rest.emplace_back(v, e);
        continue;
      }
      for (int k = 0; k < e; ++k) coeff *= it->second;
    }
    r.add_term(rest, coeff);
  }
  return r;
}

std::complex<double> Poly::evaluate(const std::map<int, std::complex<double>>& values) const {
  std::complex<double> total = 0;
  for (auto& [m, c] : terms_) {
    std::complex<double> t = c.to_complex();
    for (auto& [v, e] : m) {
      auto it = values.find(v);
      if (it == values.end())
        throw Error(ErrorCode::InvalidArgument, "no numeric value for " + var_name(v));
      t *= std::pow(it->second, e);
    }
    total += t;
  }
  return total;
}

int Poly::degree_in(int v) const {
  int d = 0;
  for (auto& [m, c] : terms_)
    for (auto& [x, e] : m)
      if (x == v) d = std::max(d, e);
  return d;
}

std::string Poly::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto& [m, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    bool unit = c == CQ(1) && !m.empty();
    if (!unit) os << (sgn(c.re) != 0 && sgn(c.im) != 0 ? "(" + c.str() + ")" : c.str());
    for (size_t k = 0; k < m.size(); ++k) {
      if (!unit || k > 0) os << "*";
      os << var_name(m[k].first);
      if (m[k].second != 1) os << "^" << m[k].second;
    }
  }
  return os.str();
}

}  // namespace loopcorr
