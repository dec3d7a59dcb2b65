#include "loopcorr/kernels.hpp"

#include <cmath>
#include <limits>

#include "loopcorr/error.hpp"

namespace loopcorr {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, msg);
}

Q get_q(const nlohmann::json& j, const char* key, const Q& dflt) {
  if (!j.contains(key)) return dflt;
  const auto& v = j.at(key);
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Q(v.get<long>());
  if (v.is_number()) return Q(v.get<double>());
  throw Error(ErrorCode::InvalidArgument, std::string("bad value for ") + key);
}

bool integral(const Q& q) { return q.get_den() == 1; }

}  // namespace

XiSequence XiSequence::geometric(const Q& q, const Q& xi0) {
  require(q > 0 && q < 1, "geometric ratio must lie in (0,1)");
  require(xi0 > 0, "xi0 must be positive");
  XiSequence s;
  s.kind_ = Kind::Geometric;
  s.q_ = q;
  s.xi0_ = xi0;
  return s;
}

XiSequence XiSequence::power_law(const Q& exponent, const Q& xi0) {
  require(exponent > 1, "power-law exponent must exceed 1");
  require(xi0 > 0, "xi0 must be positive");
  XiSequence s;
  s.kind_ = Kind::PowerLaw;
  s.s_ = exponent;
  s.xi0_ = xi0;
  return s;
}

XiSequence XiSequence::list_with_tail(const std::vector<Q>& head, const Q& q, const Q& xi0) {
  require(!head.empty(), "explicit list must be nonempty");
  for (auto& h : head) require(h > 0, "xi_n must be positive");
  require(q > 0 && q < 1, "tail ratio must lie in (0,1)");
  require(xi0 > 0, "xi0 must be positive");
  XiSequence s;
  s.kind_ = Kind::ListWithTail;
  s.head_ = head;
  s.q_ = q;
  s.xi0_ = xi0;
  return s;
}

XiSequence XiSequence::from_json(const nlohmann::json& j) {
  require(j.is_object() && j.contains("kind"), "xi sequence needs a kind");
  std::string kind = j.at("kind").get<std::string>();
  Q xi0 = get_q(j, "xi0", Q(1));
  if (kind == "geometric") return geometric(get_q(j, "q", Q(1, 2)), xi0);
  if (kind == "power-law") return power_law(get_q(j, "s", Q(2)), xi0);
  if (kind == "explicit-list-with-tail") {
    require(j.contains("list") && j.at("list").is_array(), "explicit list missing");
    std::vector<Q> head;
    for (auto& v : j.at("list"))
      head.push_back(v.is_string() ? parse_rational(v.get<std::string>()) : Q(v.get<double>()));
    return list_with_tail(head, get_q(j, "q", Q(1, 2)), xi0);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown xi kind: " + kind);
}

nlohmann::json XiSequence::to_json() const {
  nlohmann::json j;
  j["xi0"] = xi0_.get_str();
  switch (kind_) {
    case Kind::Geometric:
      j["kind"] = "geometric";
      j["q"] = q_.get_str();
      break;
    case Kind::PowerLaw:
      j["kind"] = "power-law";
      j["s"] = s_.get_str();
      break;
    case Kind::ListWithTail: {
      j["kind"] = "explicit-list-with-tail";
      j["q"] = q_.get_str();
      auto arr = nlohmann::json::array();
      for (auto& h : head_) arr.push_back(h.get_str());
      j["list"] = arr;
      break;
    }
  }
  return j;
}

bool XiSequence::exact_at(long n) const {
  if (n == 0 || kind_ != Kind::PowerLaw) return true;
  return integral(s_);
}

static Q qpow(const Q& q, long e) {
  Q r(1);
  for (long k = 0; k < e; ++k) r *= q;
  return r;
}

Q XiSequence::exact(long n) const {
  n = std::labs(n);
  if (n == 0) return xi0_;
  switch (kind_) {
    case Kind::Geometric: return qpow(q_, n);
    case Kind::PowerLaw: {
      if (!integral(s_)) throw Error(ErrorCode::InvalidArgument, "non-integer exponent has no exact value");
      mpz_class d;
      mpz_pow_ui(d.get_mpz_t(), mpz_class(n).get_mpz_t(), s_.get_num().get_ui());
      return Q(mpz_class(1), d);
    }
    case Kind::ListWithTail: {
      long L = static_cast<long>(head_.size());
      if (n <= L) return head_[n - 1];
      return head_.back() * qpow(q_, n - L);
    }
  }
  return Q(0);
}

double XiSequence::value(long n) const {
  n = std::labs(n);
  if (exact_at(n)) return exact(n).get_d();
  return std::pow(static_cast<double>(n), -s_.get_d());
}

double XiSequence::inverse_growth() const {
  if (kind_ == Kind::PowerLaw) return 1.0;
  return 1.0 / q_.get_d();
}

XiValue xi_eval(const XiSequence& seq, long n) {
  XiValue v;
  v.exact = seq.exact_at(n);
  if (v.exact) {
    v.value = seq.exact(n);
    v.approx = v.value.get_d();
  } else {
    v.approx = seq.value(n);
  }
  return v;
}

namespace {

// sum_{n>N} w_n |x|^n for the weights of the sequence (inverse weights when inv)
double tail_sum(const XiSequence& seq, double ax, int N, bool inv) {
  const double inf = std::numeric_limits<double>::infinity();
  switch (seq.kind()) {
    case XiSequence::Kind::Geometric:
    case XiSequence::Kind::ListWithTail: {
      double r = inv ? ax / seq.ratio().get_d() : ax * seq.ratio().get_d();
      if (r >= 1) return inf;
      // beyond the explicit head the weights are geometric with ratio q (or 1/q)
      double next = inv ? 1.0 / seq.value(N + 1) : seq.value(N + 1);
      next *= std::pow(ax, N + 1);
      if (seq.kind() == XiSequence::Kind::ListWithTail) {
        // explicit head entries past N, then the geometric remainder
        long L = static_cast<long>(seq.head_size());
        double part = 0;
        long n = N + 1;
        for (; n <= L; ++n) part += (inv ? 1.0 / seq.value(n) : seq.value(n)) * std::pow(ax, n);
        double first = (inv ? 1.0 / seq.value(n) : seq.value(n)) * std::pow(ax, n);
        return part + first / (1 - r);
      }
      return next / (1 - r);
    }
    case XiSequence::Kind::PowerLaw: {
      double s = seq.exponent().get_d();
      if (!inv) {
        if (ax < 1) {
          double ratio = ax;
          return std::pow(N + 1.0, -s) * std::pow(ax, N + 1) / (1 - ratio);
        }
        return std::pow(static_cast<double>(std::max(N, 1)), 1 - s) / (s - 1);
      }
      if (ax >= 1) return inf;
      double ratio = std::pow((N + 2.0) / (N + 1.0), s) * ax;
      if (ratio >= 1) return inf;
      return std::pow(N + 1.0, s) * std::pow(ax, N + 1) / (1 - ratio);
    }
  }
  return inf;
}

}  // namespace

KernelReport kernel_eval(KernelId id, const XiSequence& seq, cplx z1, cplx z2, int N) {
  if (N < 1) throw Error(ErrorCode::InvalidArgument, "truncation must be at least 1");
  if (id == KernelId::HeisenbergPair)
    throw Error(ErrorCode::InvalidArgument, "use heisenberg_pair for the Fock propagator");
  const cplx x = z1 * std::conj(z2);
  const double ax = std::abs(x);
  KernelReport rep;
  if (id == KernelId::D) {
    if (ax * seq.inverse_growth() >= 1 || std::abs(z1) >= 1 || std::abs(z2) >= 1)
      throw Error(ErrorCode::DivergentKernel, "inverse-weight series diverges at these radii");
  }
  const bool inv = id == KernelId::D;
  cplx acc = 0, xn = 1;
  for (int n = 1; n <= N; ++n) {
    xn *= x;
    double w = inv ? 1.0 / seq.value(n) : seq.value(n);
    acc += w * xn;
  }
  rep.value = 2 * acc.real();
  if (id == KernelId::NA) rep.value += 2 * seq.xi0().get_d();
  rep.tail_bound = 2 * tail_sum(seq, ax, N, inv);
  if (seq.kind() == XiSequence::Kind::Geometric) {
    double q = seq.ratio().get_d();
    cplx w = inv ? x / q : x * q;
    if (std::abs(w) < 1) {
      double cf = 2 * (w / (1.0 - w)).real();
      if (id == KernelId::NA) cf += 2 * seq.xi0().get_d();
      rep.closed_form = cf;
    }
  }
  return rep;
}

KernelReport kernel_eval_angles(KernelId id, const XiSequence& seq, double u, double v, int N) {
  return kernel_eval(id, seq, std::polar(1.0, u), std::polar(1.0, v), N);
}

PairReport heisenberg_pair(cplx z1, cplx z2, double kappa, double p, int N) {
  PairReport rep;
  const cplx x = std::conj(z1) * z2;
  cplx acc = 0, xn = 1;
  for (int n = 1; n <= N; ++n) {
    xn *= x;
    acc += static_cast<double>(n) * xn;
  }
  rep.value = p * p + 2 * kappa * acc;
  const double on = 1e-14;
  if (std::abs(std::abs(z1) - 1) < on && std::abs(std::abs(z2) - 1) < on && std::abs(x - 1.0) < 1e-12) {
    rep.singular = true;
    return rep;
  }
  if (std::abs(x - 1.0) > 0) rep.closed_form = p * p + 2 * kappa * x / ((1.0 - x) * (1.0 - x));
  return rep;
}

namespace {

// m-th derivative of e^{in theta} is (in)^m e^{in theta}
cplx mode(int n, int m, double theta) {
  cplx f = std::polar(1.0, n * theta);
  cplx d = std::pow(cplx(0, n), m);
  return m == 0 ? f : d * f;
}

}  // namespace

double KernelBackend::cov(int m, double theta, double rho) const {
  double acc = 0, rn = 1;
  for (int n = 1; n <= N_; ++n) {
    rn *= rho;
    acc += 2 * seq_.value(n) * rn * mode(n, m, theta).real();
  }
  if (real_ == Realization::A && m == 0) acc += 2 * seq_.xi0().get_d();
  return acc;
}

void KernelBackend::check_dker(double rho) const {
  if (rho * seq_.inverse_growth() >= 1 && rho < 1)
    throw Error(ErrorCode::DivergentKernel, "inverse-weight series diverges at these radii");
}

double KernelBackend::dker(int m, double theta, double rho) const {
  double acc = 0, rn = 1;
  for (int n = 1; n <= N_; ++n) {
    rn *= rho;
    acc += 2 / seq_.value(n) * rn * mode(n, m, theta).real();
  }
  if (real_ == Realization::A && m == 0) acc += 1 / (2 * seq_.xi0().get_d());
  return acc;
}

cplx KernelBackend::wav(int m, double theta, double rho, int cutoff) const {
  cplx acc = 0;
  double rn = 1;
  const int top = cutoff > 0 ? cutoff : N_;
  for (int n = 1; n <= top; ++n) {
    rn *= rho;
    acc += static_cast<double>(n) * rn * mode(n, m, theta);
  }
  return acc;
}

cplx KernelBackend::delta(int m, double theta, double rho) const {
  cplx acc = m == 0 ? cplx(1) : cplx(0);
  double rn = 1;
  for (int n = 1; n <= N_; ++n) {
    rn *= rho;
    acc += rn * (mode(n, m, theta) + mode(-n, m, theta));
  }
  return acc;
}

}  // namespace loopcorr
