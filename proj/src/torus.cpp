#include "torusflow/torus.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "torusflow/errors.hpp"

namespace torusflow {

namespace {

void check_rank(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": rank mismatch (" << a << " vs " << b << ")";
    throw DimensionError(os.str());
  }
}

double reduce_angle(double theta) {
  double r = theta - std::floor(theta);
  // floor can return exactly 1.0 for tiny negative inputs after rounding
  return r >= 1.0 ? 0.0 : r;
}

}  // namespace

bool Weight::is_zero() const {
  for (auto c : components) {
    if (c != 0) return false;
  }
  return true;
}

Weight operator+(const Weight& a, const Weight& b) {
  check_rank(a.rank(), b.rank(), "weight sum");
  Weight r = a;
  for (std::size_t k = 0; k < r.rank(); ++k) r.components[k] += b.components[k];
  return r;
}

Weight operator-(const Weight& a, const Weight& b) { return a + (-b); }

Weight operator-(const Weight& a) { return -1 * a; }

Weight operator*(std::int64_t k, const Weight& a) {
  Weight r = a;
  for (auto& c : r.components) c *= k;
  return r;
}

Weight unit_weight(std::size_t rank, std::size_t k) {
  Weight w(std::vector<std::int64_t>(rank, 0));
  w.components.at(k) = 1;
  return w;
}

GeneratorVector GeneratorVector::operator-() const {
  GeneratorVector r = *this;
  for (auto& c : r.components) c = -c;
  return r;
}

std::vector<double> GeneratorVector::to_double() const {
  std::vector<double> out;
  out.reserve(components.size());
  for (const auto& c : components) out.push_back(boost::rational_cast<double>(c));
  return out;
}

TorusElement::TorusElement(std::vector<double> angles) : angles_(std::move(angles)) {
  for (auto& a : angles_) a = reduce_angle(a);
}

TorusElement TorusElement::identity(std::size_t rank) {
  return TorusElement(std::vector<double>(rank, 0.0));
}

TorusElement TorusElement::exp_of(const GeneratorVector& a0, double s) {
  std::vector<double> angles;
  angles.reserve(a0.rank());
  for (const auto& q : a0.components) {
    angles.push_back(s * static_cast<double>(q.numerator()) / static_cast<double>(q.denominator()));
  }
  return TorusElement(std::move(angles));
}

TorusElement TorusElement::operator*(const TorusElement& other) const {
  check_rank(rank(), other.rank(), "torus product");
  std::vector<double> a = angles_;
  for (std::size_t k = 0; k < a.size(); ++k) a[k] += other.angles_[k];
  return TorusElement(std::move(a));
}

TorusElement TorusElement::inverse() const {
  std::vector<double> a = angles_;
  for (auto& x : a) x = -x;
  return TorusElement(std::move(a));
}

Rational pairing(const Weight& m, const GeneratorVector& a0) {
  check_rank(m.rank(), a0.rank(), "pairing");
  Rational sum(0);
  for (std::size_t k = 0; k < m.rank(); ++k) sum += m.components[k] * a0.components[k];
  return sum;
}

std::complex<double> character_eval(const Weight& m, const TorusElement& t) {
  check_rank(m.rank(), t.rank(), "character_eval");
  // Sum of integer multiples of angles, reduced mod 1 before the exponential.
  double phase = 0.0;
  for (std::size_t k = 0; k < m.rank(); ++k) {
    phase = reduce_angle(phase + reduce_angle(static_cast<double>(m.components[k]) * t.angles()[k]));
  }
  return std::polar(1.0, 2.0 * std::numbers::pi * phase);
}

FlowExponent exponent(const Weight& m, const GeneratorVector& a0) {
  FlowExponent e;
  e.value = pairing(m, a0);
  e.scaled = 2.0 * std::numbers::pi * boost::rational_cast<double>(e.value);
  return e;
}

GenericityVerdict is_generic(const GeneratorVector& a0, std::span<const Weight> weights) {
  GenericityVerdict v;
  for (const auto& m : weights) {
    if (m.is_zero()) {
      v.zero_weights.push_back(m);
      continue;
    }
    if (pairing(m, a0).numerator() == 0) {
      v.generic = false;
      v.witnesses.push_back(m);
    }
  }
  return v;
}

Rational parse_rational(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  auto to_int = [&](std::string_view s) -> std::int64_t {
    s = trim(s);
    if (s.empty()) throw std::invalid_argument("empty integer in rational '" + std::string(text) + "'");
    std::size_t pos = 0;
    std::int64_t v = std::stoll(std::string(s), &pos);
    if (pos != s.size()) throw std::invalid_argument("bad rational '" + std::string(text) + "'");
    return v;
  };
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(to_int(text));
  std::int64_t den = to_int(text.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  return Rational(to_int(text.substr(0, slash)), den);
}

std::string format_rational(const Rational& q) {
  std::ostringstream os;
  os << q.numerator();
  if (q.denominator() != 1) os << '/' << q.denominator();
  return os.str();
}

GeneratorVector parse_generator(std::string_view text) {
  GeneratorVector a;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    a.components.push_back(parse_rational(piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return a;
}

std::string format_weight(const Weight& m) {
  std::ostringstream os;
  os << '(';
  for (std::size_t k = 0; k < m.rank(); ++k) {
    if (k) os << ',';
    os << m.components[k];
  }
  os << ')';
  return os.str();
}

}  // namespace torusflow
