#pragma once

// Exact arithmetic for a compact torus T = (S^1)^r: the character lattice,
// rational elements of Lie(T), torus elements and the genericity test.
//
// Exponential convention: exp(a) = (e^{2 pi i a_1}, ..., e^{2 pi i a_r}), so a
// character m evaluates as e^{2 pi i <m, a>} and the flow exponent attached to
// a tangential weight m is 2 pi <m, a0>.

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

namespace torusflow {

using Rational = boost::rational<std::int64_t>;

/// Integer covector in the character lattice Z^r.
struct Weight {
  std::vector<std::int64_t> components;

  Weight() = default;
  explicit Weight(std::vector<std::int64_t> c) : components(std::move(c)) {}
  Weight(std::initializer_list<std::int64_t> c) : components(c) {}

  std::size_t rank() const { return components.size(); }
  bool is_zero() const;

  friend bool operator==(const Weight&, const Weight&) = default;
  friend auto operator<=>(const Weight&, const Weight&) = default;
};

Weight operator+(const Weight& a, const Weight& b);
Weight operator-(const Weight& a, const Weight& b);
Weight operator-(const Weight& a);
Weight operator*(std::int64_t k, const Weight& a);

/// Standard basis vector e_k of Z^rank.
Weight unit_weight(std::size_t rank, std::size_t k);

/// Element a0 of Lie(T) = R^r with exact rational entries.
struct GeneratorVector {
  std::vector<Rational> components;

  GeneratorVector() = default;
  explicit GeneratorVector(std::vector<Rational> c) : components(std::move(c)) {}
  GeneratorVector(std::initializer_list<Rational> c) : components(c) {}

  std::size_t rank() const { return components.size(); }
  GeneratorVector operator-() const;
  std::vector<double> to_double() const;

  friend bool operator==(const GeneratorVector&, const GeneratorVector&) = default;
};

/// t = (e^{2 pi i theta_1}, ..., e^{2 pi i theta_r}), angles reduced to [0,1).
class TorusElement {
 public:
  TorusElement() = default;
  explicit TorusElement(std::vector<double> angles);

  static TorusElement identity(std::size_t rank);
  /// exp(s * a0).
  static TorusElement exp_of(const GeneratorVector& a0, double s);

  const std::vector<double>& angles() const { return angles_; }
  std::size_t rank() const { return angles_.size(); }

  TorusElement operator*(const TorusElement& other) const;
  TorusElement inverse() const;

 private:
  std::vector<double> angles_;
};

/// q = <m, a0> exactly, and the real exponent a = 2 pi q.
struct FlowExponent {
  Rational value;
  double scaled = 0.0;
};

Rational pairing(const Weight& m, const GeneratorVector& a0);
std::complex<double> character_eval(const Weight& m, const TorusElement& t);
FlowExponent exponent(const Weight& m, const GeneratorVector& a0);

struct GenericityVerdict {
  bool generic = true;
  /// Every nonzero weight with <m, a0> = 0.
  std::vector<Weight> witnesses;
  /// Zero weights present in the input; they signal a positive-dimensional
  /// fixed set when they occur as tangential weights.
  std::vector<Weight> zero_weights;
};

/// True iff <m, a0> != 0 for every nonzero m. Zero weights are reported
/// separately and do not by themselves fail the check.
GenericityVerdict is_generic(const GeneratorVector& a0, std::span<const Weight> weights);

// Text forms used by the CLI and JSON files.
Rational parse_rational(std::string_view text);
std::string format_rational(const Rational& q);
/// "1/3,1/7" -> (1/3, 1/7)
GeneratorVector parse_generator(std::string_view text);
std::string format_weight(const Weight& m);

}  // namespace torusflow
