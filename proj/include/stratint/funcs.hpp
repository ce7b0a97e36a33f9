#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace stratint {

// Closed family of smooth integrands on [0, horizon]: polynomials, sin(a t + b)
// and e^{a t}. Derivatives are analytic, so integration-by-parts identities are
// not polluted by numerical differentiation error.
class FunctionSpec {
 public:
  enum class Kind { Poly, Sin, Exp };

  FunctionSpec() : kind_(Kind::Poly), coeffs_{0.0} {}

  static FunctionSpec poly(std::vector<double> coeffs) {
    if (coeffs.empty())
      throw std::invalid_argument("FunctionSpec::poly: needs at least one coefficient");
    FunctionSpec f;
    f.kind_ = Kind::Poly;
    f.coeffs_ = std::move(coeffs);
    return f;
  }

  // sin(a t + b)
  static FunctionSpec sin(double a, double b) {
    FunctionSpec f;
    f.kind_ = Kind::Sin;
    f.coeffs_.clear();
    f.a_ = a;
    f.b_ = b;
    return f;
  }

  // e^{a t}
  static FunctionSpec exp(double a) {
    FunctionSpec f;
    f.kind_ = Kind::Exp;
    f.coeffs_.clear();
    f.a_ = a;
    return f;
  }

  static FunctionSpec constant(double c) { return poly({c}); }

  Kind kind() const { return kind_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  double a() const { return a_; }
  double b() const { return b_; }

  double value(double t) const {
    switch (kind_) {
      case Kind::Poly: {
        double acc = 0.0;
        for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * t + coeffs_[i];
        return acc;
      }
      case Kind::Sin:
        return std::sin(a_ * t + b_);
      case Kind::Exp:
        return std::exp(a_ * t);
    }
    return 0.0;  // unreachable
  }

  double derivative(double t) const {
    switch (kind_) {
      case Kind::Poly: {
        double acc = 0.0;
        for (std::size_t i = coeffs_.size(); i-- > 1;)
          acc = acc * t + coeffs_[i] * static_cast<double>(i);
        return acc;
      }
      case Kind::Sin:
        return a_ * std::cos(a_ * t + b_);
      case Kind::Exp:
        return a_ * std::exp(a_ * t);
    }
    return 0.0;  // unreachable
  }

  bool is_unit() const {
    return kind_ == Kind::Poly && coeffs_.size() == 1 && coeffs_[0] == 1.0;
  }

 private:
  Kind kind_;
  std::vector<double> coeffs_;  // Poly: coeffs_[i] multiplies t^i
  double a_ = 0.0;
  double b_ = 0.0;
};

// JSON encoding:
//   {"type":"poly","coeffs":[c0,c1,...]}
//   {"type":"sin","a":<a>,"b":<b>}
//   {"type":"exp","a":<a>}
inline void to_json(nlohmann::json& j, const FunctionSpec& f) {
  switch (f.kind()) {
    case FunctionSpec::Kind::Poly:
      j = nlohmann::json{{"type", "poly"}, {"coeffs", f.coeffs()}};
      break;
    case FunctionSpec::Kind::Sin:
      j = nlohmann::json{{"type", "sin"}, {"a", f.a()}, {"b", f.b()}};
      break;
    case FunctionSpec::Kind::Exp:
      j = nlohmann::json{{"type", "exp"}, {"a", f.a()}};
      break;
  }
}

inline void from_json(const nlohmann::json& j, FunctionSpec& f) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "poly") {
    f = FunctionSpec::poly(j.at("coeffs").get<std::vector<double>>());
  } else if (type == "sin") {
    f = FunctionSpec::sin(j.at("a").get<double>(), j.at("b").get<double>());
  } else if (type == "exp") {
    f = FunctionSpec::exp(j.at("a").get<double>());
  } else {
    throw std::invalid_argument("FunctionSpec: unknown type \"" + type + "\"");
  }
}

// Ordered tuple (f_1, ..., f_n) of integrands sharing one time horizon.
class FunctionTuple {
 public:
  FunctionTuple(std::vector<FunctionSpec> funcs, double horizon)
      : funcs_(std::move(funcs)), horizon_(horizon) {
    if (funcs_.empty())
      throw std::invalid_argument("FunctionTuple: needs at least one function");
    if (!(horizon_ > 0.0))
      throw std::invalid_argument("FunctionTuple: horizon must be positive");
  }

  std::size_t order() const { return funcs_.size(); }
  double horizon() const { return horizon_; }

  // 0-based: func(i) is f_{i+1} of the mathematical tuple.
  const FunctionSpec& func(std::size_t i) const {
    if (i >= funcs_.size())
      throw std::invalid_argument("FunctionTuple::func: index out of range");
    return funcs_[i];
  }

  double eval(std::size_t i, double t) const {
    check_domain(t);
    return func(i).value(t);
  }

  double deriv(std::size_t i, double t) const {
    check_domain(t);
    return func(i).derivative(t);
  }

  // Product of the last k functions, g_k(t) = f_n(t) f_{n-1}(t) ... f_{n-k+1}(t),
  // returned with its derivative (product rule over the running prefix).
  std::pair<double, double> suffix_product(std::size_t k, double t) const {
    if (k < 1 || k > funcs_.size())
      throw std::invalid_argument("FunctionTuple::suffix_product: k out of range");
    check_domain(t);
    double value = 1.0;
    double deriv = 0.0;
    for (std::size_t l = 1; l <= k; ++l) {
      const FunctionSpec& f = funcs_[funcs_.size() - l];
      const double v = f.value(t);
      const double d = f.derivative(t);
      deriv = deriv * v + value * d;
      value *= v;
    }
    return {value, deriv};
  }

  bool all_unit() const {
    for (const auto& f : funcs_)
      if (!f.is_unit()) return false;
    return true;
  }

 private:
  void check_domain(double t) const {
    // ulp-scale overshoot from grid arithmetic is tolerated
    const double slack = 1e-9 * std::max(1.0, horizon_);
    if (t < -slack || t > horizon_ + slack)
      throw std::domain_error("FunctionTuple: t outside [0, horizon]");
  }

  std::vector<FunctionSpec> funcs_;
  double horizon_;
};

// Domain-checked evaluation against an explicit horizon.
inline double eval(const FunctionSpec& f, double t, double horizon) {
  if (!(horizon > 0.0)) throw std::invalid_argument("eval: horizon must be positive");
  const double slack = 1e-9 * std::max(1.0, horizon);
  if (t < -slack || t > horizon + slack)
    throw std::domain_error("eval: t outside [0, horizon]");
  return f.value(t);
}

inline double deriv_eval(const FunctionSpec& f, double t, double horizon) {
  if (!(horizon > 0.0))
    throw std::invalid_argument("deriv_eval: horizon must be positive");
  const double slack = 1e-9 * std::max(1.0, horizon);
  if (t < -slack || t > horizon + slack)
    throw std::domain_error("deriv_eval: t outside [0, horizon]");
  return f.derivative(t);
}

}  // namespace stratint
