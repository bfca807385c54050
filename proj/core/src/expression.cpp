#include "gbs/expression.hpp"

#include <algorithm>
#include <stdexcept>

namespace gbs {

Expression Expression::scalar(Complex c) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::scalar;
  n->weight = c;
  return Expression(std::move(n));
}

Expression Expression::constant(GrassmannNumber value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::constant;
  n->value = std::make_shared<GrassmannNumber>(std::move(value));
  return Expression(std::move(n));
}

Expression Expression::variable(std::string name, VariableParity parity) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::variable;
  n->var_name = std::move(name);
  n->var_parity = parity;
  return Expression(std::move(n));
}

Expression Expression::sum(std::vector<std::pair<Complex, Expression>> terms) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::sum;
  n->terms = std::move(terms);
  return Expression(std::move(n));
}

Expression Expression::product(std::vector<Expression> factors) {
  if (factors.empty()) throw std::invalid_argument("Expression::product: empty factor list");
  auto n = std::make_shared<Node>();
  n->kind = Kind::product;
  n->factors = std::move(factors);
  return Expression(std::move(n));
}

Expression Expression::even_projection(Expression e) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::even_part;
  n->child.push_back(std::move(e));
  return Expression(std::move(n));
}

Expression Expression::odd_projection(Expression e) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::odd_part;
  n->child.push_back(std::move(e));
  return Expression(std::move(n));
}

Expression Expression::involution(Expression e) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::involution;
  n->child.push_back(std::move(e));
  return Expression(std::move(n));
}

Expression Expression::conjugation(Expression e) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::conjugation;
  n->child.push_back(std::move(e));
  return Expression(std::move(n));
}

Expression operator+(const Expression& a, const Expression& b) {
  return Expression::sum({{Complex{1.0, 0.0}, a}, {Complex{1.0, 0.0}, b}});
}

Expression operator-(const Expression& a, const Expression& b) {
  return Expression::sum({{Complex{1.0, 0.0}, a}, {Complex{-1.0, 0.0}, b}});
}

Expression operator*(const Expression& a, const Expression& b) {
  return Expression::product({a, b});
}

Expression operator*(Complex c, const Expression& a) { return Expression::sum({{c, a}}); }

bool Expression::depends_on(const std::string& var) const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::scalar:
    case Kind::constant:
      return false;
    case Kind::variable:
      return n.var_name == var;
    case Kind::sum:
      return std::any_of(n.terms.begin(), n.terms.end(),
                         [&](const auto& t) { return t.second.depends_on(var); });
    case Kind::product:
      return std::any_of(n.factors.begin(), n.factors.end(),
                         [&](const auto& f) { return f.depends_on(var); });
    default:
      return n.child[0].depends_on(var);
  }
}

void Expression::collect_variables(std::vector<std::string>& out) const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::scalar:
    case Kind::constant:
      return;
    case Kind::variable:
      out.push_back(n.var_name);
      return;
    case Kind::sum:
      for (const auto& t : n.terms) t.second.collect_variables(out);
      return;
    case Kind::product:
      for (const auto& f : n.factors) f.collect_variables(out);
      return;
    default:
      n.child[0].collect_variables(out);
  }
}

std::vector<std::string> Expression::free_variables() const {
  std::vector<std::string> out;
  collect_variables(out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

GeneratorSpace::Ptr Expression::find_space(const Assignment& assignment) const {
  if (!assignment.empty()) return assignment.begin()->second.space();
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::constant:
      return n.value->space();
    case Kind::sum:
      for (const auto& t : n.terms)
        if (auto s = t.second.find_space(assignment)) return s;
      return nullptr;
    case Kind::product:
      for (const auto& f : n.factors)
        if (auto s = f.find_space(assignment)) return s;
      return nullptr;
    case Kind::even_part:
    case Kind::odd_part:
    case Kind::involution:
    case Kind::conjugation:
      return n.child[0].find_space(assignment);
    default:
      return nullptr;
  }
}

GrassmannNumber Expression::eval(const Assignment& assignment) const {
  auto space = find_space(assignment);
  if (!space)
    throw std::invalid_argument("Expression::eval: cannot infer a generator space");
  return eval_impl(assignment, space);
}

GrassmannNumber Expression::eval_impl(const Assignment& assignment,
                                      const GeneratorSpace::Ptr& space) const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::scalar:
      return GrassmannNumber::scalar(space, n.weight);
    case Kind::constant: {
      if (!n.value->space()->same_as(*space))
        throw std::invalid_argument("Expression::eval: constant from a different space");
      return *n.value;
    }
    case Kind::variable: {
      auto it = assignment.find(n.var_name);
      if (it == assignment.end())
        throw std::invalid_argument("Expression::eval: unassigned variable '" + n.var_name + "'");
      if (n.var_parity == VariableParity::odd_only && parity(it->second) != Parity::odd &&
          !it->second.is_zero())
        throw std::invalid_argument("Expression::eval: odd-only variable '" + n.var_name +
                                    "' bound to a non-odd value");
      return it->second;
    }
    case Kind::sum: {
      GrassmannNumber acc = GrassmannNumber::zero(space);
      for (const auto& [w, term] : n.terms) acc += w * term.eval_impl(assignment, space);
      return acc;
    }
    case Kind::product: {
      GrassmannNumber acc = n.factors.front().eval_impl(assignment, space);
      for (size_t i = 1; i < n.factors.size(); ++i)
        acc = acc * n.factors[i].eval_impl(assignment, space);
      return acc;
    }
    case Kind::even_part:
      return even_part(n.child[0].eval_impl(assignment, space));
    case Kind::odd_part:
      return odd_part(n.child[0].eval_impl(assignment, space));
    case Kind::involution:
      return involute(n.child[0].eval_impl(assignment, space));
    case Kind::conjugation:
      return conjugate(n.child[0].eval_impl(assignment, space));
  }
  throw std::logic_error("Expression::eval: bad node");
}

namespace {

bool is_left(MetricDerivativeKind k) {
  return k == MetricDerivativeKind::left_even || k == MetricDerivativeKind::left_odd;
}
bool is_even_kind(MetricDerivativeKind k) {
  return k == MetricDerivativeKind::left_even || k == MetricDerivativeKind::right_even;
}

}  // namespace

Expression Expression::metric_derivative(const std::string& var, MetricDerivativeKind kind) const {
  const Node& n = *node_;
  if (!depends_on(var)) return scalar(Complex{});
  switch (n.kind) {
    case Kind::scalar:
    case Kind::constant:
      return scalar(Complex{});
    case Kind::variable:
      // d/dv (v+ + v-) = 1 for every kind; the projection base cases fall
      // out of the even_part/odd_part rules below.
      return scalar(Complex{1.0, 0.0});
    case Kind::sum: {
      // linearity; scalar weights are even, so the odd kinds' involuted
      // weights reduce to the weights themselves.
      std::vector<std::pair<Complex, Expression>> terms;
      terms.reserve(n.terms.size());
      for (const auto& [w, term] : n.terms)
        terms.push_back({w, term.metric_derivative(var, kind)});
      return sum(std::move(terms));
    }
    case Kind::product: {
      if (n.factors.size() == 1) return n.factors[0].metric_derivative(var, kind);
      if (is_left(kind)) {
        // D(f * R) = (D f) * R + pass(f) * (D R); pass = involution for odd
        Expression f = n.factors.front();
        Expression rest = n.factors.size() == 2
                              ? n.factors[1]
                              : product({n.factors.begin() + 1, n.factors.end()});
        Expression passed = is_even_kind(kind) ? f : involution(f);
        return f.metric_derivative(var, kind) * rest + passed * rest.metric_derivative(var, kind);
      }
      // right kinds: D(X * f) = X * (D f) + (D X) * pass(f)
      Expression f = n.factors.back();
      Expression front = n.factors.size() == 2
                             ? n.factors[0]
                             : product({n.factors.begin(), n.factors.end() - 1});
      Expression passed = is_even_kind(kind) ? f : involution(f);
      return front * f.metric_derivative(var, kind) + front.metric_derivative(var, kind) * passed;
    }
    case Kind::even_part: {
      Expression d = n.child[0].metric_derivative(var, kind);
      return is_even_kind(kind) ? even_projection(d) : odd_projection(d);
    }
    case Kind::odd_part: {
      Expression d = n.child[0].metric_derivative(var, kind);
      return is_even_kind(kind) ? odd_projection(d) : even_projection(d);
    }
    case Kind::involution: {
      Expression d = involution(n.child[0].metric_derivative(var, kind));
      return is_even_kind(kind) ? d : sum({{Complex{-1.0, 0.0}, d}});
    }
    case Kind::conjugation:
      throw std::invalid_argument(
          "metric_derivative: differentiation through conjugation is non-algebraic");
  }
  throw std::logic_error("metric_derivative: bad node");
}

}  // namespace gbs
