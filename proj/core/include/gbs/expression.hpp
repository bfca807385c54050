#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "gbs/algebra.hpp"

namespace gbs {

enum class VariableParity { odd_only, unrestricted };

enum class MetricDerivativeKind { left_even, left_odd, right_even, right_odd };

using Assignment = std::map<std::string, GrassmannNumber>;

/// Algebraic-function expression over Grassmann-valued variables: sums with
/// scalar complex weights, products, even/odd projections, involution and
/// conjugation over constants and declared variables. Immutable tree;
/// evaluation is pure.
class Expression {
public:
  enum class Kind {
    scalar,       // complex constant, materialized in the assignment's space
    constant,     // fixed GrassmannNumber
    variable,
    sum,          // scalar-weighted terms
    product,
    even_part,
    odd_part,
    involution,
    conjugation,
  };

  static Expression scalar(Complex c);
  static Expression constant(GrassmannNumber value);
  static Expression variable(std::string name, VariableParity parity = VariableParity::unrestricted);
  static Expression sum(std::vector<std::pair<Complex, Expression>> terms);
  static Expression product(std::vector<Expression> factors);
  static Expression even_projection(Expression e);
  static Expression odd_projection(Expression e);
  static Expression involution(Expression e);
  static Expression conjugation(Expression e);

  Kind kind() const { return node_->kind; }

  /// Literal algebraic evaluation. Throws on missing variables and on
  /// odd-only variables bound to values with an even component.
  GrassmannNumber eval(const Assignment& assignment) const;

  bool depends_on(const std::string& var) const;
  std::vector<std::string> free_variables() const;

  /// Metric Grassmann derivative with respect to `var`, as a rewritten
  /// expression. Differentiating through a conjugation node that depends on
  /// `var` is a contract violation (the conjugated variable is an
  /// independent coordinate).
  Expression metric_derivative(const std::string& var, MetricDerivativeKind kind) const;

  friend Expression operator+(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a, const Expression& b);
  friend Expression operator*(const Expression& a, const Expression& b);
  friend Expression operator*(Complex c, const Expression& a);

private:
  struct Node {
    Kind kind;
    Complex weight{};                                  // scalar
    std::shared_ptr<const GrassmannNumber> value;      // constant
    std::string var_name;                              // variable
    VariableParity var_parity = VariableParity::unrestricted;
    std::vector<std::pair<Complex, Expression>> terms; // sum
    std::vector<Expression> factors;                   // product
    std::vector<Expression> child;                     // unary nodes
  };
  explicit Expression(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  GrassmannNumber eval_impl(const Assignment& assignment, const GeneratorSpace::Ptr& space) const;
  GeneratorSpace::Ptr find_space(const Assignment& assignment) const;
  void collect_variables(std::vector<std::string>& out) const;
  std::shared_ptr<const Node> node_;
};

inline Expression metric_derivative(const Expression& f, const std::string& var,
                                    MetricDerivativeKind kind) {
  return f.metric_derivative(var, kind);
}

}  // namespace gbs
