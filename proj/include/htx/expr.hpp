#pragma once

// Prefix s-expression language for user-specified vector fields, e.g.
// "(+ (* -1 x2) (sin x1))".  Supported heads: + - * ^ exp sin cos const var;
// atoms are numeric literals or x1, x2, ... (1-based coordinates).

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "htx/grid.hpp"
#include "htx/jets.hpp"

namespace htx {

struct ExprError : std::runtime_error {
  std::size_t offset;
  ExprError(const std::string& msg, std::size_t off)
      : std::runtime_error(msg + " (at offset " + std::to_string(off) + ")"),
        offset(off) {}
};

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  enum class Kind { Add, Sub, Neg, Mul, Pow, Exp, Sin, Cos, Const, Var };
  Kind kind = Kind::Const;
  double cval = 0.0;  // Const
  int var = 0;        // Var, 0-based
  int ipow = 0;       // Pow exponent, >= 0
  std::vector<ExprPtr> args;
};

// Parses one expression; every coordinate reference must lie in 1..dim.
ExprPtr parse_expr(const std::string& src, int dim);
std::vector<ExprPtr> parse_component_list(const std::vector<std::string>& srcs,
                                          int dim);

double expr_value(const ExprPtr& e, const Vec& x);
Jet expr_jet(const ExprPtr& e, const JetSpace& sp, const Vec& base);

// Vector field whose components are expressions in n = comps.size() variables.
Field expression_field(std::vector<ExprPtr> comps);

}  // namespace htx
