#pragma once

#include <map>
#include <string>
#include <string_view>

namespace qcap {

using ParamMap = std::map<std::string, double, std::less<>>;

/// Evaluate an infix arithmetic expression over named parameters.
///
/// Grammar: real literals, identifiers, unary minus/plus, binary + - * /,
/// parentheses. Throws ExprError on syntax errors, unknown identifiers
/// and division by zero.
double eval_param_expr(std::string_view expr, const ParamMap& params);

/// True if `name` is a valid parameter identifier ([A-Za-z_][A-Za-z0-9_]*).
bool is_identifier(std::string_view name);

} // namespace qcap
