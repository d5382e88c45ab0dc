#pragma once

#include <functional>
#include <variant>
#include <vector>

#include "sheetcheck/engine.hpp"

namespace sheetcheck::detail {

/// Result of evaluating an argument before it is forced to a scalar:
/// references stay references so aggregate functions can see text and
/// blanks the way a range does.
using Operand = std::variant<Value, RangeRef>;

Operand eval_operand(const Ast& ast, const EvalContext& ctx);
/// Dereferences one-cell ranges; larger ranges are Error(VALUE).
Value to_scalar(const Operand& op, const EvalContext& ctx);
Value eval_scalar(const Ast& ast, const EvalContext& ctx);

/// Number for Number/Blank/Bool, Error(VALUE) for text, errors unchanged.
Value coerce_number(const Value& v);
/// Bool for Number/Bool/Blank, Error(VALUE) for text, errors unchanged.
Value coerce_bool(const Value& v);

/// Visits the non-blank cells of a range in row-major order. Returns
/// false when the range's sheet does not exist. The visitor returns false
/// to stop early.
bool for_each_present(const RangeRef& r, const EvalContext& ctx,
                      const std::function<bool(const Value&)>& fn);

Value call_builtin(const CallNode& call, const EvalContext& ctx);

}  // namespace sheetcheck::detail
