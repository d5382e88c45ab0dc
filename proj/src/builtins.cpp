#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "eval_internal.hpp"

namespace sheetcheck {

namespace {

using detail::coerce_bool;
using detail::coerce_number;
using detail::eval_operand;
using detail::eval_scalar;
using detail::Operand;

using Args = std::vector<AstPtr>;
using Builtin = Value (*)(const Args&, const EvalContext&);

bool arity_ok(const Args& args, std::size_t min, std::size_t max) {
  return args.size() >= min && args.size() <= max;
}

constexpr std::size_t kVariadic = static_cast<std::size_t>(-1);

// Numbers from aggregate arguments. Inside references only numbers count
// (text, booleans and blanks are skipped); direct scalars are coerced like
// arithmetic operands. Returns an error value on the first error seen.
std::optional<Value> collect_numbers(const Args& args, std::size_t first, const EvalContext& ctx,
                                     std::vector<double>& out) {
  for (std::size_t i = first; i < args.size(); ++i) {
    Operand op = eval_operand(*args[i], ctx);
    if (const auto* r = std::get_if<RangeRef>(&op)) {
      std::optional<Value> failure;
      bool found = detail::for_each_present(*r, ctx, [&](const Value& v) {
        if (v.is_error()) {
          failure = v;
          return false;
        }
        if (v.is_number()) out.push_back(v.as_number());
        return true;
      });
      if (!found) return Value::error(ErrorKind::Ref);
      if (failure) return failure;
      continue;
    }
    Value v = coerce_number(std::get<Value>(op));
    if (v.is_error()) return v;
    out.push_back(v.as_number());
  }
  return std::nullopt;
}

Value fn_sum(const Args& args, const EvalContext& ctx) {
  if (!arity_ok(args, 1, kVariadic)) return Value::error(ErrorKind::Value);
  std::vector<double> xs;
  if (auto err = collect_numbers(args, 0, ctx, xs)) return *err;
  double total = 0.0;
  for (double x : xs) total += x;
  return Value::number(total);
}

Value fn_min(const Args& args, const EvalContext& ctx) {
  if (!arity_ok(args, 1, kVariadic)) return Value::error(ErrorKind::Value);
  std::vector<double> xs;
  if (auto err = collect_numbers(args, 0, ctx, xs)) return *err;
  if (xs.empty()) return Value::number(0.0);
  return Value::number(*std::min_element(xs.begin(), xs.end()));
}

Value fn_max(const Args& args, const EvalContext& ctx) {
  if (!arity_ok(args, 1, kVariadic)) return Value::error(ErrorKind::Value);
  std::vector<double> xs;
  if (auto err = collect_numbers(args, 0, ctx, xs)) return *err;
  if (xs.empty()) return Value::number(0.0);
  return Value::number(*std::max_element(xs.begin(), xs.end()));
}

// Sum of v_i / (1 + rate)^i with i starting at 1.
Value fn_npv(const Args& args, const EvalContext& ctx) {
  if (!arity_ok(args, 2, kVariadic)) return Value::error(ErrorKind::Value);
  Value rate = coerce_number(eval_scalar(*args[0], ctx));
  if (rate.is_error()) return rate;
  std::vector<double> xs;
  if (auto err = collect_numbers(args, 1, ctx, xs)) return *err;
  const double base = 1.0 + rate.as_number();
  if (base == 0.0) return Value::error(ErrorKind::Div0);
  double total = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    total += xs[i] / std::pow(base, static_cast<double>(i + 1));
  }
  return Value::number(total);
}

// Cells of an operand as a dense row-major block.
struct Block {
  std::int32_t rows = 1;
  std::int32_t cols = 1;
  std::vector<Value> cells;
};

std::optional<Value> materialize(const Operand& op, const EvalContext& ctx, Block& out) {
  if (const auto* v = std::get_if<Value>(&op)) {
    if (v->is_error()) return *v;
    out.cells = {*v};
    return std::nullopt;
  }
  const RangeRef& r = std::get<RangeRef>(op);
  if (ctx.workbook().find_sheet(r.start.sheet) == nullptr) return Value::error(ErrorKind::Ref);
  out.rows = r.rows();
  out.cols = r.cols();
  out.cells.clear();
  out.cells.reserve(r.size());
  for (const CellAddress& a : range_cells(r)) out.cells.push_back(ctx.lookup(a));
  return std::nullopt;
}

Value fn_sumproduct(const Args& args, const EvalContext& ctx) {
  if (!arity_ok(args, 1, kVariadic)) return Value::error(ErrorKind::Value);
  std::vector<Block> blocks(args.size());
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (auto err = materialize(eval_operand(*args[i], ctx), ctx, blocks[i])) return *err;
    if (blocks[i].rows != blocks[0].rows || blocks[i].cols != blocks[0].cols) {
      return Value::error(ErrorKind::Value);
    }
  }
  double total = 0.0;
  for (std::size_t k = 0; k < blocks[0].cells.size(); ++k) {
    double product = 1.0;
    for (const Block& b : blocks) {
      const Value& v = b.cells[k];
      if (v.is_error()) return v;
      product *= v.is_number() ? v.as_number() : 0.0;
    }
    total += product;
  }
  return Value::number(total);
}

Value fn_if(const Args& args, const EvalContext& ctx) {
  if (!arity_ok(args, 2, 3)) return Value::error(ErrorKind::Value);
  Value cond = coerce_bool(eval_scalar(*args[0], ctx));
  if (cond.is_error()) return cond;
  if (cond.as_bool()) return eval_scalar(*args[1], ctx);
  if (args.size() == 3) return eval_scalar(*args[2], ctx);
  return Value::boolean(false);
}

// Truth values for AND/OR: references contribute numbers and booleans only.
std::optional<Value> collect_bools(const Args& args, const EvalContext& ctx, std::vector<bool>& out) {
  for (const AstPtr& arg : args) {
    Operand op = eval_operand(*arg, ctx);
    if (const auto* r = std::get_if<RangeRef>(&op)) {
      std::optional<Value> failure;
      bool found = detail::for_each_present(*r, ctx, [&](const Value& v) {
        if (v.is_error()) {
          failure = v;
          return false;
        }
        if (v.is_number()) out.push_back(v.as_number() != 0.0);
        if (v.is_bool()) out.push_back(v.as_bool());
        return true;
      });
      if (!found) return Value::error(ErrorKind::Ref);
      if (failure) return failure;
      continue;
    }
    Value b = coerce_bool(std::get<Value>(op));
    if (b.is_error()) return b;
    out.push_back(b.as_bool());
  }
  return std::nullopt;
}

Value fn_and(const Args& args, const EvalContext& ctx) {
  if (!arity_ok(args, 1, kVariadic)) return Value::error(ErrorKind::Value);
  std::vector<bool> bs;
  if (auto err = collect_bools(args, ctx, bs)) return *err;
  if (bs.empty()) return Value::error(ErrorKind::Value);
  return Value::boolean(std::all_of(bs.begin(), bs.end(), [](bool b) { return b; }));
}

Value fn_or(const Args& args, const EvalContext& ctx) {
  if (!arity_ok(args, 1, kVariadic)) return Value::error(ErrorKind::Value);
  std::vector<bool> bs;
  if (auto err = collect_bools(args, ctx, bs)) return *err;
  if (bs.empty()) return Value::error(ErrorKind::Value);
  return Value::boolean(std::any_of(bs.begin(), bs.end(), [](bool b) { return b; }));
}

Value fn_not(const Args& args, const EvalContext& ctx) {
  if (!arity_ok(args, 1, 1)) return Value::error(ErrorKind::Value);
  Value b = coerce_bool(eval_scalar(*args[0], ctx));
  if (b.is_error()) return b;
  return Value::boolean(!b.as_bool());
}

Value fn_abs(const Args& args, const EvalContext& ctx) {
  if (!arity_ok(args, 1, 1)) return Value::error(ErrorKind::Value);
  Value x = coerce_number(eval_scalar(*args[0], ctx));
  if (x.is_error()) return x;
  return Value::number(std::fabs(x.as_number()));
}

// Half away from zero. The scaled value is first cut to 15 significant
// digits so representation noise (2.675 stored as 2.67499999...) does not
// decide the rounding direction.
double round_half_away(double x, int digits) {
  if (digits > 15) return x;
  if (digits < -308) return 0.0;
  const double scale = std::pow(10.0, std::abs(digits));
  double scaled = digits >= 0 ? x * scale : x / scale;
  if (!std::isfinite(scaled)) return x;
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.15g", scaled);
  scaled = std::strtod(buf.data(), nullptr);
  const double rounded = std::round(scaled);
  return digits >= 0 ? rounded / scale : rounded * scale;
}

Value fn_round(const Args& args, const EvalContext& ctx) {
  if (!arity_ok(args, 2, 2)) return Value::error(ErrorKind::Value);
  Value x = coerce_number(eval_scalar(*args[0], ctx));
  if (x.is_error()) return x;
  Value n = coerce_number(eval_scalar(*args[1], ctx));
  if (n.is_error()) return n;
  const double digits = std::trunc(n.as_number());
  if (digits > 400.0 || digits < -400.0) return Value::error(ErrorKind::Value);
  return Value::number(round_half_away(x.as_number(), static_cast<int>(digits)));
}

bool lookup_match(const Value& key, const Value& candidate) {
  if (key.is_number() && candidate.is_number()) return key.as_number() == candidate.as_number();
  if (key.is_text() && candidate.is_text()) return fold_case(key.as_text()) == fold_case(candidate.as_text());
  if (key.is_bool() && candidate.is_bool()) return key.as_bool() == candidate.as_bool();
  return false;
}

// Exact-match only; a TRUE fourth argument (approximate match) is rejected.
Value fn_vlookup(const Args& args, const EvalContext& ctx) {
  if (!arity_ok(args, 3, 4)) return Value::error(ErrorKind::Value);
  Value key = eval_scalar(*args[0], ctx);
  if (key.is_error()) return key;
  Operand table_op = eval_operand(*args[1], ctx);
  if (const auto* v = std::get_if<Value>(&table_op)) {
    return v->is_error() ? *v : Value::error(ErrorKind::Value);
  }
  const RangeRef table = std::get<RangeRef>(table_op);
  if (ctx.workbook().find_sheet(table.start.sheet) == nullptr) return Value::error(ErrorKind::Ref);
  Value col = coerce_number(eval_scalar(*args[2], ctx));
  if (col.is_error()) return col;
  if (args.size() == 4) {
    Value approximate = coerce_bool(eval_scalar(*args[3], ctx));
    if (approximate.is_error()) return approximate;
    if (approximate.as_bool()) return Value::error(ErrorKind::Value);
  }
  const double index = std::trunc(col.as_number());
  if (index < 1.0) return Value::error(ErrorKind::Value);
  if (index > static_cast<double>(table.cols())) return Value::error(ErrorKind::Ref);
  const auto offset = static_cast<std::int32_t>(index) - 1;
  for (std::int32_t row = table.start.row; row <= table.end.row; ++row) {
    Value candidate = ctx.lookup(CellAddress{table.start.sheet, row, table.start.col, false, false});
    if (lookup_match(key, candidate)) {
      return ctx.lookup(CellAddress{table.start.sheet, row, table.start.col + offset, false, false});
    }
  }
  return Value::error(ErrorKind::NA);
}

struct Entry {
  std::string_view name;
  Builtin fn;
};

constexpr std::array<Entry, 12> kBuiltins{{
    {"ABS", fn_abs},
    {"AND", fn_and},
    {"IF", fn_if},
    {"MAX", fn_max},
    {"MIN", fn_min},
    {"NOT", fn_not},
    {"NPV", fn_npv},
    {"OR", fn_or},
    {"ROUND", fn_round},
    {"SUM", fn_sum},
    {"SUMPRODUCT", fn_sumproduct},
    {"VLOOKUP", fn_vlookup},
}};

const Entry* find_builtin(std::string_view name) {
  for (const Entry& e : kBuiltins) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

}  // namespace

bool is_builtin(std::string_view function) { return find_builtin(function) != nullptr; }

const std::vector<std::string_view>& builtin_functions() {
  static const std::vector<std::string_view> names = [] {
    std::vector<std::string_view> out;
    for (const Entry& e : kBuiltins) out.push_back(e.name);
    return out;
  }();
  return names;
}

namespace detail {

Value call_builtin(const CallNode& call, const EvalContext& ctx) {
  const Entry* entry = find_builtin(call.function);
  if (entry == nullptr) return Value::error(ErrorKind::Name);
  return entry->fn(call.args, ctx);
}

}  // namespace detail

}  // namespace sheetcheck
