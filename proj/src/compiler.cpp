#include "memarith/compiler.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "json.hpp"
#include "memarith/errors.hpp"

namespace memarith {

namespace {

using AstPtr = std::unique_ptr<AstNode>;

struct Parser {
  const std::string& text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  }
  bool at_end() {
    skip_ws();
    return pos >= text.size();
  }
  char peek() { return text[pos]; }

  [[noreturn]] void fail(const std::string& what, std::size_t at) {
    throw SyntaxError(what, at);
  }

  AstPtr expr() {
    AstPtr node = term();
    for (;;) {
      if (at_end()) return node;
      const char c = peek();
      if (c != '+' && c != '-') return node;
      ++pos;
      AstPtr rhs = term();
      auto parent = std::make_unique<AstNode>();
      parent->kind = AstNode::Binary;
      parent->op = c == '+' ? AstOp::Add : AstOp::Sub;
      parent->begin = node->begin;
      parent->end = rhs->end;
      parent->left = std::move(node);
      parent->right = std::move(rhs);
      node = std::move(parent);
    }
  }

  AstPtr term() {
    AstPtr node = factor();
    for (;;) {
      if (at_end()) return node;
      const char c = peek();
      if (c != '*' && c != '/') return node;
      ++pos;
      AstPtr rhs = factor();
      auto parent = std::make_unique<AstNode>();
      parent->kind = AstNode::Binary;
      parent->op = c == '*' ? AstOp::Mul : AstOp::Div;
      parent->begin = node->begin;
      parent->end = rhs->end;
      parent->left = std::move(node);
      parent->right = std::move(rhs);
      node = std::move(parent);
    }
  }

  AstPtr factor() {
    if (at_end()) fail("expected a number, '-' or '('", text.size());
    const std::size_t at = pos;
    const char c = peek();
    if (c == '-') {
      ++pos;
      AstPtr child = factor();
      auto node = std::make_unique<AstNode>();
      node->kind = AstNode::Neg;
      node->begin = at;
      node->end = child->end;
      node->left = std::move(child);
      return node;
    }
    if (c == '(') {
      ++pos;
      AstPtr inner = expr();
      if (at_end() || peek() != ')') fail("expected ')'", std::min(pos, text.size()));
      ++pos;
      inner->begin = at;  // widen the span to include the parentheses
      inner->end = pos;
      return inner;
    }
    if ((c >= '0' && c <= '9') || c == '.') return number();
    fail("expected a number, '-' or '('", at);
  }

  AstPtr number() {
    const std::size_t begin = pos;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos, ++n;
      return n;
    };
    std::size_t whole = digits();
    std::size_t frac = 0;
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      frac = digits();
    }
    if (whole + frac == 0) fail("malformed number", begin);
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
      ++pos;
      if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
      if (digits() == 0) fail("malformed exponent", pos);
    }
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(text.data() + begin, text.data() + pos, value);
    if (ec != std::errc{} || ptr != text.data() + pos) fail("malformed number", begin);
    auto node = std::make_unique<AstNode>();
    node->kind = AstNode::Literal;
    node->value = value;
    node->begin = begin;
    node->end = pos;
    return node;
  }
};

std::string span_text(const Ast& ast, const AstNode& node) {
  return ast.text.substr(node.begin, node.end - node.begin);
}

// First pass: ordinary arithmetic on every node, flagging zero divisors
// before any range question arises.
double eval_exact(const Ast& ast, AstNode& node) {
  switch (node.kind) {
    case AstNode::Literal:
      node.exact = node.value;
      break;
    case AstNode::Neg:
      node.exact = -eval_exact(ast, *node.left);
      break;
    case AstNode::Binary: {
      const double l = eval_exact(ast, *node.left);
      const double r = eval_exact(ast, *node.right);
      switch (node.op) {
        case AstOp::Add: node.exact = l + r; break;
        case AstOp::Sub: node.exact = l - r; break;
        case AstOp::Mul: node.exact = l * r; break;
        case AstOp::Div:
          if (r == 0.0) throw DivideByZeroError(span_text(ast, *node.right));
          node.exact = l / r;
          break;
      }
      break;
    }
  }
  return node.exact;
}

void annotate_ranges(const Ast& ast, AstNode& node, double gamma, double lo, double hi) {
  if (node.left) annotate_ranges(ast, *node.left, gamma, lo, hi);
  if (node.right) annotate_ranges(ast, *node.right, gamma, lo, hi);
  node.target_ohms = std::fabs(node.exact) * gamma;
  if (!std::isfinite(node.target_ohms) || node.target_ohms < lo || node.target_ohms > hi)
    throw RangeError(span_text(ast, node), node.target_ohms, lo, hi);
}

struct Lowerer {
  const Ast& ast;
  double gamma;
  Plan plan;

  struct Binding {
    int reg;
    int sign;
  };

  int fresh_register() { return plan.registers++; }

  Binding visit(const AstNode& node) {
    switch (node.kind) {
      case AstNode::Literal: {
        PlanStep s;
        s.kind = PlanStep::Program;
        s.reg = fresh_register();
        s.target_ohms = std::fabs(node.exact) * gamma;
        plan.steps.push_back(s);
        return {s.reg, +1};
      }
      case AstNode::Neg: {
        Binding b = visit(*node.left);
        return {b.reg, -b.sign};
      }
      case AstNode::Binary: {
        // Children are visited in block-role order: M1's subtree first.
        // For division M1 is the divisor, i.e. the right child.
        const bool div = node.op == AstOp::Div;
        const AstNode& n1 = div ? *node.right : *node.left;
        const AstNode& n2 = div ? *node.left : *node.right;
        Binding b1 = visit(n1);
        Binding b2 = visit(n2);
        // Operand signs are known statically from the preview, so a
        // mixed-sign '+' is really a magnitude subtraction and vice versa.
        BlockKind block = BlockKind::Add;
        switch (node.op) {
          case AstOp::Add: block = b1.sign == b2.sign ? BlockKind::Add : BlockKind::Sub; break;
          case AstOp::Sub: block = b1.sign == b2.sign ? BlockKind::Sub : BlockKind::Add; break;
          case AstOp::Mul: block = BlockKind::Mul; break;
          case AstOp::Div: block = BlockKind::Div; break;
        }
        PlanStep s;
        s.kind = PlanStep::Compute;
        s.block = block;
        s.src1 = b1.reg;
        s.src2 = b2.reg;
        s.dst = fresh_register();
        s.sign1 = b1.sign;
        s.sign2 = b2.sign;
        plan.steps.push_back(s);
        return {s.dst, node.exact < 0.0 ? -1 : +1};
      }
    }
    throw Error("lower: malformed tree");
  }
};

const char* block_json_name(BlockKind kind) {
  switch (kind) {
    case BlockKind::Add: return "add";
    case BlockKind::Sub: return "sub";
    case BlockKind::Div: return "div";
    case BlockKind::Mul: return "mul";
  }
  return "?";
}

BlockKind block_from_json_name(const std::string& name) {
  if (name == "add") return BlockKind::Add;
  if (name == "sub") return BlockKind::Sub;
  if (name == "div") return BlockKind::Div;
  if (name == "mul") return BlockKind::Mul;
  throw ConfigError("plan json: unknown op '" + name + "'");
}

}  // namespace

Ast parse(const std::string& text) {
  Parser p{text};
  if (p.at_end()) p.fail("empty expression", 0);
  AstPtr root = p.expr();
  if (!p.at_end()) p.fail("unexpected trailing input", p.pos);
  return {text, std::move(root)};
}

void check_ranges(Ast& ast, double gamma, double margin, const DeviceParams& params) {
  params.validate();
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw std::invalid_argument("check_ranges: gamma must be positive and finite");
  if (!(margin >= 0.0)) throw std::invalid_argument("check_ranges: margin must be >= 0");
  if (!ast.root) throw Error("check_ranges: empty tree");
  const double lo = params.r_on + margin;
  const double hi = params.r_off - margin;
  if (!(lo < hi))
    throw std::invalid_argument("check_ranges: margin leaves no storable band");
  eval_exact(ast, *ast.root);
  annotate_ranges(ast, *ast.root, gamma, lo, hi);
}

Plan lower(const Ast& ast, double gamma) {
  if (!ast.root) throw Error("lower: empty tree");
  if (ast.root->target_ohms == 0.0)
    throw Error("lower: tree has no range annotations; run check_ranges first");
  Lowerer l{ast, gamma, {}};
  l.plan.gamma = gamma;
  Lowerer::Binding root = l.visit(*ast.root);
  l.plan.result_register = root.reg;
  l.plan.result_sign = root.sign;
  validate(l.plan);
  return l.plan;
}

void validate(const Plan& plan) {
  if (!(plan.gamma > 0.0) || !std::isfinite(plan.gamma))
    throw Error("plan: gamma must be positive and finite");
  if (plan.registers < 1) throw Error("plan: no registers");
  if (plan.result_register < 0 || plan.result_register >= plan.registers)
    throw Error("plan: result register out of range");
  if (plan.result_sign != 1 && plan.result_sign != -1)
    throw Error("plan: result sign must be +1 or -1");
  std::vector<char> written(static_cast<std::size_t>(plan.registers), 0);
  auto in_range = [&](int reg) { return reg >= 0 && reg < plan.registers; };
  for (const PlanStep& s : plan.steps) {
    switch (s.kind) {
      case PlanStep::Program:
        if (!in_range(s.reg)) throw Error("plan: program step register out of range");
        if (written[s.reg]) throw Error("plan: register programmed twice");
        if (!(s.target_ohms > 0.0) || !std::isfinite(s.target_ohms))
          throw Error("plan: program target must be positive and finite");
        written[s.reg] = 1;
        break;
      case PlanStep::Compute:
        if (!in_range(s.src1) || !in_range(s.src2) || !in_range(s.dst))
          throw Error("plan: compute step register out of range");
        if (!written[s.src1] || !written[s.src2])
          throw Error("plan: compute step reads an unwritten register");
        if (s.src1 == s.src2)
          throw Error("plan: compute step wires one device into both branches");
        if ((s.sign1 != 1 && s.sign1 != -1) || (s.sign2 != 1 && s.sign2 != -1))
          throw Error("plan: compute step source signs must be +1 or -1");
        if (written[s.dst]) throw Error("plan: register programmed twice");
        written[s.dst] = 1;
        break;
    }
  }
  if (!written[plan.result_register]) throw Error("plan: result register never written");
}

std::string to_json(const Plan& plan) {
  nlohmann::ordered_json j;
  j["gamma"] = plan.gamma;
  j["registers"] = plan.registers;
  j["result_register"] = plan.result_register;
  j["result_sign"] = plan.result_sign;
  j["steps"] = nlohmann::ordered_json::array();
  for (const PlanStep& s : plan.steps) {
    nlohmann::ordered_json step;
    if (s.kind == PlanStep::Program) {
      step["kind"] = "program";
      step["reg"] = s.reg;
      step["target_ohms"] = s.target_ohms;
    } else {
      step["kind"] = "compute";
      step["op"] = block_json_name(s.block);
      step["src1"] = s.src1;
      step["src2"] = s.src2;
      step["dst"] = s.dst;
      step["sign1"] = s.sign1;
      step["sign2"] = s.sign2;
    }
    j["steps"].push_back(std::move(step));
  }
  return j.dump(2) + "\n";
}

Plan plan_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("plan json: ") + e.what());
  }
  Plan plan;
  try {
    plan.gamma = j.at("gamma").get<double>();
    plan.registers = j.at("registers").get<int>();
    plan.result_register = j.at("result_register").get<int>();
    plan.result_sign = j.at("result_sign").get<int>();
    for (const auto& step : j.at("steps")) {
      PlanStep s;
      const std::string kind = step.at("kind").get<std::string>();
      if (kind == "program") {
        s.kind = PlanStep::Program;
        s.reg = step.at("reg").get<int>();
        s.target_ohms = step.at("target_ohms").get<double>();
      } else if (kind == "compute") {
        s.kind = PlanStep::Compute;
        s.block = block_from_json_name(step.at("op").get<std::string>());
        s.src1 = step.at("src1").get<int>();
        s.src2 = step.at("src2").get<int>();
        s.dst = step.at("dst").get<int>();
        s.sign1 = step.at("sign1").get<int>();
        s.sign2 = step.at("sign2").get<int>();
      } else {
        throw ConfigError("plan json: unknown step kind '" + kind + "'");
      }
      plan.steps.push_back(s);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("plan json: ") + e.what());
  }
  try {
    validate(plan);
  } catch (const Error& e) {
    throw ConfigError(std::string("plan json: ") + e.what());
  }
  return plan;
}

Plan compile_expression(const std::string& text, double gamma, double margin,
                        const DeviceParams& params) {
  Ast ast = parse(text);
  check_ranges(ast, gamma, margin, params);
  return lower(ast, gamma);
}

}  // namespace memarith
