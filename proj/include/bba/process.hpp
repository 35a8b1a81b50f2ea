/*
 * Copyright 2026 The bbastar Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bba/values.hpp"

namespace bba {

// ---------------------------------------------------------------------------
// Expressions. Side-effect free; evaluated over a process-local valuation.
// The language is deliberately small: constants, variables, range-checked
// addition and subtraction, and probability complement.
// ---------------------------------------------------------------------------

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Op { Const, Var, Add, Sub, OneMinus };

  Op op;
  Value value = Value::count(0);  // Const
  std::string var;                // Var
  ExprPtr lhs, rhs;               // Add, Sub, OneMinus (lhs only)
};

inline ExprPtr cst(Value v) {
  auto e = std::make_shared<Expr>();
  e->op = Expr::Op::Const;
  e->value = std::move(v);
  return e;
}
inline ExprPtr var(std::string name) {
  auto e = std::make_shared<Expr>();
  e->op = Expr::Op::Var;
  e->var = std::move(name);
  return e;
}
inline ExprPtr add(ExprPtr l, ExprPtr r) {
  auto e = std::make_shared<Expr>();
  e->op = Expr::Op::Add;
  e->lhs = std::move(l);
  e->rhs = std::move(r);
  return e;
}
inline ExprPtr sub(ExprPtr l, ExprPtr r) {
  auto e = std::make_shared<Expr>();
  e->op = Expr::Op::Sub;
  e->lhs = std::move(l);
  e->rhs = std::move(r);
  return e;
}
inline ExprPtr one_minus_expr(ExprPtr p) {
  auto e = std::make_shared<Expr>();
  e->op = Expr::Op::OneMinus;
  e->lhs = std::move(p);
  return e;
}

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

/// A single comparison; the condition language has no connectives, branching
/// structure is expressed with IfCase arms instead.
struct Cond {
  CmpOp op;
  ExprPtr lhs, rhs;
};

inline Cond eq(ExprPtr l, ExprPtr r) { return Cond{CmpOp::Eq, std::move(l), std::move(r)}; }
inline Cond ne(ExprPtr l, ExprPtr r) { return Cond{CmpOp::Ne, std::move(l), std::move(r)}; }
inline Cond lt(ExprPtr l, ExprPtr r) { return Cond{CmpOp::Lt, std::move(l), std::move(r)}; }
inline Cond le(ExprPtr l, ExprPtr r) { return Cond{CmpOp::Le, std::move(l), std::move(r)}; }
inline Cond gt(ExprPtr l, ExprPtr r) { return Cond{CmpOp::Gt, std::move(l), std::move(r)}; }
inline Cond ge(ExprPtr l, ExprPtr r) { return Cond{CmpOp::Ge, std::move(l), std::move(r)}; }

// ---------------------------------------------------------------------------
// Offers. An Emit either sends a computed value on an offer position or binds
// a variable to any value from an explicit finite domain, subject to
// agreement with the other synchronization participants.
// ---------------------------------------------------------------------------

struct OfferSpec {
  bool is_send;
  ExprPtr expr;              // send
  std::string bind_var;      // bind
  std::vector<Value> domain;  // bind
};

inline OfferSpec send(ExprPtr e) {
  return OfferSpec{true, std::move(e), {}, {}};
}
inline OfferSpec send(Value v) { return send(cst(std::move(v))); }
inline OfferSpec bind(std::string v, std::vector<Value> domain) {
  return OfferSpec{false, nullptr, std::move(v), std::move(domain)};
}

// ---------------------------------------------------------------------------
// Process terms. Control structure only; no parallelism inside a term (the
// network composes sequential instances). Calls are tail calls, so control
// is finite.
// ---------------------------------------------------------------------------

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct IfArm {
  std::optional<Value> pattern;  // nullopt matches anything
  std::optional<Cond> guard;
  TermPtr body;
};

struct Term {
  enum class Kind { Emit, Seq, Alt, Assign, IfCase, Guard, Loop, Break, Call };

  Kind kind;

  // Emit
  std::string gate;
  std::vector<OfferSpec> offers;
  // Seq, Alt
  std::vector<TermPtr> children;
  // Assign
  std::string assign_var;
  ExprPtr assign_expr;
  // IfCase
  ExprPtr scrutinee;
  std::vector<IfArm> arms;
  // Guard
  std::optional<Cond> guard_cond;
  // Loop, Break
  std::string loop_id;
  TermPtr loop_body;
  // Call
  std::string callee;
  std::vector<ExprPtr> args;
};

inline TermPtr emit(std::string gate, std::vector<OfferSpec> offers = {}) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Emit;
  t->gate = std::move(gate);
  t->offers = std::move(offers);
  return t;
}
inline TermPtr seq(std::vector<TermPtr> children) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Seq;
  t->children = std::move(children);
  return t;
}
inline TermPtr alt(std::vector<TermPtr> branches) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Alt;
  t->children = std::move(branches);
  return t;
}
inline TermPtr assign(std::string var_name, ExprPtr e) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Assign;
  t->assign_var = std::move(var_name);
  t->assign_expr = std::move(e);
  return t;
}
inline TermPtr assign(std::string var_name, Value v) {
  return assign(std::move(var_name), cst(std::move(v)));
}
inline TermPtr if_case(ExprPtr scrutinee, std::vector<IfArm> arms) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::IfCase;
  t->scrutinee = std::move(scrutinee);
  t->arms = std::move(arms);
  return t;
}
inline IfArm arm(Value pattern, TermPtr body) {
  return IfArm{std::move(pattern), std::nullopt, std::move(body)};
}
inline IfArm arm(Value pattern, Cond guard, TermPtr body) {
  return IfArm{std::move(pattern), std::move(guard), std::move(body)};
}
inline IfArm arm_default(TermPtr body) {
  return IfArm{std::nullopt, std::nullopt, std::move(body)};
}
inline TermPtr only_if(Cond c) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Guard;
  t->guard_cond = std::move(c);
  return t;
}
inline TermPtr loop(std::string id, TermPtr body) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Loop;
  t->loop_id = std::move(id);
  t->loop_body = std::move(body);
  return t;
}
inline TermPtr brk(std::string loop_id) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Break;
  t->loop_id = std::move(loop_id);
  return t;
}
inline TermPtr call(std::string callee, std::vector<ExprPtr> args = {}) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Call;
  t->callee = std::move(callee);
  t->args = std::move(args);
  return t;
}

/// Bottom-up structural rewrite. `fn` sees each rebuilt node and may return a
/// replacement (or nullptr to keep it). Terms are immutable, so this is the
/// intended way to derive variants of a built term, e.g. for fault-injection
/// tests.
inline TermPtr map_term(const TermPtr& term,
                        const std::function<TermPtr(const TermPtr&)>& fn) {
  auto rebuilt = std::make_shared<Term>(*term);
  switch (term->kind) {
    case Term::Kind::Seq:
    case Term::Kind::Alt:
      for (auto& child : rebuilt->children) child = map_term(child, fn);
      break;
    case Term::Kind::IfCase:
      for (auto& a : rebuilt->arms) a.body = map_term(a.body, fn);
      break;
    case Term::Kind::Loop:
      rebuilt->loop_body = map_term(rebuilt->loop_body, fn);
      break;
    default:
      break;
  }
  TermPtr out = rebuilt;
  if (TermPtr replacement = fn(out)) return replacement;
  return out;
}

}  // namespace bba
