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

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bba/errors.hpp"
#include "bba/labels.hpp"
#include "bba/network.hpp"
#include "bba/process.hpp"

namespace bba {

// ---------------------------------------------------------------------------
// Compiled form. Each instance's term tree is flattened to a small
// instruction array; a control point is an index into it. Variables become
// dense slots, one per (process, name) pair, at most 64 per instance so
// liveness and assignedness fit in a bit mask.
// ---------------------------------------------------------------------------

struct CExpr;
using CExprPtr = std::shared_ptr<const CExpr>;

struct CExpr {
  Expr::Op op;
  Value value = Value::count(0);  // Const
  std::uint32_t slot = 0;         // Var
  CExprPtr lhs, rhs;
};

struct CCond {
  CmpOp op;
  CExprPtr lhs, rhs;
};

struct COffer {
  bool is_send;
  CExprPtr expr;              // send
  std::uint32_t slot = 0;     // bind
  std::vector<Value> domain;  // bind
};

struct CArm {
  bool has_pattern;
  Value pattern = Value::count(0);
  bool has_guard;
  CCond guard;
  std::uint32_t target;
};

struct CInstr {
  enum class Op : std::uint8_t {
    Emit,    // gate, offers; falls through after synchronization
    Assign,  // slot := expr
    Jump,    // target
    Branch,  // nondeterministic choice among targets (Alt)
    Case,    // first matching arm of scrutinee wins
    Guard,   // proceed only if cond holds
    Call,    // tail call: assign params, jump to process entry
    Halt,    // end of behavior for this instance
  };

  Op op;
  std::uint32_t gate = 0;
  std::vector<COffer> offers;
  std::uint32_t slot = 0;
  CExprPtr expr;  // Assign value / Case scrutinee
  std::uint32_t target = 0;
  std::vector<std::uint32_t> targets;
  std::vector<CArm> arms;
  CCond cond{CmpOp::Eq, nullptr, nullptr};
  std::vector<std::uint32_t> param_slots;
  std::vector<CExprPtr> args;
};

struct CompiledInstance {
  std::string name;
  std::vector<CInstr> code;
  std::vector<std::string> slot_names;   // slot -> "PROCESS.var"
  std::vector<std::uint64_t> live_in;    // per control point
  std::uint32_t entry_pc = 0;
};

struct CompiledRule {
  bool keyed;
  std::vector<std::uint32_t> fixed;
  std::vector<std::pair<Value, std::vector<std::uint32_t>>> by_value;
};

struct CompiledNetwork {
  std::vector<CompiledInstance> instances;
  std::vector<std::string> gate_names;  // gate id -> name
  std::vector<CompiledRule> rules;      // gate id -> participation
};

// Absorbing control between two emissions must terminate; a loop body with
// no reachable Emit trips this bound instead of hanging.
inline constexpr int kControlStepBound = 1 << 17;

// ---------------------------------------------------------------------------
// Runtime state.
// ---------------------------------------------------------------------------

struct InstanceSnapshot {
  std::uint32_t pc = 0;
  std::uint64_t defined = 0;  // bit per slot
  std::vector<Value> regs;
};

struct GlobalState {
  std::vector<InstanceSnapshot> instances;
};

/// Canonical byte encoding; equal states encode equally because undefined
/// slots are skipped.
inline std::string encode_state(const GlobalState& gs) {
  std::string out;
  out.reserve(gs.instances.size() * 16);
  for (const InstanceSnapshot& st : gs.instances) {
    for (int i = 0; i < 4; ++i)
      out += static_cast<char>((st.pc >> (8 * i)) & 0xFF);
    for (std::uint32_t s = 0; s < st.regs.size(); ++s) {
      if (!(st.defined >> s & 1)) continue;
      const Value& v = st.regs[s];
      out += static_cast<char>(s);
      out += static_cast<char>(v.kind());
      std::uint32_t num = static_cast<std::uint32_t>(v.num());
      for (int i = 0; i < 4; ++i)
        out += static_cast<char>((num >> (8 * i)) & 0xFF);
      if (v.kind() == ValueKind::Abstract) {
        out += v.sym();
        out += '\0';
      }
    }
    out += '\xFE';  // instance separator; slot indexes stay below it
  }
  return out;
}

// ---------------------------------------------------------------------------
// Expression evaluation.
// ---------------------------------------------------------------------------

namespace detail {

inline Value make_numeric(ValueKind kind, std::int64_t n) {
  if (n < 0 || n > 0x7FFFFFFF)
    throw InternalError("arithmetic result out of range: " + std::to_string(n));
  int v = static_cast<int>(n);
  switch (kind) {
    case ValueKind::Bit:
      return Value::bit(v);
    case ValueKind::Pid:
      return Value::pid(v);
    case ValueKind::Step:
      return Value::step(v);
    case ValueKind::Count:
      return Value::count(v);
    case ValueKind::Prob:
      return Value::prob(v);
    default:
      throw InternalError("arithmetic on non-numeric value");
  }
}

}  // namespace detail

inline Value eval_expr(const CExpr& e, const InstanceSnapshot& st) {
  switch (e.op) {
    case Expr::Op::Const:
      return e.value;
    case Expr::Op::Var:
      if (!(st.defined >> e.slot & 1))
        throw InternalError("read of undefined slot " + std::to_string(e.slot));
      return st.regs[e.slot];
    case Expr::Op::Add:
    case Expr::Op::Sub: {
      Value l = eval_expr(*e.lhs, st);
      Value r = eval_expr(*e.rhs, st);
      if (l.kind() != r.kind() || !l.is_numeric())
        throw InternalError("arithmetic on mismatched kinds");
      std::int64_t n = e.op == Expr::Op::Add
                           ? std::int64_t{l.num()} + r.num()
                           : std::int64_t{l.num()} - r.num();
      return detail::make_numeric(l.kind(), n);
    }
    case Expr::Op::OneMinus: {
      Value p = eval_expr(*e.lhs, st);
      if (p.kind() != ValueKind::Prob)
        throw InternalError("one_minus applies to probabilities only");
      return Value::prob(kProbOne - p.num());
    }
  }
  throw InternalError("unreachable expression op");
}

inline bool eval_cond(const CCond& c, const InstanceSnapshot& st) {
  Value l = eval_expr(*c.lhs, st);
  Value r = eval_expr(*c.rhs, st);
  if (l.kind() != r.kind())
    throw InternalError("comparison of mismatched kinds");
  if (l.kind() == ValueKind::Abstract) {
    if (c.op == CmpOp::Eq) return l.sym() == r.sym();
    if (c.op == CmpOp::Ne) return l.sym() != r.sym();
    throw InternalError("ordering comparison on abstract values");
  }
  switch (c.op) {
    case CmpOp::Eq:
      return l.num() == r.num();
    case CmpOp::Ne:
      return l.num() != r.num();
    case CmpOp::Lt:
      return l.num() < r.num();
    case CmpOp::Le:
      return l.num() <= r.num();
    case CmpOp::Gt:
      return l.num() > r.num();
    case CmpOp::Ge:
      return l.num() >= r.num();
  }
  throw InternalError("unreachable comparison op");
}

// ---------------------------------------------------------------------------
// Compilation.
// ---------------------------------------------------------------------------

namespace detail {

class InstanceCompiler {
 public:
  InstanceCompiler(const Instance& inst, std::uint32_t index)
      : inst_(inst), where_("instance '" + inst.name + "' (#" +
                            std::to_string(index) + ")") {}

  CompiledInstance run() {
    if (inst_.program.processes.empty())
      throw NetworkError(where_ + ": program has no processes");
    for (std::size_t p = 0; p < inst_.program.processes.size(); ++p) {
      const std::string& name = inst_.program.processes[p].name;
      if (!proc_index_.emplace(name, p).second)
        throw NetworkError(where_ + ": duplicate process '" + name + "'");
    }
    for (const ProcessDef& p : inst_.program.processes) allocate_slots(p);

    for (std::size_t p = 0; p < inst_.program.processes.size(); ++p) {
      const ProcessDef& def = inst_.program.processes[p];
      entry_pcs_.push_back(static_cast<std::uint32_t>(out_.code.size()));
      current_proc_ = &def;
      compile_term(def.body, /*tail=*/true);
      emit_instr(CInstr::Op::Halt);
    }
    for (auto& [pc, callee] : call_patches_) {
      auto it = proc_index_.find(callee);
      if (it == proc_index_.end())
        throw NetworkError(where_ + ": call to unknown process '" + callee +
                           "'");
      out_.code[pc].target = entry_pcs_[it->second];
    }
    out_.entry_pc = entry_pcs_[0];
    out_.name = inst_.name;
    return std::move(out_);
  }

  std::uint32_t slot_of(const std::string& proc, const std::string& var) const {
    auto it = slots_.find(proc + "." + var);
    if (it == slots_.end())
      throw NetworkError(where_ + ": unknown variable " + proc + "." + var);
    return it->second;
  }

  std::uint32_t slot_count() const {
    return static_cast<std::uint32_t>(out_.slot_names.size());
  }

 private:
  std::uint32_t intern_slot(const std::string& proc, const std::string& name) {
    std::string key = proc + "." + name;
    auto it = slots_.find(key);
    if (it != slots_.end()) return it->second;
    if (out_.slot_names.size() >= 64)
      throw NetworkError(where_ + ": more than 64 variables");
    std::uint32_t slot = static_cast<std::uint32_t>(out_.slot_names.size());
    slots_.emplace(key, slot);
    out_.slot_names.push_back(key);
    return slot;
  }

  void allocate_expr(const std::string& proc, const ExprPtr& e) {
    if (!e) return;
    if (e->op == Expr::Op::Var) intern_slot(proc, e->var);
    allocate_expr(proc, e->lhs);
    allocate_expr(proc, e->rhs);
  }
  void allocate_cond(const std::string& proc, const Cond& c) {
    allocate_expr(proc, c.lhs);
    allocate_expr(proc, c.rhs);
  }

  void allocate_slots(const ProcessDef& def) {
    for (const std::string& p : def.params) intern_slot(def.name, p);
    allocate_term(def.name, def.body);
  }

  void allocate_term(const std::string& proc, const TermPtr& t) {
    switch (t->kind) {
      case Term::Kind::Emit:
        for (const OfferSpec& o : t->offers) {
          if (o.is_send)
            allocate_expr(proc, o.expr);
          else
            intern_slot(proc, o.bind_var);
        }
        break;
      case Term::Kind::Seq:
      case Term::Kind::Alt:
        for (const TermPtr& c : t->children) allocate_term(proc, c);
        break;
      case Term::Kind::Assign:
        intern_slot(proc, t->assign_var);
        allocate_expr(proc, t->assign_expr);
        break;
      case Term::Kind::IfCase:
        allocate_expr(proc, t->scrutinee);
        for (const IfArm& a : t->arms) {
          if (a.guard) allocate_cond(proc, *a.guard);
          allocate_term(proc, a.body);
        }
        break;
      case Term::Kind::Guard:
        allocate_cond(proc, *t->guard_cond);
        break;
      case Term::Kind::Loop:
        allocate_term(proc, t->loop_body);
        break;
      case Term::Kind::Break:
        break;
      case Term::Kind::Call:
        for (const ExprPtr& a : t->args) allocate_expr(proc, a);
        break;
    }
  }

  CExprPtr compile_expr(const ExprPtr& e) {
    auto c = std::make_shared<CExpr>();
    c->op = e->op;
    switch (e->op) {
      case Expr::Op::Const:
        c->value = e->value;
        break;
      case Expr::Op::Var:
        c->slot = slot_of(current_proc_->name, e->var);
        break;
      default:
        c->lhs = e->lhs ? compile_expr(e->lhs) : nullptr;
        c->rhs = e->rhs ? compile_expr(e->rhs) : nullptr;
        break;
    }
    return c;
  }

  CCond compile_cond(const Cond& c) {
    return CCond{c.op, compile_expr(c.lhs), compile_expr(c.rhs)};
  }

  std::uint32_t emit_instr(CInstr::Op op) {
    CInstr in;
    in.op = op;
    out_.code.push_back(std::move(in));
    return static_cast<std::uint32_t>(out_.code.size() - 1);
  }

  // Compiles `t`; control falls through to the next emitted instruction
  // unless the term ends in Call, Break, or an endless Loop.
  void compile_term(const TermPtr& t, bool tail) {
    switch (t->kind) {
      case Term::Kind::Emit: {
        std::uint32_t pc = emit_instr(CInstr::Op::Emit);
        CInstr& in = out_.code[pc];
        in.gate = intern_gate(t->gate);
        for (const OfferSpec& o : t->offers) {
          COffer co;
          co.is_send = o.is_send;
          if (o.is_send) {
            co.expr = compile_expr(o.expr);
          } else {
            if (o.domain.empty())
              throw NetworkError(where_ + ": empty bind domain for '" +
                                 o.bind_var + "' on gate " + t->gate);
            co.slot = slot_of(current_proc_->name, o.bind_var);
            co.domain = o.domain;
          }
          out_.code[pc].offers.push_back(std::move(co));
        }
        gate_arities_.emplace_back(t->gate, t->offers.size());
        break;
      }
      case Term::Kind::Seq:
        for (std::size_t i = 0; i < t->children.size(); ++i)
          compile_term(t->children[i], tail && i + 1 == t->children.size());
        break;
      case Term::Kind::Alt: {
        if (t->children.empty())
          throw NetworkError(where_ + ": empty alternative");
        std::uint32_t branch_pc = emit_instr(CInstr::Op::Branch);
        std::vector<std::uint32_t> joins;
        std::vector<std::uint32_t> starts;
        for (const TermPtr& c : t->children) {
          starts.push_back(static_cast<std::uint32_t>(out_.code.size()));
          compile_term(c, tail);
          joins.push_back(emit_instr(CInstr::Op::Jump));
        }
        std::uint32_t after = static_cast<std::uint32_t>(out_.code.size());
        out_.code[branch_pc].targets = std::move(starts);
        for (std::uint32_t j : joins) out_.code[j].target = after;
        break;
      }
      case Term::Kind::Assign: {
        std::uint32_t pc = emit_instr(CInstr::Op::Assign);
        out_.code[pc].slot = slot_of(current_proc_->name, t->assign_var);
        out_.code[pc].expr = compile_expr(t->assign_expr);
        break;
      }
      case Term::Kind::IfCase: {
        std::uint32_t case_pc = emit_instr(CInstr::Op::Case);
        out_.code[case_pc].expr = compile_expr(t->scrutinee);
        std::vector<std::uint32_t> joins;
        std::vector<CArm> arms;
        for (const IfArm& a : t->arms) {
          CArm ca;
          ca.has_pattern = a.pattern.has_value();
          if (a.pattern) ca.pattern = *a.pattern;
          ca.has_guard = a.guard.has_value();
          if (a.guard) ca.guard = compile_cond(*a.guard);
          ca.target = static_cast<std::uint32_t>(out_.code.size());
          compile_term(a.body, tail);
          joins.push_back(emit_instr(CInstr::Op::Jump));
          arms.push_back(std::move(ca));
        }
        std::uint32_t after = static_cast<std::uint32_t>(out_.code.size());
        out_.code[case_pc].arms = std::move(arms);
        for (std::uint32_t j : joins) out_.code[j].target = after;
        break;
      }
      case Term::Kind::Guard: {
        std::uint32_t pc = emit_instr(CInstr::Op::Guard);
        out_.code[pc].cond = compile_cond(*t->guard_cond);
        break;
      }
      case Term::Kind::Loop: {
        for (const auto& [id, _] : loop_stack_)
          if (id == t->loop_id)
            throw NetworkError(where_ + ": nested loop reuses id '" +
                               t->loop_id + "'");
        loop_stack_.emplace_back(t->loop_id, std::vector<std::uint32_t>{});
        std::uint32_t head = static_cast<std::uint32_t>(out_.code.size());
        compile_term(t->loop_body, /*tail=*/false);
        std::uint32_t back = emit_instr(CInstr::Op::Jump);
        out_.code[back].target = head;
        std::uint32_t after = static_cast<std::uint32_t>(out_.code.size());
        for (std::uint32_t pc : loop_stack_.back().second)
          out_.code[pc].target = after;
        loop_stack_.pop_back();
        break;
      }
      case Term::Kind::Break: {
        bool found = false;
        for (auto& [id, patches] : loop_stack_) {
          if (id == t->loop_id) {
            patches.push_back(emit_instr(CInstr::Op::Jump));
            found = true;
            break;
          }
        }
        if (!found)
          throw NetworkError(where_ + ": break outside loop '" + t->loop_id +
                             "'");
        break;
      }
      case Term::Kind::Call: {
        if (!tail)
          throw NetworkError(where_ + ": call of '" + t->callee +
                             "' is not in tail position");
        auto it = proc_index_.find(t->callee);
        if (it == proc_index_.end())
          throw NetworkError(where_ + ": call to unknown process '" +
                             t->callee + "'");
        const ProcessDef& callee = inst_.program.processes[it->second];
        if (callee.params.size() != t->args.size())
          throw NetworkError(where_ + ": call of '" + t->callee + "' passes " +
                             std::to_string(t->args.size()) + " arguments, " +
                             "expected " +
                             std::to_string(callee.params.size()));
        std::uint32_t pc = emit_instr(CInstr::Op::Call);
        for (const std::string& p : callee.params)
          out_.code[pc].param_slots.push_back(slot_of(callee.name, p));
        for (const ExprPtr& a : t->args)
          out_.code[pc].args.push_back(compile_expr(a));
        call_patches_.emplace_back(pc, t->callee);
        break;
      }
    }
  }

  std::uint32_t intern_gate(const std::string& gate) {
    auto it = gate_index_.find(gate);
    if (it != gate_index_.end()) return it->second;
    std::uint32_t id = static_cast<std::uint32_t>(gate_index_.size());
    gate_index_.emplace(gate, id);
    gates_in_order_.push_back(gate);
    return id;
  }

 public:
  // Filled during run(); consumed by the network compiler.
  std::vector<std::string> gates_in_order_;
  std::vector<std::pair<std::string, std::size_t>> gate_arities_;

 private:
  const Instance& inst_;
  std::string where_;
  CompiledInstance out_;
  std::map<std::string, std::size_t> proc_index_;
  std::map<std::string, std::uint32_t> slots_;
  std::vector<std::uint32_t> entry_pcs_;
  std::vector<std::pair<std::uint32_t, std::string>> call_patches_;
  std::vector<std::pair<std::string, std::vector<std::uint32_t>>> loop_stack_;
  std::map<std::string, std::uint32_t> gate_index_;
  const ProcessDef* current_proc_ = nullptr;
};

inline void collect_expr_slots(const CExprPtr& e, std::uint64_t& mask) {
  if (!e) return;
  if (e->op == Expr::Op::Var) mask |= std::uint64_t{1} << e->slot;
  collect_expr_slots(e->lhs, mask);
  collect_expr_slots(e->rhs, mask);
}

inline void instr_use_def(const CInstr& in, std::uint64_t& use,
                          std::uint64_t& def) {
  use = def = 0;
  switch (in.op) {
    case CInstr::Op::Emit:
      for (const COffer& o : in.offers) {
        if (o.is_send)
          collect_expr_slots(o.expr, use);
        else
          def |= std::uint64_t{1} << o.slot;
      }
      break;
    case CInstr::Op::Assign:
      collect_expr_slots(in.expr, use);
      def |= std::uint64_t{1} << in.slot;
      break;
    case CInstr::Op::Case:
      collect_expr_slots(in.expr, use);
      for (const CArm& a : in.arms)
        if (a.has_guard) {
          collect_expr_slots(a.guard.lhs, use);
          collect_expr_slots(a.guard.rhs, use);
        }
      break;
    case CInstr::Op::Guard:
      collect_expr_slots(in.cond.lhs, use);
      collect_expr_slots(in.cond.rhs, use);
      break;
    case CInstr::Op::Call:
      for (const CExprPtr& a : in.args) collect_expr_slots(a, use);
      for (std::uint32_t s : in.param_slots) def |= std::uint64_t{1} << s;
      break;
    default:
      break;
  }
}

template <typename Fn>
inline void for_each_successor_pc(const CInstr& in, std::uint32_t pc, Fn fn) {
  switch (in.op) {
    case CInstr::Op::Emit:
    case CInstr::Op::Assign:
    case CInstr::Op::Guard:
      fn(pc + 1);
      break;
    case CInstr::Op::Jump:
    case CInstr::Op::Call:
      fn(in.target);
      break;
    case CInstr::Op::Branch:
      for (std::uint32_t t : in.targets) fn(t);
      break;
    case CInstr::Op::Case:
      for (const CArm& a : in.arms) fn(a.target);
      break;
    case CInstr::Op::Halt:
      break;
  }
}

/// Forward may-be-unassigned analysis: on every path from the entry, a slot
/// must be written (assign, bind, call parameter, or initial valuation)
/// before it is read.
inline void check_definite_assignment(const CompiledInstance& ci,
                                      std::uint64_t initial_defined) {
  std::vector<std::uint64_t> in(ci.code.size(), 0);
  std::vector<bool> visited(ci.code.size(), false);
  std::vector<bool> queued(ci.code.size(), false);
  std::vector<std::uint32_t> work{ci.entry_pc};
  in[ci.entry_pc] = initial_defined;
  visited[ci.entry_pc] = true;
  queued[ci.entry_pc] = true;
  while (!work.empty()) {
    std::uint32_t pc = work.back();
    work.pop_back();
    queued[pc] = false;
    std::uint64_t use, def;
    instr_use_def(ci.code[pc], use, def);
    if ((use & ~in[pc]) != 0) {
      for (std::uint32_t s = 0; s < 64; ++s)
        if (use >> s & 1 && !(in[pc] >> s & 1))
          throw NetworkError("instance '" + ci.name + "': variable " +
                             ci.slot_names[s] +
                             " may be read before assignment");
    }
    std::uint64_t out = in[pc] | def;
    for_each_successor_pc(ci.code[pc], pc, [&](std::uint32_t succ) {
      if (!visited[succ]) {
        visited[succ] = true;
        in[succ] = out;
      } else {
        std::uint64_t next = in[succ] & out;
        if (next == in[succ]) return;
        in[succ] = next;
      }
      if (!queued[succ]) {
        queued[succ] = true;
        work.push_back(succ);
      }
    });
  }
}

/// Backward liveness; live_in masks make state identity insensitive to dead
/// variables, which keeps reachable state counts small and canonical.
inline void compute_liveness(CompiledInstance& ci) {
  std::vector<std::uint64_t> use(ci.code.size()), def(ci.code.size());
  for (std::size_t pc = 0; pc < ci.code.size(); ++pc)
    instr_use_def(ci.code[pc], use[pc], def[pc]);
  ci.live_in.assign(ci.code.size(), 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = ci.code.size(); i-- > 0;) {
      std::uint32_t pc = static_cast<std::uint32_t>(i);
      std::uint64_t out = 0;
      for_each_successor_pc(ci.code[pc], pc,
                            [&](std::uint32_t s) { out |= ci.live_in[s]; });
      std::uint64_t next = use[pc] | (out & ~def[pc]);
      if (next != ci.live_in[pc]) {
        ci.live_in[pc] = next;
        changed = true;
      }
    }
  }
}

}  // namespace detail

/// Compiles and statically checks a network: resolves variables and calls,
/// enforces tail-call-only recursion, verifies that every emitted gate has a
/// participation rule and a consistent arity, and that no variable can be
/// read before assignment. Throws NetworkError on any violation.
inline CompiledNetwork compile(const ProcessNetwork& net) {
  CompiledNetwork out;
  std::map<std::string, std::uint32_t> gate_ids;
  std::map<std::string, std::size_t> gate_arity;

  for (std::size_t i = 0; i < net.instances.size(); ++i) {
    detail::InstanceCompiler ic(net.instances[i],
                                static_cast<std::uint32_t>(i));
    CompiledInstance ci = ic.run();

    // Re-map per-instance gate ids onto network-wide ids.
    std::vector<std::uint32_t> remap(ic.gates_in_order_.size());
    for (std::size_t g = 0; g < ic.gates_in_order_.size(); ++g) {
      const std::string& name = ic.gates_in_order_[g];
      auto it = gate_ids.find(name);
      if (it == gate_ids.end()) {
        it = gate_ids.emplace(name, static_cast<std::uint32_t>(
                                        out.gate_names.size()))
                 .first;
        out.gate_names.push_back(name);
      }
      remap[g] = it->second;
    }
    for (CInstr& in : ci.code)
      if (in.op == CInstr::Op::Emit) in.gate = remap[in.gate];

    for (const auto& [gate, arity] : ic.gate_arities_) {
      auto [it, fresh] = gate_arity.emplace(gate, arity);
      if (!fresh && it->second != arity)
        throw NetworkError("gate " + gate + " is emitted with arities " +
                           std::to_string(it->second) + " and " +
                           std::to_string(arity));
    }

    std::uint64_t initial_defined = 0;
    const Instance& inst = net.instances[i];
    const std::string& entry_proc = inst.program.processes[0].name;
    for (const auto& [var_name, value] : inst.initial) {
      (void)value;
      initial_defined |= std::uint64_t{1}
                         << ic.slot_of(entry_proc, var_name);
    }
    detail::check_definite_assignment(ci, initial_defined);
    detail::compute_liveness(ci);
    out.instances.push_back(std::move(ci));
  }

  // Participation rules.
  out.rules.resize(out.gate_names.size());
  for (std::size_t g = 0; g < out.gate_names.size(); ++g) {
    const std::string& name = out.gate_names[g];
    auto it = net.sync_table.find(name);
    if (it == net.sync_table.end())
      throw NetworkError("gate " + name + " has no synchronization rule");
    const GateRule& rule = it->second;
    CompiledRule cr;
    cr.keyed = rule.keyed_by_first_offer;
    auto check_set = [&](const std::vector<std::uint32_t>& set) {
      if (set.empty())
        throw NetworkError("gate " + name + " has an empty participant set");
      std::set<std::uint32_t> seen;
      for (std::uint32_t p : set) {
        if (p >= net.instances.size())
          throw NetworkError("gate " + name +
                             " references instance out of range");
        if (!seen.insert(p).second)
          throw NetworkError("gate " + name +
                             " lists an instance twice in one rule");
      }
    };
    if (cr.keyed) {
      if (rule.by_value.empty())
        throw NetworkError("gate " + name + " has an empty selector table");
      if (gate_arity[name] == 0)
        throw NetworkError("gate " + name +
                           " is keyed by first offer but has no offers");
      for (const auto& [v, set] : rule.by_value) {
        check_set(set);
        cr.by_value.emplace_back(v, set);
      }
    } else {
      check_set(rule.participants);
      cr.fixed = rule.participants;
    }
    out.rules[g] = std::move(cr);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Execution.
// ---------------------------------------------------------------------------

namespace detail {

/// Runs deterministic control (assignments, jumps, tail calls, decided
/// cases, passing guards) until the next stable instruction: an Emit, a
/// Branch, a Halt, or a failing Guard. Masks the valuation to the live
/// variables of the stable point.
inline void absorb_deterministic(const CompiledInstance& ci,
                                 InstanceSnapshot& st) {
  for (int steps = 0; steps < kControlStepBound; ++steps) {
    const CInstr& in = ci.code[st.pc];
    switch (in.op) {
      case CInstr::Op::Emit:
      case CInstr::Op::Branch:
      case CInstr::Op::Halt:
        st.defined &= ci.live_in[st.pc];
        return;
      case CInstr::Op::Guard:
        if (!eval_cond(in.cond, st)) {
          st.defined &= ci.live_in[st.pc];
          return;  // permanently refused; the instance is stuck here
        }
        ++st.pc;
        break;
      case CInstr::Op::Assign:
        st.regs[in.slot] = eval_expr(*in.expr, st);
        st.defined |= std::uint64_t{1} << in.slot;
        ++st.pc;
        break;
      case CInstr::Op::Jump:
        st.pc = in.target;
        break;
      case CInstr::Op::Case: {
        Value v = eval_expr(*in.expr, st);
        const CArm* chosen = nullptr;
        for (const CArm& a : in.arms) {
          if (a.has_pattern && !(a.pattern == v)) continue;
          if (a.has_guard && !eval_cond(a.guard, st)) continue;
          chosen = &a;
          break;
        }
        if (!chosen)
          throw InternalError("instance '" + ci.name +
                              "': case has no arm for value " + v.text());
        st.pc = chosen->target;
        break;
      }
      case CInstr::Op::Call: {
        std::vector<Value> vals;
        vals.reserve(in.args.size());
        for (const CExprPtr& a : in.args) vals.push_back(eval_expr(*a, st));
        for (std::size_t i = 0; i < vals.size(); ++i) {
          st.regs[in.param_slots[i]] = std::move(vals[i]);
          st.defined |= std::uint64_t{1} << in.param_slots[i];
        }
        st.pc = in.target;
        break;
      }
    }
  }
  throw InternalError("instance '" + ci.name +
                      "': control loop without an emission");
}

struct FrontierOffer {
  bool is_send;
  Value value = Value::count(0);      // send: evaluated
  std::uint32_t slot = 0;             // bind
  const std::vector<Value>* domain = nullptr;  // bind
};

struct EmitEntry {
  std::uint32_t gate;
  std::vector<FrontierOffer> offers;
  std::uint32_t cont_pc;
  std::uint64_t defined;
  std::vector<Value> regs;
};

/// Collects every emission reachable from a stable point through control
/// steps and Alt forks; used as one side of the synchronization product.
inline std::vector<EmitEntry> collect_frontier(const CompiledInstance& ci,
                                               const InstanceSnapshot& stable) {
  std::vector<EmitEntry> out;
  std::vector<InstanceSnapshot> stack{stable};
  int steps = 0;
  while (!stack.empty()) {
    InstanceSnapshot st = std::move(stack.back());
    stack.pop_back();
    for (;;) {
      if (++steps > kControlStepBound)
        throw InternalError("instance '" + ci.name +
                            "': control loop without an emission");
      const CInstr& in = ci.code[st.pc];
      bool path_done = false;
      switch (in.op) {
        case CInstr::Op::Emit: {
          EmitEntry e;
          e.gate = in.gate;
          for (const COffer& o : in.offers) {
            FrontierOffer fo;
            fo.is_send = o.is_send;
            if (o.is_send)
              fo.value = eval_expr(*o.expr, st);
            else {
              fo.slot = o.slot;
              fo.domain = &o.domain;
            }
            e.offers.push_back(std::move(fo));
          }
          e.cont_pc = st.pc + 1;
          e.defined = st.defined;
          e.regs = st.regs;
          out.push_back(std::move(e));
          path_done = true;
          break;
        }
        case CInstr::Op::Halt:
          path_done = true;
          break;
        case CInstr::Op::Guard:
          if (eval_cond(in.cond, st))
            ++st.pc;
          else
            path_done = true;
          break;
        case CInstr::Op::Branch: {
          for (std::size_t i = in.targets.size(); i-- > 1;) {
            InstanceSnapshot forked = st;
            forked.pc = in.targets[i];
            stack.push_back(std::move(forked));
          }
          st.pc = in.targets[0];
          break;
        }
        case CInstr::Op::Assign:
          st.regs[in.slot] = eval_expr(*in.expr, st);
          st.defined |= std::uint64_t{1} << in.slot;
          ++st.pc;
          break;
        case CInstr::Op::Jump:
          st.pc = in.target;
          break;
        case CInstr::Op::Case: {
          Value v = eval_expr(*in.expr, st);
          const CArm* chosen = nullptr;
          for (const CArm& a : in.arms) {
            if (a.has_pattern && !(a.pattern == v)) continue;
            if (a.has_guard && !eval_cond(a.guard, st)) continue;
            chosen = &a;
            break;
          }
          if (!chosen)
            throw InternalError("instance '" + ci.name +
                                "': case has no arm for value " + v.text());
          st.pc = chosen->target;
          break;
        }
        case CInstr::Op::Call: {
          std::vector<Value> vals;
          vals.reserve(in.args.size());
          for (const CExprPtr& a : in.args) vals.push_back(eval_expr(*a, st));
          for (std::size_t i = 0; i < vals.size(); ++i) {
            st.regs[in.param_slots[i]] = std::move(vals[i]);
            st.defined |= std::uint64_t{1} << in.param_slots[i];
          }
          st.pc = in.target;
          break;
        }
      }
      if (path_done) break;
    }
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Offer unification.
// ---------------------------------------------------------------------------

/// One participant's view of one offer position: a concrete sent value or a
/// hole (bind) with a finite domain, identified by a caller-chosen key.
struct OfferForm {
  static OfferForm sent(Value v) {
    OfferForm o;
    o.is_send = true;
    o.value = std::move(v);
    return o;
  }
  static OfferForm hole(std::uint32_t key, std::vector<Value> domain) {
    OfferForm o;
    o.is_send = false;
    o.key = key;
    o.domain = std::move(domain);
    return o;
  }

  bool is_send = false;
  Value value = Value::count(0);
  std::uint32_t key = 0;
  std::vector<Value> domain;
};

struct UnifySolution {
  std::vector<Value> agreed;  // one value per offer position
  // bindings[p] lists (key, value) for participant p's holes, position order.
  std::vector<std::vector<std::pair<std::uint32_t, Value>>> bindings;
};

/// Position-wise agreement across participants: with at least one sent value
/// a position admits exactly that value (all senders must agree and every
/// hole's domain must contain it); with holes only, the position ranges over
/// the sorted intersection of the domains. Solutions are the cartesian
/// product over positions, enumerated in value order, left position fastest-
/// varying last (lexicographic). Arity mismatches are a bug in the caller's
/// network construction and throw InternalError.
inline std::vector<UnifySolution> unify_offers(
    const std::vector<std::vector<OfferForm>>& participants) {
  std::vector<UnifySolution> none;
  if (participants.empty()) return {UnifySolution{}};
  std::size_t arity = participants[0].size();
  for (const auto& p : participants)
    if (p.size() != arity)
      throw InternalError("offer arity mismatch in synchronization");

  std::vector<std::vector<Value>> candidates(arity);
  for (std::size_t pos = 0; pos < arity; ++pos) {
    const Value* sent = nullptr;
    for (const auto& p : participants) {
      if (!p[pos].is_send) continue;
      if (sent && !(*sent == p[pos].value)) return none;
      sent = &p[pos].value;
    }
    if (sent) {
      for (const auto& p : participants) {
        if (p[pos].is_send) continue;
        const auto& dom = p[pos].domain;
        if (std::find(dom.begin(), dom.end(), *sent) == dom.end())
          return none;
      }
      candidates[pos] = {*sent};
    } else {
      std::vector<Value> inter = participants[0][pos].domain;
      std::sort(inter.begin(), inter.end());
      inter.erase(std::unique(inter.begin(), inter.end()), inter.end());
      for (std::size_t p = 1; p < participants.size(); ++p) {
        const auto& dom = participants[p][pos].domain;
        std::vector<Value> next;
        for (const Value& v : inter)
          if (std::find(dom.begin(), dom.end(), v) != dom.end())
            next.push_back(v);
        inter = std::move(next);
      }
      if (inter.empty()) return none;
      candidates[pos] = std::move(inter);
    }
  }

  std::vector<UnifySolution> out;
  std::vector<std::size_t> idx(arity, 0);
  for (;;) {
    UnifySolution sol;
    sol.agreed.reserve(arity);
    for (std::size_t pos = 0; pos < arity; ++pos)
      sol.agreed.push_back(candidates[pos][idx[pos]]);
    sol.bindings.resize(participants.size());
    for (std::size_t p = 0; p < participants.size(); ++p)
      for (std::size_t pos = 0; pos < arity; ++pos)
        if (!participants[p][pos].is_send)
          sol.bindings[p].emplace_back(participants[p][pos].key,
                                       sol.agreed[pos]);
    out.push_back(std::move(sol));
    std::size_t pos = arity;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < candidates[pos].size()) break;
      idx[pos] = 0;
      if (pos == 0) return out;
    }
    if (arity == 0) return out;
  }
}

// ---------------------------------------------------------------------------
// Global successor relation.
// ---------------------------------------------------------------------------

struct SuccessorRec {
  Label label;
  GlobalState state;
  std::string key;  // encode_state(state), cached for callers
};

/// The stable global state every instance starts in: entry control point
/// with the initial valuation, deterministic prefix absorbed.
inline GlobalState initial_state(const CompiledNetwork& cn,
                                 const ProcessNetwork& net) {
  GlobalState gs;
  for (std::size_t i = 0; i < cn.instances.size(); ++i) {
    const CompiledInstance& ci = cn.instances[i];
    InstanceSnapshot st;
    st.pc = ci.entry_pc;
    st.regs.assign(ci.slot_names.size(), Value::count(0));
    const Instance& inst = net.instances[i];
    const std::string& entry_proc = inst.program.processes[0].name;
    for (const auto& [var_name, value] : inst.initial) {
      auto it = std::find(ci.slot_names.begin(), ci.slot_names.end(),
                          entry_proc + "." + var_name);
      if (it == ci.slot_names.end())
        throw NetworkError("instance '" + inst.name +
                           "': initial valuation names unknown variable '" +
                           var_name + "'");
      std::uint32_t slot =
          static_cast<std::uint32_t>(it - ci.slot_names.begin());
      st.regs[slot] = value;
      st.defined |= std::uint64_t{1} << slot;
    }
    detail::absorb_deterministic(ci, st);
    gs.instances.push_back(std::move(st));
  }
  return gs;
}

/// All enabled joint moves from a stable global state, deterministically
/// ordered by (canonical label text, successor encoding) and deduplicated.
inline std::vector<SuccessorRec> successors(const CompiledNetwork& cn,
                                            const GlobalState& gs) {
  std::size_t n = cn.instances.size();
  std::vector<std::vector<detail::EmitEntry>> frontier(n);
  for (std::size_t i = 0; i < n; ++i)
    frontier[i] = detail::collect_frontier(cn.instances[i], gs.instances[i]);

  // entries_by_gate[i] maps gate id -> indexes into frontier[i].
  std::vector<std::map<std::uint32_t, std::vector<std::size_t>>> by_gate(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t e = 0; e < frontier[i].size(); ++e)
      by_gate[i][frontier[i][e].gate].push_back(e);

  std::vector<SuccessorRec> out;

  auto emit_joint = [&](std::uint32_t gate,
                        const std::vector<std::uint32_t>& participants,
                        const std::vector<std::size_t>& entry_choice,
                        const Value* pin_first) {
    std::vector<std::vector<OfferForm>> forms(participants.size());
    for (std::size_t p = 0; p < participants.size(); ++p) {
      const detail::EmitEntry& e =
          frontier[participants[p]][entry_choice[p]];
      for (std::size_t pos = 0; pos < e.offers.size(); ++pos) {
        const detail::FrontierOffer& fo = e.offers[pos];
        if (fo.is_send) {
          forms[p].push_back(OfferForm::sent(fo.value));
        } else if (pin_first && pos == 0) {
          forms[p].push_back(OfferForm::hole(fo.slot, {*pin_first}));
        } else {
          forms[p].push_back(OfferForm::hole(fo.slot, *fo.domain));
        }
      }
    }
    for (const UnifySolution& sol : unify_offers(forms)) {
      if (pin_first && !(sol.agreed[0] == *pin_first)) continue;
      GlobalState next = gs;
      for (std::size_t p = 0; p < participants.size(); ++p) {
        const detail::EmitEntry& e =
            frontier[participants[p]][entry_choice[p]];
        InstanceSnapshot st;
        st.pc = e.cont_pc;
        st.defined = e.defined;
        st.regs = e.regs;
        for (const auto& [slot, v] : sol.bindings[p]) {
          st.regs[slot] = v;
          st.defined |= std::uint64_t{1} << slot;
        }
        detail::absorb_deterministic(cn.instances[participants[p]], st);
        next.instances[participants[p]] = std::move(st);
      }
      SuccessorRec rec;
      rec.label = Label(cn.gate_names[gate], sol.agreed);
      rec.key = encode_state(next);
      rec.state = std::move(next);
      out.push_back(std::move(rec));
    }
  };

  auto combos = [&](std::uint32_t gate,
                    const std::vector<std::uint32_t>& participants,
                    const std::vector<const std::vector<std::size_t>*>& lists,
                    const Value* pin_first) {
    std::vector<std::size_t> pick(participants.size(), 0);
    for (;;) {
      std::vector<std::size_t> choice(participants.size());
      for (std::size_t p = 0; p < participants.size(); ++p)
        choice[p] = (*lists[p])[pick[p]];
      emit_joint(gate, participants, choice, pin_first);
      std::size_t p = participants.size();
      bool done = true;
      while (p > 0) {
        --p;
        if (++pick[p] < lists[p]->size()) {
          done = false;
          break;
        }
        pick[p] = 0;
      }
      if (done) break;
    }
  };

  for (std::uint32_t gate = 0; gate < cn.gate_names.size(); ++gate) {
    const CompiledRule& rule = cn.rules[gate];
    if (!rule.keyed) {
      std::vector<const std::vector<std::size_t>*> lists;
      bool enabled = true;
      for (std::uint32_t p : rule.fixed) {
        auto it = by_gate[p].find(gate);
        if (it == by_gate[p].end()) {
          enabled = false;
          break;
        }
        lists.push_back(&it->second);
      }
      if (enabled) combos(gate, rule.fixed, lists, nullptr);
    } else {
      for (const auto& [key_value, participants] : rule.by_value) {
        std::vector<std::vector<std::size_t>> admissible(participants.size());
        bool enabled = true;
        for (std::size_t p = 0; p < participants.size(); ++p) {
          auto it = by_gate[participants[p]].find(gate);
          if (it == by_gate[participants[p]].end()) {
            enabled = false;
            break;
          }
          for (std::size_t e : it->second) {
            const detail::FrontierOffer& first =
                frontier[participants[p]][e].offers[0];
            bool admits =
                first.is_send
                    ? first.value == key_value
                    : std::find(first.domain->begin(), first.domain->end(),
                                key_value) != first.domain->end();
            if (admits) admissible[p].push_back(e);
          }
          if (admissible[p].empty()) {
            enabled = false;
            break;
          }
        }
        if (!enabled) continue;
        std::vector<const std::vector<std::size_t>*> lists;
        for (const auto& a : admissible) lists.push_back(&a);
        combos(gate, participants, lists, &key_value);
      }
    }
  }

  std::sort(out.begin(), out.end(), [](const SuccessorRec& a,
                                       const SuccessorRec& b) {
    std::string ta = format_label(a.label), tb = format_label(b.label);
    if (ta != tb) return ta < tb;
    return a.key < b.key;
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const SuccessorRec& a, const SuccessorRec& b) {
                          return a.key == b.key && a.label == b.label;
                        }),
            out.end());
  return out;
}

/// Test support: looks up a variable of one instance in a stable state by
/// its qualified name ("PROC.var"); nullopt when masked out or unknown.
inline std::optional<Value> get_var(const CompiledNetwork& cn,
                                    const GlobalState& gs, std::size_t instance,
                                    const std::string& qualified) {
  const CompiledInstance& ci = cn.instances[instance];
  for (std::uint32_t s = 0; s < ci.slot_names.size(); ++s) {
    if (ci.slot_names[s] == qualified) {
      if (gs.instances[instance].defined >> s & 1)
        return gs.instances[instance].regs[s];
      return std::nullopt;
    }
  }
  return std::nullopt;
}

}  // namespace bba
