#include "leaksem/executor.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <functional>
#include <stdexcept>

namespace leaksem {

std::string ExecutionTrace::key() const {
    std::string k = component;
    for (const auto& c : callbacks) {
        k += "->";
        k += c;
    }
    return k;
}

void ExplorationStats::merge(const ExplorationStats& o) {
    pathsExplored += o.pathsExplored;
    pathsPruned += o.pathsPruned;
    snapshotsTaken += o.snapshotsTaken;
    snapshotHashChecks += o.snapshotHashChecks;
    snapshotHashMismatches += o.snapshotHashMismatches;
    pathBudgetExceeded = pathBudgetExceeded || o.pathBudgetExceeded;
    traceBudgetExceeded = traceBudgetExceeded || o.traceBudgetExceeded;
    prunedConstraints.insert(prunedConstraints.end(), o.prunedConstraints.begin(),
                             o.prunedConstraints.end());
    completedConstraints.insert(completedConstraints.end(),
                                o.completedConstraints.begin(),
                                o.completedConstraints.end());
}

namespace {

struct ExecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Representative concrete payloads returned by source APIs. The executor is
// concrete-first: sensitive values are sample data carrying their taint label.
std::string sample_for(const std::string& dataType) {
    if (dataType == "IMEI") return "862471039284710";
    if (dataType == "LOCATION_LON") return "-73.9857";
    if (dataType == "LOCATION_LAT") return "40.7484";
    if (dataType == "PHONE_NUMBER") return "15551234567";
    if (dataType == "SMS") return "sms-body-sample";
    if (dataType == "DEVICE_LOCALE") return "en_US";
    std::string low;
    for (char c : dataType) low += (char)std::tolower((unsigned char)c);
    return low + "-sample";
}

struct ControlEntry {
    const Block* stmts = nullptr;
    size_t idx = 0;
    const Stmt* loop = nullptr;   // enclosing while, when this entry is its body
    bool symbolicLoop = false;    // execute-once summarization in effect
    long long iterCount = 0;
};

struct Frame {
    std::string method;
    std::map<std::string, Value> locals;
    std::vector<ControlEntry> control;
};

// Bookkeeping for one active execute-once loop: locations written in the body
// and the taint each held before the first overwrite.
struct LoopRecord {
    size_t frameIndex = 0;
    size_t controlDepth = 0;
    std::vector<std::string> writeOrder;   // "F:name" or "L:<frame>:<name>"
    std::map<std::string, TaintSet> preTaint;
};

struct PathState {
    std::map<std::string, Value> fields;
    std::vector<Frame> frames;
    size_t cbIdx = 0;
    PathConstraint pc;
    std::vector<LoopRecord> loopRecords;
    int unknownDepth = 0;
    bool sourceInvoked = false;
    bool finished = false;

    size_t hash() const {
        std::string dump;
        for (const auto& [n, v] : fields) {
            dump += n;
            dump += '=';
            v.dump(dump);
        }
        for (const auto& f : frames) {
            dump += '@';
            dump += f.method;
            for (const auto& [n, v] : f.locals) {
                dump += n;
                dump += '=';
                v.dump(dump);
            }
            for (const auto& ce : f.control) {
                dump += '<';
                dump += std::to_string(ce.idx);
                dump += ce.symbolicLoop ? 's' : (ce.loop ? 'w' : 'b');
            }
        }
        dump += '!';
        dump += std::to_string(cbIdx);
        dump += pc.to_string();
        return std::hash<std::string>{}(dump);
    }
};

// Outcome of evaluating one condition conjunct.
struct CondOutcome {
    bool concrete = false;
    bool value = false;
    Atom atom;
};

std::string mirror_op(const std::string& op) {
    if (op == "<") return ">";
    if (op == ">") return "<";
    if (op == "<=") return ">=";
    if (op == ">=") return "<=";
    return op;
}

class TraceExecutor {
  public:
    TraceExecutor(const Program& program, const Component& comp,
                  const ExecutionTrace& trace, const ApiCatalog& catalog,
                  const Config& cfg)
        : comp_(comp), trace_(trace), catalog_(catalog), cfg_(cfg) {
        (void)program;
    }

    TraceResult run() {
        PathState init;
        for (const auto& f : comp_.fields) init.fields[f.name] = init_value(f);

        struct StackItem {
            PathState state;
            size_t pushHash = 0;
            bool checkHash = false;
        };
        std::vector<StackItem> snapStack;
        snapStack.push_back({std::move(init), 0, false});

        while (!snapStack.empty()) {
            if (result_.stats.pathsExplored >= cfg_.maxPathsPerTrace) {
                result_.stats.pathBudgetExceeded = true;
                break;
            }
            StackItem item = std::move(snapStack.back());
            snapStack.pop_back();
            if (item.checkHash) {
                ++result_.stats.snapshotHashChecks;
                if (item.state.hash() != item.pushHash)
                    ++result_.stats.snapshotHashMismatches;
            }
            PathState st = std::move(item.state);
            try {
                run_path(st, snapStack);
            } catch (const ExecError& e) {
                result_.errors.push_back(e.what());
            }
            ++result_.stats.pathsExplored;
            result_.stats.completedConstraints.push_back(st.pc);
            for (const auto& [n, v] : st.fields)
                if (!v.taint.empty()) result_.taintedFields.insert(n);
        }
        return std::move(result_);
    }

  private:
    template <typename Stack>
    void run_path(PathState& st, Stack& snapStack) {
        while (true) {
            if (st.finished) return;
            if (st.frames.empty()) {
                if (st.cbIdx >= trace_.callbacks.size()) return;
                push_callback(st, trace_.callbacks[st.cbIdx]);
                ++st.cbIdx;
                continue;
            }
            Frame& fr = st.frames.back();
            if (fr.control.empty()) {
                pop_frame(st);
                continue;
            }
            ControlEntry& ce = fr.control.back();
            if (ce.idx >= ce.stmts->size()) {
                if (ce.loop && !ce.symbolicLoop) {
                    recheck_concrete_loop(st);
                    continue;
                }
                if (ce.symbolicLoop) finish_symbolic_loop(st);
                fr.control.pop_back();
                continue;
            }
            const Stmt& s = (*ce.stmts)[ce.idx];
            ++ce.idx;
            if (!exec_stmt(st, s, snapStack)) return;  // path consumed by fork bookkeeping
        }
    }

    // Returns false only when the current path terminated inside the statement.
    template <typename Stack>
    bool exec_stmt(PathState& st, const Stmt& s, Stack& snapStack) {
        switch (s.kind) {
            case Stmt::Kind::Assign: {
                Value v = eval(st, *s.expr);
                write_location(st, s.target, std::move(v));
                return true;
            }
            case Stmt::Kind::LocalCall:
                push_method(st, s.callee);
                return true;
            case Stmt::Kind::Return:
                pop_frame(st);
                return true;
            case Stmt::Kind::ApiCall:
                return exec_api_call(st, s);
            case Stmt::Kind::If:
            case Stmt::Kind::While:
                return exec_branch(st, s, snapStack);
        }
        return true;
    }

    bool exec_api_call(PathState& st, const Stmt& s) {
        const ApiSpec* spec = catalog_.find(s.callee);
        if (!spec) {
            // Validated at parse time: a non-catalog name is a local method.
            if (!s.args.empty())
                throw ExecError("local method " + s.callee + " takes no arguments");
            push_method(st, s.callee);
            return true;
        }
        std::vector<Value> args;
        args.reserve(s.args.size());
        for (const auto& a : s.args) args.push_back(eval(st, *a));

        switch (spec->kind) {
            case ApiSpec::Kind::Source: {
                st.sourceInvoked = true;
                Value v = Value::concrete_str(sample_for(spec->dataType),
                                              TaintSet{spec->dataType});
                if (!s.target.empty()) write_location(st, s.target, std::move(v));
                return true;
            }
            case ApiSpec::Kind::Sink: {
                emit_sink(st, s.callee, args);
                if (!s.target.empty())
                    write_location(st, s.target, Value::concrete_str(""));
                if (cfg_.mode == AnalysisMode::SinkReach) {
                    // Reachability-style analyses stop once a sink is touched.
                    st.finished = true;
                    return false;
                }
                return true;
            }
            case ApiSpec::Kind::Env: {
                Value v = eval_env(st, *spec, args, s);
                if (!s.target.empty()) write_location(st, s.target, std::move(v));
                return true;
            }
        }
        return true;
    }

    Value eval_env(PathState& st, const ApiSpec& spec, const std::vector<Value>& args,
                   const Stmt& site) {
        switch (spec.env) {
            case ApiSpec::EnvBehavior::ForcedTrue:
                return Value::concrete_bool(true);
            case ApiSpec::EnvBehavior::FixedValue:
                return spec.fixedIsInt ? Value::concrete_int(spec.fixedInt)
                                       : Value::concrete_str(spec.fixedStr);
            case ApiSpec::EnvBehavior::Symbolic: {
                uint64_t id = fresh_sym(spec.name, spec.envOrigin, spec.envType);
                switch (spec.envType) {
                    case ValType::Int: return Value::symbolic_int(id);
                    case ValType::Bool: return Value::symbolic_bool(id);
                    default: return Value::symbolic_str(id);
                }
            }
            case ApiSpec::EnvBehavior::DecryptTable: {
                if (args.size() != 1)
                    throw ExecError(spec.name + " expects one argument");
                const Value& a = args[0];
                if (a.type == ValType::Str && !a.isNull && a.is_concrete()) {
                    auto it = spec.decryptTable.find(a.str_text());
                    if (it != spec.decryptTable.end()) {
                        Value v = Value::concrete_str(it->second, a.taint);
                        for (auto& seg : v.segs) seg.decrypted = true;
                        return v;
                    }
                }
                if (cfg_.strictDecrypt)
                    throw ExecError(spec.name + ": no decrypt-table entry for argument at line " +
                                    std::to_string(site.pos.line));
                uint64_t id =
                    fresh_sym(spec.name, SymOrigin::IncomingInfo, ValType::Str);
                Value v = Value::symbolic_str(id, a.taint);
                v.segs[0].decrypted = true;
                return v;
            }
            case ApiSpec::EnvBehavior::SymbolicArray: {
                int n = cfg_.symbolicArrayLen >= 1 ? cfg_.symbolicArrayLen
                                                   : spec.elementCount;
                Value v;
                v.type = ValType::StrArray;
                for (int k = 0; k < n; ++k) {
                    uint64_t id = fresh_sym(spec.name + "_" + std::to_string(k),
                                            spec.envOrigin, ValType::Str);
                    v.arr.push_back(Value::symbolic_str(id));
                }
                return v;
            }
        }
        throw ExecError("unhandled env behavior");
    }

    template <typename Stack>
    bool exec_branch(PathState& st, const Stmt& s, Stack& snapStack) {
        bool isWhile = (s.kind == Stmt::Kind::While);

        std::vector<CondOutcome> outs;
        outs.reserve(s.cond.conjuncts.size());
        bool anyConcreteFalse = false;
        for (const auto& atom : s.cond.conjuncts) {
            CondOutcome o = eval_cond_atom(st, atom);
            if (o.concrete && !o.value) {
                anyConcreteFalse = true;
                break;
            }
            outs.push_back(std::move(o));
        }

        if (anyConcreteFalse) {
            if (!isWhile && s.elseBlock) enter_block(st, *s.elseBlock);
            return true;
        }

        std::vector<Atom> symAtoms;
        for (const auto& o : outs)
            if (!o.concrete) symAtoms.push_back(o.atom);

        if (symAtoms.empty()) {
            // fully concrete, all conjuncts true
            if (isWhile) enter_concrete_loop(st, s);
            else enter_block(st, *s.thenBlock);
            return true;
        }

        if (isWhile) {
            enter_symbolic_loop(st, s);
            return true;
        }

        return fork_if(st, s, symAtoms, snapStack);
    }

    // Depth-first exploration of an unknown if: one then-world carrying all
    // atoms, plus one else-world per atom (short-circuit order). Worlds whose
    // PC is infeasible are pruned; the then-world runs first.
    template <typename Stack>
    bool fork_if(PathState& st, const Stmt& s, const std::vector<Atom>& symAtoms,
                 Stack& snapStack) {
        struct World {
            PathConstraint pc;
            bool takeThen;
        };
        std::vector<World> worlds;
        {
            World thenW{st.pc, true};
            for (const auto& a : symAtoms) thenW.pc.add(a);
            worlds.push_back(std::move(thenW));
        }
        for (size_t i = 0; i < symAtoms.size(); ++i) {
            World w{st.pc, false};
            for (size_t j = 0; j < i; ++j) w.pc.add(symAtoms[j]);
            w.pc.add(symAtoms[i].negated());
            worlds.push_back(std::move(w));
        }

        std::vector<World> feasible;
        for (auto& w : worlds) {
            if (check_feasibility(w.pc) == Feasibility::Feasible) {
                feasible.push_back(std::move(w));
            } else {
                ++result_.stats.pathsPruned;
                result_.stats.prunedConstraints.push_back(w.pc);
            }
        }
        if (feasible.empty()) {
            st.finished = true;
            return false;
        }

        bool depthExceeded = st.unknownDepth + 1 > cfg_.maxUnknownDepth;
        if (depthExceeded) result_.stats.pathBudgetExceeded = true;

        // Siblings are snapshotted in reverse so they pop in order.
        if (!depthExceeded) {
            for (size_t i = feasible.size(); i-- > 1;) {
                PathState sib = st;
                sib.pc = feasible[i].pc;
                sib.unknownDepth = st.unknownDepth + 1;
                apply_direction(sib, s, feasible[i].takeThen);
                ++result_.stats.snapshotsTaken;
                size_t h = sib.hash();
                snapStack.push_back({std::move(sib), h, true});
            }
        }
        st.pc = feasible[0].pc;
        st.unknownDepth += 1;
        apply_direction(st, s, feasible[0].takeThen);
        return true;
    }

    void apply_direction(PathState& st, const Stmt& s, bool takeThen) {
        if (takeThen) enter_block(st, *s.thenBlock);
        else if (s.elseBlock) enter_block(st, *s.elseBlock);
    }

    void enter_block(PathState& st, const Block& b) {
        st.frames.back().control.push_back({&b, 0, nullptr, false, 0});
    }

    void enter_concrete_loop(PathState& st, const Stmt& s) {
        st.frames.back().control.push_back({s.thenBlock.get(), 0, &s, false, 0});
    }

    void enter_symbolic_loop(PathState& st, const Stmt& s) {
        Frame& fr = st.frames.back();
        fr.control.push_back({s.thenBlock.get(), 0, &s, true, 0});
        LoopRecord rec;
        rec.frameIndex = st.frames.size() - 1;
        rec.controlDepth = fr.control.size();
        st.loopRecords.push_back(std::move(rec));
    }

    // Body finished once: rebind every written, still-live location to a fresh
    // loop-summary symbol carrying the union of pre- and post-body taint.
    void finish_symbolic_loop(PathState& st) {
        if (st.loopRecords.empty()) throw ExecError("loop bookkeeping underflow");
        LoopRecord rec = std::move(st.loopRecords.back());
        st.loopRecords.pop_back();
        for (const auto& loc : rec.writeOrder) {
            Value* v = resolve_location(st, loc);
            if (!v) continue;
            TaintSet t = propagate_taint({rec.preTaint[loc], v->taint});
            std::string hint = loc.substr(loc.rfind(':') + 1);
            if (v->type == ValType::Int) {
                *v = Value::symbolic_int(
                    fresh_sym(hint, SymOrigin::LoopSummary, ValType::Int), t);
            } else if (v->type == ValType::Bool) {
                *v = Value::symbolic_bool(
                    fresh_sym(hint, SymOrigin::LoopSummary, ValType::Bool), t);
            } else if (v->type == ValType::StrArray) {
                for (auto& e : v->arr)
                    e = Value::symbolic_str(
                        fresh_sym(hint, SymOrigin::LoopSummary, ValType::Str), t);
            } else {
                *v = Value::symbolic_str(
                    fresh_sym(hint, SymOrigin::LoopSummary, ValType::Str), t);
            }
        }
    }

    // Returns false if the loop entry stays (another iteration started).
    bool recheck_concrete_loop(PathState& st) {
        Frame& fr = st.frames.back();
        ControlEntry& ce = fr.control.back();
        const Stmt& s = *ce.loop;

        bool anyConcreteFalse = false;
        bool anySymbolic = false;
        for (const auto& atom : s.cond.conjuncts) {
            CondOutcome o = eval_cond_atom(st, atom);
            if (o.concrete && !o.value) {
                anyConcreteFalse = true;
                break;
            }
            if (!o.concrete) anySymbolic = true;
        }
        if (anyConcreteFalse) {
            fr.control.pop_back();
            return false;
        }
        if (anySymbolic) {
            // Condition turned symbolic mid-loop: run the body once more under
            // the execute-once rule, then summarize.
            ce.symbolicLoop = true;
            ce.idx = 0;
            LoopRecord rec;
            rec.frameIndex = st.frames.size() - 1;
            rec.controlDepth = fr.control.size();
            st.loopRecords.push_back(std::move(rec));
            return false;
        }
        if (++ce.iterCount > cfg_.maxConcreteLoopIters)
            throw ExecError("concrete loop exceeded iteration cap in " + fr.method);
        ce.idx = 0;
        return false;
    }

    void push_callback(PathState& st, const std::string& name) {
        const MethodBody* b = comp_.find_body(name);
        if (!b) throw ExecError("trace callback " + name + " not found in " + comp_.name);
        Frame fr;
        fr.method = name;
        fr.control.push_back({&b->stmts, 0, nullptr, false, 0});
        st.frames.push_back(std::move(fr));
    }

    void push_method(PathState& st, const std::string& name) {
        auto it = comp_.methods.find(name);
        if (it == comp_.methods.end())
            throw ExecError("call to undeclared method " + name);
        Frame fr;
        fr.method = name;
        fr.control.push_back({&it->second.stmts, 0, nullptr, false, 0});
        st.frames.push_back(std::move(fr));
    }

    void pop_frame(PathState& st) {
        size_t idx = st.frames.size() - 1;
        // Loop records owned by the popped frame vanish without summarization.
        while (!st.loopRecords.empty() && st.loopRecords.back().frameIndex == idx)
            st.loopRecords.pop_back();
        st.frames.pop_back();
    }

    // ---- locations ----

    Value* resolve_location(PathState& st, const std::string& loc) {
        if (loc.rfind("F:", 0) == 0) {
            auto it = st.fields.find(loc.substr(2));
            return it == st.fields.end() ? nullptr : &it->second;
        }
        size_t c1 = loc.find(':');
        size_t c2 = loc.find(':', c1 + 1);
        size_t frameIdx = std::stoul(loc.substr(c1 + 1, c2 - c1 - 1));
        std::string name = loc.substr(c2 + 1);
        if (frameIdx >= st.frames.size()) return nullptr;
        auto it = st.frames[frameIdx].locals.find(name);
        return it == st.frames[frameIdx].locals.end() ? nullptr : &it->second;
    }

    void write_location(PathState& st, const std::string& name, Value v) {
        std::string loc;
        TaintSet oldTaint;
        if (st.fields.count(name)) {
            loc = "F:" + name;
            oldTaint = st.fields[name].taint;
            st.fields[name] = std::move(v);
        } else {
            Frame& fr = st.frames.back();
            loc = "L:" + std::to_string(st.frames.size() - 1) + ":" + name;
            if (fr.locals.count(name)) oldTaint = fr.locals[name].taint;
            fr.locals[name] = std::move(v);
        }
        for (auto& rec : st.loopRecords) {
            if (!rec.preTaint.count(loc)) {
                rec.preTaint[loc] = oldTaint;
                rec.writeOrder.push_back(loc);
            }
        }
    }

    const Value& read_location(PathState& st, const std::string& name, SourcePos pos) {
        if (!st.frames.empty()) {
            auto& locals = st.frames.back().locals;
            auto it = locals.find(name);
            if (it != locals.end()) return it->second;
        }
        auto it = st.fields.find(name);
        if (it != st.fields.end()) return it->second;
        throw ExecError("undefined variable " + name + " at line " +
                        std::to_string(pos.line));
    }

    // ---- expressions ----

    Value eval(PathState& st, const Expr& e) {
        switch (e.kind) {
            case Expr::Kind::StrLit: return Value::concrete_str(e.str);
            case Expr::Kind::IntLit: return Value::concrete_int(e.num);
            case Expr::Kind::BoolLit: return Value::concrete_bool(e.boolean);
            case Expr::Kind::NullLit: return Value::null_str();
            case Expr::Kind::Ident: return read_location(st, e.str, e.pos);
            case Expr::Kind::Index: {
                Value base = eval(st, *e.lhs);
                if (base.type != ValType::StrArray)
                    throw ExecError("indexing a non-array value at line " +
                                    std::to_string(e.pos.line));
                Value idx = eval(st, *e.rhs);
                if (idx.type != ValType::Int)
                    throw ExecError("array index must be an int at line " +
                                    std::to_string(e.pos.line));
                if (!idx.symbolic) {
                    // Out-of-bounds reads model the runtime returning an empty string.
                    if (idx.i < 0 || (size_t)idx.i >= base.arr.size())
                        return Value::concrete_str("", idx.taint);
                    Value v = base.arr[(size_t)idx.i];
                    v.taint = propagate_taint({v.taint, idx.taint});
                    return v;
                }
                TaintSet t = idx.taint;
                for (const auto& el : base.arr) t.insert(el.taint.begin(), el.taint.end());
                return Value::symbolic_str(
                    fresh_sym("elem", SymOrigin::IncomingInfo, ValType::Str), t);
            }
            case Expr::Kind::Binop: {
                Value l = eval(st, *e.lhs);
                Value r = eval(st, *e.rhs);
                if (e.str == "+" && (l.type == ValType::Str || r.type == ValType::Str))
                    return concat_values(l, r);
                if (l.type != ValType::Int || r.type != ValType::Int)
                    throw ExecError("arithmetic needs int operands at line " +
                                    std::to_string(e.pos.line));
                TaintSet t = propagate_taint({l.taint, r.taint});
                if (!l.symbolic && !r.symbolic) {
                    long long v = e.str == "+"   ? l.i + r.i
                                  : e.str == "-" ? l.i - r.i
                                                 : l.i * r.i;
                    return Value::concrete_int(v, t);
                }
                // Arithmetic over a symbolic operand yields a fresh unconstrained
                // symbol; the constraint theory tracks symbols, not terms.
                return Value::symbolic_int(
                    fresh_sym("arith", SymOrigin::LoopSummary, ValType::Int), t);
            }
        }
        throw ExecError("unhandled expression kind");
    }

    CondOutcome eval_cond_atom(PathState& st, const CondAtom& a) {
        CondOutcome out;
        if (a.kind == CondAtom::Kind::BoolExpr) {
            Value v = eval(st, *a.lhs);
            if (v.type != ValType::Bool)
                throw ExecError("condition is not boolean at line " +
                                std::to_string(a.pos.line));
            if (!v.symbolic) {
                out.concrete = true;
                out.value = v.b;
            } else {
                out.atom = {Atom::Kind::BoolIs, v.sym};
                out.atom.boolVal = true;
            }
            return out;
        }

        Value l = eval(st, *a.lhs);
        Value r = eval(st, *a.rhs);

        if (l.is_concrete() && r.is_concrete()) {
            out.concrete = true;
            out.value = concrete_compare(l, r, a.op, a.pos);
            return out;
        }

        if (l.type == ValType::Int && r.type == ValType::Int) {
            if (l.symbolic && !r.symbolic) {
                out.atom = {Atom::Kind::IntCmp, l.sym, a.op, r.i};
            } else if (!l.symbolic && r.symbolic) {
                out.atom = {Atom::Kind::IntCmp, r.sym, mirror_op(a.op), l.i};
            } else {
                out.atom = {Atom::Kind::IntCmp, l.sym, a.op};
                out.atom.rhsIsSym = true;
                out.atom.rhsSym = r.sym;
            }
            return out;
        }

        if (l.type == ValType::Bool && r.type == ValType::Bool &&
            (a.op == "==" || a.op == "!=")) {
            if (l.symbolic && !r.symbolic) {
                out.atom = {Atom::Kind::BoolIs, l.sym};
                out.atom.boolVal = (a.op == "==") == r.b;
                return out;
            }
            if (!l.symbolic && r.symbolic) {
                out.atom = {Atom::Kind::BoolIs, r.sym};
                out.atom.boolVal = (a.op == "==") == l.b;
                return out;
            }
        }

        if (l.type == ValType::Str && r.type == ValType::Str &&
            (a.op == "==" || a.op == "!=")) {
            const Value* symSide = nullptr;
            const Value* other = nullptr;
            if (l.symbolic && l.segs.size() == 1) {
                symSide = &l;
                other = &r;
            } else if (r.symbolic && r.segs.size() == 1) {
                symSide = &r;
                other = &l;
            }
            if (symSide && other->is_concrete()) {
                if (other->isNull) {
                    out.atom = {a.op == "==" ? Atom::Kind::IsNull : Atom::Kind::NotNull,
                                symSide->sym};
                } else {
                    out.atom = {a.op == "==" ? Atom::Kind::StrEq : Atom::Kind::StrNeq,
                                symSide->sym};
                    out.atom.strConst = other->str_text();
                }
                return out;
            }
            // Comparison of two symbolic strings (or a partially symbolic one):
            // unknown either way, pinned by a fresh boolean symbol.
            uint64_t b = fresh_sym("strcmp", SymOrigin::IncomingInfo, ValType::Bool);
            out.atom = {Atom::Kind::BoolIs, b};
            out.atom.boolVal = true;
            return out;
        }

        throw ExecError("unsupported comparison at line " + std::to_string(a.pos.line));
    }

    bool concrete_compare(const Value& l, const Value& r, const std::string& op,
                          SourcePos pos) {
        if (l.type == ValType::Int && r.type == ValType::Int) {
            if (op == "==") return l.i == r.i;
            if (op == "!=") return l.i != r.i;
            if (op == "<") return l.i < r.i;
            if (op == ">") return l.i > r.i;
            if (op == "<=") return l.i <= r.i;
            if (op == ">=") return l.i >= r.i;
        }
        if (l.type == ValType::Str && r.type == ValType::Str &&
            (op == "==" || op == "!=")) {
            bool eq;
            if (l.isNull || r.isNull) eq = l.isNull && r.isNull;
            else eq = l.str_text() == r.str_text();
            return op == "==" ? eq : !eq;
        }
        if (l.type == ValType::Bool && r.type == ValType::Bool &&
            (op == "==" || op == "!=")) {
            return (op == "==") == (l.b == r.b);
        }
        throw ExecError("type mismatch in comparison at line " +
                        std::to_string(pos.line));
    }

    // ---- sinks / symbols ----

    void emit_sink(PathState& st, const std::string& api, const std::vector<Value>& args) {
        SinkEvent ev;
        ev.component = comp_.name;
        ev.trace = trace_;
        ev.sinkApi = api;
        ev.args = args;
        for (const auto& a : args)
            ev.carriedTaint.insert(a.taint.begin(), a.taint.end());
        ev.pcAtSink = st.pc;
        ev.pcText = st.pc.to_string(symNames_);
        for (size_t i = 0; i < args.size(); ++i) {
            if (i) {
                ev.url += "&";
                ev.urlTemplate += "&";
            }
            ev.url += args[i].render();
            ev.urlTemplate += args[i].render_template();
        }
        for (const auto& a : args) {
            if (a.type == ValType::Str)
                for (const auto& seg : a.segs)
                    if (seg.decrypted) ev.hostnameDecrypted = true;
        }
        ev.sensitive = cfg_.mode == AnalysisMode::SinkReach ? st.sourceInvoked
                                                            : !ev.carriedTaint.empty();
        result_.sinks.push_back(std::move(ev));
    }

    uint64_t fresh_sym(const std::string& hint, SymOrigin origin, ValType type) {
        uint64_t id = nextSym_++;
        symNames_[id] = hint + std::to_string(id);
        symOrigins_[id] = origin;
        (void)type;
        return id;
    }

    Value init_value(const FieldDecl& f) {
        if (f.init) {
            switch (f.init->kind) {
                case Expr::Kind::StrLit: return Value::concrete_str(f.init->str);
                case Expr::Kind::IntLit: return Value::concrete_int(f.init->num);
                case Expr::Kind::BoolLit: return Value::concrete_bool(f.init->boolean);
                case Expr::Kind::NullLit: return Value::null_str();
                default: break;
            }
        }
        switch (f.type) {
            case ValType::Str: return Value::concrete_str("");
            case ValType::Int: return Value::concrete_int(0);
            case ValType::Bool: return Value::concrete_bool(false);
            case ValType::StrArray: {
                Value v;
                v.type = ValType::StrArray;
                return v;
            }
        }
        return Value::concrete_str("");
    }

    const Component& comp_;
    const ExecutionTrace& trace_;
    const ApiCatalog& catalog_;
    const Config& cfg_;
    TraceResult result_;
    uint64_t nextSym_ = 0;
    std::map<uint64_t, std::string> symNames_;
    std::map<uint64_t, SymOrigin> symOrigins_;
};

}  // namespace

std::vector<ExecutionTrace> generate_basic_traces(const CallGraph& graph,
                                                  const std::vector<EntryPointResult>& entries,
                                                  const Config& cfg) {
    std::vector<ExecutionTrace> out;
    std::set<std::string> seen;
    for (const auto& er : entries) {
        for (const auto& entry : er.entryPoints) {
            // DFS over lifecycle/registration edges for a path onCreate -> entry.
            std::vector<std::string> path;
            std::function<bool(const std::string&)> dfs = [&](const std::string& node) {
                path.push_back(node);
                if (node == entry) return true;
                for (const auto& e : graph.edges) {
                    if (e.from != node || e.kind == EdgeKind::Call) continue;
                    if (std::find(path.begin(), path.end(), e.to) != path.end()) continue;
                    if (dfs(e.to)) return true;
                }
                path.pop_back();
                return false;
            };
            if (!dfs("onCreate"))
                throw std::runtime_error("entry " + entry + " unreachable from onCreate in " +
                                         graph.component);
            ExecutionTrace t;
            t.component = graph.component;
            t.callbacks = path;
            if ((int)t.callbacks.size() > cfg.maxTraceLen) continue;
            if (seen.insert(t.key()).second) out.push_back(std::move(t));
        }
    }
    return out;
}

TraceResult execute_trace(const Program& program, const ExecutionTrace& trace,
                          const ApiCatalog& catalog, const Config& cfg) {
    const Component* comp = program.find_component(trace.component);
    if (!comp) throw std::runtime_error("unknown component " + trace.component);
    if (trace.callbacks.empty() || trace.callbacks[0] != "onCreate")
        throw std::runtime_error("trace must begin with onCreate");
    return TraceExecutor(program, *comp, trace, catalog, cfg).run();
}

namespace {

void collect_reads(const Component& c, const Expr& e, std::set<std::string>& out) {
    switch (e.kind) {
        case Expr::Kind::Ident:
            if (c.find_field(e.str)) out.insert(e.str);
            break;
        case Expr::Kind::Index:
        case Expr::Kind::Binop:
            if (e.lhs) collect_reads(c, *e.lhs, out);
            if (e.rhs) collect_reads(c, *e.rhs, out);
            break;
        default:
            break;
    }
}

void collect_reads_block(const Component& c, const Block& b, std::set<std::string>& reads,
                         std::set<std::string>& visitedMethods) {
    for (const auto& s : b) {
        if (s.expr) collect_reads(c, *s.expr, reads);
        for (const auto& a : s.args) collect_reads(c, *a, reads);
        for (const auto& atom : s.cond.conjuncts) {
            if (atom.lhs) collect_reads(c, *atom.lhs, reads);
            if (atom.rhs) collect_reads(c, *atom.rhs, reads);
        }
        if (s.kind == Stmt::Kind::LocalCall ||
            (s.kind == Stmt::Kind::ApiCall && c.methods.count(s.callee))) {
            if (visitedMethods.insert(s.callee).second) {
                auto it = c.methods.find(s.callee);
                if (it != c.methods.end())
                    collect_reads_block(c, it->second.stmts, reads, visitedMethods);
            }
        }
        if (s.thenBlock) collect_reads_block(c, *s.thenBlock, reads, visitedMethods);
        if (s.elseBlock) collect_reads_block(c, *s.elseBlock, reads, visitedMethods);
    }
}

// Pre-order positions of field reads and writes; calls into local methods are
// expanded inline so their accesses land after the call site.
void collect_positions(const Component& c, const Block& b, int& pos,
                       std::map<std::string, int>& firstRead,
                       std::map<std::string, int>& firstWrite,
                       std::set<std::string>& visitedMethods) {
    auto note_read = [&](const Expr& e) {
        std::set<std::string> reads;
        collect_reads(c, e, reads);
        for (const auto& f : reads)
            if (!firstRead.count(f)) firstRead[f] = pos;
    };
    auto note_write = [&](const std::string& name) {
        if (c.find_field(name) && !firstWrite.count(name)) firstWrite[name] = pos;
    };
    for (const auto& s : b) {
        if (s.expr) note_read(*s.expr);
        for (const auto& a : s.args) note_read(*a);
        for (const auto& atom : s.cond.conjuncts) {
            if (atom.lhs) note_read(*atom.lhs);
            if (atom.rhs) note_read(*atom.rhs);
        }
        if ((s.kind == Stmt::Kind::Assign || s.kind == Stmt::Kind::ApiCall) &&
            !s.target.empty())
            note_write(s.target);
        ++pos;
        if (s.kind == Stmt::Kind::LocalCall ||
            (s.kind == Stmt::Kind::ApiCall && c.methods.count(s.callee))) {
            if (visitedMethods.insert(s.callee).second) {
                auto it = c.methods.find(s.callee);
                if (it != c.methods.end())
                    collect_positions(c, it->second.stmts, pos, firstRead, firstWrite,
                                      visitedMethods);
            }
        }
        if (s.thenBlock)
            collect_positions(c, *s.thenBlock, pos, firstRead, firstWrite, visitedMethods);
        if (s.elseBlock)
            collect_positions(c, *s.elseBlock, pos, firstRead, firstWrite, visitedMethods);
    }
}

}  // namespace

std::set<std::string> fields_read_by(const Component& c, const std::string& callback) {
    const MethodBody* b = c.find_body(callback);
    if (!b) return {};
    std::set<std::string> reads, visited;
    collect_reads_block(c, b->stmts, reads, visited);
    return reads;
}

std::set<std::string> fields_read_before_write(const Component& c,
                                               const std::string& callback) {
    const MethodBody* b = c.find_body(callback);
    if (!b) return {};
    int pos = 0;
    std::map<std::string, int> firstRead, firstWrite;
    std::set<std::string> visited;
    collect_positions(c, b->stmts, pos, firstRead, firstWrite, visited);
    std::set<std::string> out;
    for (const auto& [f, rp] : firstRead) {
        auto it = firstWrite.find(f);
        if (it == firstWrite.end() || rp < it->second) out.insert(f);
    }
    return out;
}

std::vector<ExecutionTrace> expand_traces(const ExecutionTrace& executed,
                                          const std::set<std::string>& newlyTainted,
                                          const Component& component, const Config& cfg) {
    std::vector<ExecutionTrace> out;
    if (newlyTainted.empty()) return out;
    if ((int)executed.callbacks.size() + 1 > cfg.maxTraceLen) return out;

    std::vector<std::string> candidates;
    for (const auto& n : component.callbackOrder)
        if (n != "onCreate") candidates.push_back(n);
    for (const auto& n : component.listenerOrder) candidates.push_back(n);

    std::set<std::string> seen;
    for (const auto& cand : candidates) {
        std::set<std::string> reads = fields_read_before_write(component, cand);
        bool readsTainted = false;
        for (const auto& f : newlyTainted)
            if (reads.count(f)) readsTainted = true;
        if (!readsTainted) continue;
        ExecutionTrace t;
        t.component = executed.component;
        t.callbacks = executed.callbacks;
        t.callbacks.push_back(cand);
        t.provenance = ExecutionTrace::Provenance::Expanded;
        t.parentKey = executed.key();
        t.addedCallback = cand;
        if (seen.insert(t.key()).second) out.push_back(std::move(t));
    }
    return out;
}

AnalysisResult analyze_app(const Program& program, const ApiCatalog& catalog,
                           const Config& cfg) {
    AnalysisResult result;
    std::vector<SourceSite> allSources = locate_sources(program, catalog);

    for (const auto& comp : program.components) {
        CallGraph graph;
        try {
            graph = build_call_graph(comp, catalog);
        } catch (const std::exception& e) {
            result.errors.push_back(e.what());
            continue;
        }
        std::vector<EntryPointResult> entries;
        for (const auto& src : allSources)
            if (src.component == comp.name)
                entries.push_back(entry_points_for_source(graph, src));
        if (entries.empty()) continue;

        std::deque<ExecutionTrace> queue;
        std::set<std::string> seen;
        std::map<std::string, std::set<std::string>> taintedByTrace;
        try {
            for (auto& t : generate_basic_traces(graph, entries, cfg)) {
                if (seen.insert(t.key()).second) queue.push_back(std::move(t));
            }
        } catch (const std::exception& e) {
            result.errors.push_back(e.what());
            continue;
        }

        while (!queue.empty()) {
            if (result.tracesExecuted >= cfg.maxTraces) {
                result.stats.traceBudgetExceeded = true;
                break;
            }
            ExecutionTrace t = std::move(queue.front());
            queue.pop_front();
            ++result.tracesExecuted;

            TraceResult r;
            try {
                r = execute_trace(program, t, catalog, cfg);
            } catch (const std::exception& e) {
                result.errors.push_back(t.key() + ": " + e.what());
                continue;
            }
            result.stats.merge(r.stats);
            for (auto& e : r.errors) result.errors.push_back(t.key() + ": " + e);
            for (auto& s : r.sinks) result.sinks.push_back(std::move(s));

            std::set<std::string> parentTainted;
            if (!t.parentKey.empty()) parentTainted = taintedByTrace[t.parentKey];
            std::set<std::string> newly;
            for (const auto& f : r.taintedFields)
                if (!parentTainted.count(f)) newly.insert(f);
            taintedByTrace[t.key()] = r.taintedFields;

            for (auto& nt : expand_traces(t, newly, comp, cfg))
                if (seen.insert(nt.key()).second) queue.push_back(std::move(nt));
        }
    }
    return result;
}

}  // namespace leaksem
