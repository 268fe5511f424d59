#include "concrete_interp.hpp"

#include <algorithm>
#include <stdexcept>

namespace leaksem::oracle {

OValue OValue::str(std::string s, std::set<std::string> t, bool env) {
    OValue v;
    v.type = ValType::Str;
    v.segs.push_back({env, std::move(s), t});
    v.taint = std::move(t);
    return v;
}

OValue OValue::null_str() {
    OValue v;
    v.type = ValType::Str;
    v.isNull = true;
    return v;
}

OValue OValue::integer(long long n, bool env) {
    OValue v;
    v.type = ValType::Int;
    v.i = n;
    v.fromEnv = env;
    return v;
}

OValue OValue::boolean(bool b, bool env) {
    OValue v;
    v.type = ValType::Bool;
    v.b = b;
    v.fromEnv = env;
    return v;
}

std::string OValue::text() const {
    if (type == ValType::Int) return std::to_string(i);
    if (type == ValType::Bool) return b ? "true" : "false";
    if (type != ValType::Str || isNull)
        throw std::runtime_error("text() on null or array value");
    std::string out;
    for (const auto& s : segs) out += s.text;
    return out;
}

std::string OValue::templ() const {
    switch (type) {
        case ValType::Str: {
            if (isNull) return "null";
            std::string out;
            for (const auto& s : segs) {
                if (s.fromEnv) {
                    out += "(.*)";
                } else if (!s.taint.empty()) {
                    std::string ph;
                    for (const auto& t : s.taint) ph += (ph.empty() ? "" : "+") + t;
                    out += "<" + ph + ">";
                } else {
                    out += s.text;
                }
            }
            return out;
        }
        case ValType::Int:
            if (fromEnv) return "(.*)";
            return taint.empty() ? std::to_string(i) : "<" + *taint.begin() + ">";
        case ValType::Bool:
            return fromEnv ? "(.*)" : (b ? "true" : "false");
        case ValType::StrArray: {
            std::string out = "[";
            for (size_t k = 0; k < arr.size(); ++k) out += (k ? "," : "") + arr[k].templ();
            return out + "]";
        }
    }
    return "?";
}

namespace {

std::string sample_payload(const std::string& dataType) {
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

struct Frame {
    std::map<std::string, OValue> locals;
};

struct StopPath {};  // sink-reach termination

class Interp {
  public:
    Interp(const Program& prog, const Component& comp, const ApiCatalog& catalog,
           const Config& cfg, const EnvAssign& assign, RunOutcome& out)
        : prog_(prog), comp_(comp), catalog_(catalog), cfg_(cfg), assign_(assign),
          out_(out) {}

    void run(const std::vector<std::string>& callbacks) {
        for (const auto& f : comp_.fields) fields_[f.name] = init_field(f);
        try {
            for (const auto& cb : callbacks) {
                const MethodBody* b = comp_.find_body(cb);
                if (!b) throw std::runtime_error("no callback " + cb);
                run_body(b->stmts);
            }
        } catch (const StopPath&) {
        }
        for (const auto& [n, v] : fields_)
            if (!v.taint.empty()) out_.taintedFields.insert(n);
    }

  private:
    OValue init_field(const FieldDecl& f) {
        if (f.init) {
            switch (f.init->kind) {
                case Expr::Kind::StrLit: return OValue::str(f.init->str);
                case Expr::Kind::IntLit: return OValue::integer(f.init->num);
                case Expr::Kind::BoolLit: return OValue::boolean(f.init->boolean);
                case Expr::Kind::NullLit: return OValue::null_str();
                default: break;
            }
        }
        switch (f.type) {
            case ValType::Int: return OValue::integer(0);
            case ValType::Bool: return OValue::boolean(false);
            case ValType::StrArray: {
                OValue v;
                v.type = ValType::StrArray;
                return v;
            }
            default: return OValue::str("");
        }
    }

    // true = keep executing the enclosing body, false = return hit
    bool run_body(const Block& b) {
        for (const auto& s : b)
            if (!run_stmt(s)) return false;
        return true;
    }

    bool run_stmt(const Stmt& s) {
        switch (s.kind) {
            case Stmt::Kind::Assign:
                write(s.target, eval(*s.expr));
                return true;
            case Stmt::Kind::Return:
                return false;
            case Stmt::Kind::LocalCall:
                call_method(s.callee);
                return true;
            case Stmt::Kind::ApiCall:
                return api_call(s);
            case Stmt::Kind::If: {
                if (eval_cond(s.cond)) return run_body(*s.thenBlock);
                if (s.elseBlock) return run_body(*s.elseBlock);
                return true;
            }
            case Stmt::Kind::While: {
                long long iters = 0;
                while (eval_cond(s.cond)) {
                    if (++iters > 100000) throw std::runtime_error("loop cap exceeded");
                    if (!run_body(*s.thenBlock)) return false;
                }
                return true;
            }
        }
        return true;
    }

    void call_method(const std::string& name) {
        auto it = comp_.methods.find(name);
        if (it == comp_.methods.end()) throw std::runtime_error("no method " + name);
        frames_.push_back({});
        run_body(it->second.stmts);
        frames_.pop_back();
    }

    bool api_call(const Stmt& s) {
        const ApiSpec* spec = catalog_.find(s.callee);
        if (!spec) {
            call_method(s.callee);
            return true;
        }
        std::vector<OValue> args;
        for (const auto& a : s.args) args.push_back(eval(*a));
        switch (spec->kind) {
            case ApiSpec::Kind::Source: {
                sourceInvoked_ = true;
                if (!s.target.empty())
                    write(s.target, OValue::str(sample_payload(spec->dataType),
                                                {spec->dataType}));
                return true;
            }
            case ApiSpec::Kind::Sink: {
                OSink sink;
                sink.api = s.callee;
                std::set<std::string> taint;
                for (size_t k = 0; k < args.size(); ++k) {
                    if (k) sink.urlTemplate += "&";
                    sink.urlTemplate += args[k].templ();
                    taint.insert(args[k].taint.begin(), args[k].taint.end());
                }
                sink.taint.assign(taint.begin(), taint.end());
                sink.sensitive = cfg_.mode == AnalysisMode::SinkReach ? sourceInvoked_
                                                                      : !taint.empty();
                out_.sinks.push_back(std::move(sink));
                if (!s.target.empty()) write(s.target, OValue::str(""));
                if (cfg_.mode == AnalysisMode::SinkReach) throw StopPath{};
                return true;
            }
            case ApiSpec::Kind::Env: {
                OValue v = env_value(*spec, args);
                if (!s.target.empty()) write(s.target, std::move(v));
                return true;
            }
        }
        return true;
    }

    OValue env_value(const ApiSpec& spec, const std::vector<OValue>& args) {
        switch (spec.env) {
            case ApiSpec::EnvBehavior::ForcedTrue:
                return OValue::boolean(true);
            case ApiSpec::EnvBehavior::FixedValue:
                return spec.fixedIsInt ? OValue::integer(spec.fixedInt)
                                       : OValue::str(spec.fixedStr);
            case ApiSpec::EnvBehavior::DecryptTable: {
                const OValue& a = args.at(0);
                if (a.type == ValType::Str && !a.isNull) {
                    bool concrete = true;
                    for (const auto& seg : a.segs) concrete = concrete && !seg.fromEnv;
                    if (concrete) {
                        auto it = spec.decryptTable.find(a.text());
                        if (it != spec.decryptTable.end())
                            return OValue::str(it->second, a.taint);
                    }
                }
                OValue v = slot_value(spec.name, ValType::Str);
                v.taint = a.taint;
                for (auto& seg : v.segs) seg.taint = a.taint;
                return v;
            }
            case ApiSpec::EnvBehavior::Symbolic:
                return slot_value(spec.name, spec.envType);
            case ApiSpec::EnvBehavior::SymbolicArray: {
                int n = cfg_.symbolicArrayLen >= 1 ? cfg_.symbolicArrayLen
                                                   : spec.elementCount;
                OValue v;
                v.type = ValType::StrArray;
                for (int k = 0; k < n; ++k)
                    v.arr.push_back(
                        slot_value(spec.name + "#" + std::to_string(k), ValType::Str));
                return v;
            }
        }
        throw std::runtime_error("unhandled env behavior");
    }

    OValue slot_value(const std::string& api, ValType type) {
        SlotId id{api, occurrence_[api]++};
        auto it = assign_.find(id);
        if (it != assign_.end()) return it->second;
        out_.missingSlots.insert({id, type});
        switch (type) {
            case ValType::Int: return OValue::integer(0, true);
            case ValType::Bool: return OValue::boolean(false, true);
            default: return OValue::str("", {}, true);
        }
    }

    bool eval_cond(const CondExpr& c) {
        for (const auto& atom : c.conjuncts)
            if (!eval_atom(atom)) return false;
        return true;
    }

    bool eval_atom(const CondAtom& a) {
        if (a.kind == CondAtom::Kind::BoolExpr) {
            OValue v = eval(*a.lhs);
            if (v.type != ValType::Bool) throw std::runtime_error("non-bool condition");
            return v.b;
        }
        OValue l = eval(*a.lhs);
        OValue r = eval(*a.rhs);
        if (l.type == ValType::Int && r.type == ValType::Int) {
            if (a.op == "==") return l.i == r.i;
            if (a.op == "!=") return l.i != r.i;
            if (a.op == "<") return l.i < r.i;
            if (a.op == ">") return l.i > r.i;
            if (a.op == "<=") return l.i <= r.i;
            if (a.op == ">=") return l.i >= r.i;
        }
        if (l.type == ValType::Str && r.type == ValType::Str) {
            bool eq = (l.isNull || r.isNull) ? (l.isNull && r.isNull)
                                             : (l.text() == r.text());
            if (a.op == "==") return eq;
            if (a.op == "!=") return !eq;
        }
        if (l.type == ValType::Bool && r.type == ValType::Bool) {
            if (a.op == "==") return l.b == r.b;
            if (a.op == "!=") return l.b != r.b;
        }
        throw std::runtime_error("bad comparison");
    }

    OValue eval(const Expr& e) {
        switch (e.kind) {
            case Expr::Kind::StrLit: return OValue::str(e.str);
            case Expr::Kind::IntLit: return OValue::integer(e.num);
            case Expr::Kind::BoolLit: return OValue::boolean(e.boolean);
            case Expr::Kind::NullLit: return OValue::null_str();
            case Expr::Kind::Ident: return read(e.str);
            case Expr::Kind::Index: {
                OValue base = eval(*e.lhs);
                OValue idx = eval(*e.rhs);
                if (base.type != ValType::StrArray || idx.type != ValType::Int)
                    throw std::runtime_error("bad index expression");
                if (idx.i < 0 || (size_t)idx.i >= base.arr.size())
                    return OValue::str("", idx.taint);
                OValue v = base.arr[(size_t)idx.i];
                v.taint.insert(idx.taint.begin(), idx.taint.end());
                return v;
            }
            case Expr::Kind::Binop: {
                OValue l = eval(*e.lhs);
                OValue r = eval(*e.rhs);
                if (e.str == "+" && (l.type == ValType::Str || r.type == ValType::Str))
                    return concat(l, r);
                if (l.type != ValType::Int || r.type != ValType::Int)
                    throw std::runtime_error("arithmetic needs ints");
                long long v = e.str == "+"   ? l.i + r.i
                              : e.str == "-" ? l.i - r.i
                                             : l.i * r.i;
                OValue out = OValue::integer(v, l.fromEnv || r.fromEnv);
                out.taint.insert(l.taint.begin(), l.taint.end());
                out.taint.insert(r.taint.begin(), r.taint.end());
                return out;
            }
        }
        throw std::runtime_error("unhandled expression");
    }

    static OValue to_str(const OValue& v) {
        if (v.type == ValType::Str) return v;
        if (v.type == ValType::StrArray) throw std::runtime_error("array in concat");
        OValue out;
        out.type = ValType::Str;
        out.segs.push_back({v.fromEnv, v.text(), v.taint});
        out.taint = v.taint;
        return out;
    }

    static OValue concat(const OValue& a, const OValue& b) {
        OValue x = to_str(a), y = to_str(b);
        OValue out;
        out.type = ValType::Str;
        if (x.isNull) out.segs.push_back({false, "null", x.taint});
        else out.segs = x.segs;
        if (y.isNull) out.segs.push_back({false, "null", y.taint});
        else out.segs.insert(out.segs.end(), y.segs.begin(), y.segs.end());
        out.taint.insert(x.taint.begin(), x.taint.end());
        out.taint.insert(y.taint.begin(), y.taint.end());
        return out;
    }

    OValue read(const std::string& name) {
        if (!frames_.empty()) {
            auto it = frames_.back().locals.find(name);
            if (it != frames_.back().locals.end()) return it->second;
        }
        auto it = fields_.find(name);
        if (it != fields_.end()) return it->second;
        throw std::runtime_error("undefined variable " + name);
    }

    void write(const std::string& name, OValue v) {
        if (fields_.count(name)) fields_[name] = std::move(v);
        else {
            if (frames_.empty()) frames_.push_back({});
            frames_.back().locals[name] = std::move(v);
        }
    }

    const Program& prog_;
    const Component& comp_;
    const ApiCatalog& catalog_;
    const Config& cfg_;
    const EnvAssign& assign_;
    RunOutcome& out_;
    std::map<std::string, OValue> fields_;
    std::vector<Frame> frames_;
    std::map<std::string, int> occurrence_;
    bool sourceInvoked_ = false;
};

void collect_literals(const Expr& e, Domains& d) {
    if (e.kind == Expr::Kind::IntLit) d.ints.push_back(e.num);
    if (e.kind == Expr::Kind::StrLit) d.strs.push_back(OValue::str(e.str, {}, true));
    if (e.lhs) collect_literals(*e.lhs, d);
    if (e.rhs) collect_literals(*e.rhs, d);
}

void collect_literals(const Block& b, Domains& d) {
    for (const auto& s : b) {
        if (s.expr) collect_literals(*s.expr, d);
        for (const auto& a : s.args) collect_literals(*a, d);
        for (const auto& c : s.cond.conjuncts) {
            if (c.lhs) collect_literals(*c.lhs, d);
            if (c.rhs) collect_literals(*c.rhs, d);
        }
        if (s.thenBlock) collect_literals(*s.thenBlock, d);
        if (s.elseBlock) collect_literals(*s.elseBlock, d);
    }
}

}  // namespace

RunOutcome run_trace(const Program& prog, const std::string& component,
                     const std::vector<std::string>& callbacks, const ApiCatalog& catalog,
                     const Config& cfg, const EnvAssign& assign) {
    const Component* comp = prog.find_component(component);
    if (!comp) throw std::runtime_error("no component " + component);
    RunOutcome out;
    Interp interp(prog, *comp, catalog, cfg, assign, out);
    interp.run(callbacks);
    return out;
}

Domains mine_domains(const Component& c) {
    Domains d;
    for (const auto& [n, b] : c.callbacks) collect_literals(b.stmts, d);
    for (const auto& [n, b] : c.listeners) collect_literals(b.stmts, d);
    for (const auto& [n, b] : c.methods) collect_literals(b.stmts, d);
    for (const auto& f : c.fields)
        if (f.init) collect_literals(*f.init, d);

    std::vector<long long> ints;
    for (long long v : d.ints) {
        ints.push_back(v - 1);
        ints.push_back(v);
        ints.push_back(v + 1);
    }
    ints.push_back(0);
    ints.push_back(1);
    std::sort(ints.begin(), ints.end());
    ints.erase(std::unique(ints.begin(), ints.end()), ints.end());
    d.ints = std::move(ints);

    d.strs.push_back(OValue::str("", {}, true));
    d.strs.push_back(OValue::str("zz-unmentioned", {}, true));
    d.strs.push_back(OValue::null_str());
    std::sort(d.strs.begin(), d.strs.end(), [](const OValue& a, const OValue& b) {
        if (a.isNull != b.isNull) return a.isNull < b.isNull;
        return (a.isNull ? std::string() : a.text()) < (b.isNull ? std::string() : b.text());
    });
    d.strs.erase(std::unique(d.strs.begin(), d.strs.end(),
                             [](const OValue& a, const OValue& b) {
                                 if (a.isNull || b.isNull) return a.isNull == b.isNull;
                                 return a.text() == b.text();
                             }),
                 d.strs.end());
    return d;
}

std::set<OSink> enumerate_sinks(const Program& prog, const std::string& component,
                                const std::vector<std::string>& callbacks,
                                const ApiCatalog& catalog, const Config& cfg,
                                size_t maxSlots, size_t maxRuns) {
    const Component* comp = prog.find_component(component);
    if (!comp) throw std::runtime_error("no component " + component);
    Domains dom = mine_domains(*comp);

    std::vector<EnvSlot> slots;
    std::set<OSink> sinks;
    size_t runs = 0;

    for (;;) {
        std::set<EnvSlot> discovered;
        std::vector<size_t> pick(slots.size(), 0);
        auto domain_size = [&](const EnvSlot& s) {
            return s.type == ValType::Int    ? dom.ints.size()
                   : s.type == ValType::Bool ? (size_t)2
                                             : dom.strs.size();
        };
        bool done = false;
        while (!done) {
            if (++runs > maxRuns) throw std::runtime_error("enumeration budget exceeded");
            EnvAssign assign;
            for (size_t k = 0; k < slots.size(); ++k) {
                const EnvSlot& s = slots[k];
                if (s.type == ValType::Int)
                    assign[s.id] = OValue::integer(dom.ints[pick[k]], true);
                else if (s.type == ValType::Bool)
                    assign[s.id] = OValue::boolean(pick[k] == 1, true);
                else
                    assign[s.id] = dom.strs[pick[k]];
            }
            RunOutcome out = run_trace(prog, component, callbacks, catalog, cfg, assign);
            sinks.insert(out.sinks.begin(), out.sinks.end());
            discovered.insert(out.missingSlots.begin(), out.missingSlots.end());

            // odometer over the assignment space
            done = true;
            for (size_t k = 0; k < pick.size(); ++k) {
                if (++pick[k] < domain_size(slots[k])) {
                    done = false;
                    break;
                }
                pick[k] = 0;
            }
        }
        bool grew = false;
        for (const auto& s : discovered) {
            if (std::find_if(slots.begin(), slots.end(), [&](const EnvSlot& e) {
                    return e.id == s.id;
                }) == slots.end()) {
                slots.push_back(s);
                grew = true;
            }
        }
        if (!grew) return sinks;
        if (slots.size() > maxSlots)
            throw std::runtime_error("too many environment slots for enumeration");
    }
}

}  // namespace leaksem::oracle
