#include "leaksem/value.hpp"

#include <stdexcept>

namespace leaksem {

TaintSet propagate_taint(const std::vector<TaintSet>& operands) {
    TaintSet out;
    for (const auto& t : operands) out.insert(t.begin(), t.end());
    return out;
}

Value Value::concrete_str(std::string s, TaintSet t) {
    Value v;
    v.type = ValType::Str;
    StrSeg seg;
    seg.text = std::move(s);
    seg.taint = t;
    v.segs.push_back(std::move(seg));
    v.taint = std::move(t);
    return v;
}

Value Value::null_str() {
    Value v;
    v.type = ValType::Str;
    v.isNull = true;
    return v;
}

Value Value::symbolic_str(uint64_t sym, TaintSet t) {
    Value v;
    v.type = ValType::Str;
    StrSeg seg;
    seg.symbolic = true;
    seg.sym = sym;
    seg.taint = t;
    v.segs.push_back(std::move(seg));
    v.symbolic = true;
    v.sym = sym;
    v.taint = std::move(t);
    return v;
}

Value Value::concrete_int(long long n, TaintSet t) {
    Value v;
    v.type = ValType::Int;
    v.i = n;
    v.taint = std::move(t);
    return v;
}

Value Value::symbolic_int(uint64_t sym, TaintSet t) {
    Value v;
    v.type = ValType::Int;
    v.symbolic = true;
    v.sym = sym;
    v.taint = std::move(t);
    return v;
}

Value Value::concrete_bool(bool b, TaintSet t) {
    Value v;
    v.type = ValType::Bool;
    v.b = b;
    v.taint = std::move(t);
    return v;
}

Value Value::symbolic_bool(uint64_t sym, TaintSet t) {
    Value v;
    v.type = ValType::Bool;
    v.symbolic = true;
    v.sym = sym;
    v.taint = std::move(t);
    return v;
}

bool Value::is_concrete() const {
    switch (type) {
        case ValType::Str: {
            if (isNull) return true;
            for (const auto& s : segs)
                if (s.symbolic) return false;
            return true;
        }
        case ValType::StrArray: {
            for (const auto& e : arr)
                if (!e.is_concrete()) return false;
            return true;
        }
        default:
            return !symbolic;
    }
}

std::string Value::str_text() const {
    if (type != ValType::Str || isNull || !is_concrete())
        throw std::runtime_error("str_text() on non-concrete string value");
    std::string out;
    for (const auto& s : segs) out += s.text;
    return out;
}

std::string Value::render() const {
    switch (type) {
        case ValType::Str: {
            if (isNull) return "null";
            std::string out;
            for (const auto& s : segs) out += s.symbolic ? "(.*)" : s.text;
            return out;
        }
        case ValType::Int:
            return symbolic ? "(.*)" : std::to_string(i);
        case ValType::Bool:
            return symbolic ? "(.*)" : (b ? "true" : "false");
        case ValType::StrArray: {
            std::string out = "[";
            for (size_t k = 0; k < arr.size(); ++k)
                out += (k ? "," : "") + arr[k].render();
            return out + "]";
        }
    }
    return "?";
}

std::string Value::render_template() const {
    switch (type) {
        case ValType::Str: {
            if (isNull) return "null";
            std::string out;
            for (const auto& s : segs) {
                if (s.symbolic) {
                    out += "(.*)";
                } else if (!s.taint.empty()) {
                    std::string ph = "<";
                    bool first = true;
                    for (const auto& dt : s.taint) {
                        if (!first) ph += "+";
                        ph += dt;
                        first = false;
                    }
                    out += ph + ">";
                } else {
                    out += s.text;
                }
            }
            return out;
        }
        case ValType::Int:
            if (symbolic) return "(.*)";
            return taint.empty() ? std::to_string(i) : "<" + *taint.begin() + ">";
        default:
            return render();
    }
}

void Value::dump(std::string& out) const {
    out += std::to_string((int)type);
    out += '|';
    switch (type) {
        case ValType::Str:
            if (isNull) {
                out += "null";
                break;
            }
            for (const auto& s : segs) {
                if (s.symbolic) {
                    out += "$";
                    out += std::to_string(s.sym);
                } else {
                    out += '\'';
                    out += s.text;
                    out += '\'';
                }
                for (const auto& t : s.taint) {
                    out += '~';
                    out += t;
                }
                if (s.decrypted) out += '^';
                out += ';';
            }
            break;
        case ValType::Int:
            out += symbolic ? "$" + std::to_string(sym) : std::to_string(i);
            break;
        case ValType::Bool:
            out += symbolic ? "$" + std::to_string(sym) : (b ? "T" : "F");
            break;
        case ValType::StrArray:
            out += '[';
            for (const auto& e : arr) {
                e.dump(out);
                out += ',';
            }
            out += ']';
            break;
    }
    for (const auto& t : taint) {
        out += '~';
        out += t;
    }
    out += '#';
}

namespace {

Value to_str_value(const Value& v) {
    if (v.type == ValType::Str) return v;
    if (v.type == ValType::Int) {
        if (v.symbolic) return Value::symbolic_str(v.sym, v.taint);
        return Value::concrete_str(std::to_string(v.i), v.taint);
    }
    if (v.type == ValType::Bool) {
        if (v.symbolic) return Value::symbolic_str(v.sym, v.taint);
        return Value::concrete_str(v.b ? "true" : "false", v.taint);
    }
    throw std::runtime_error("cannot concatenate an array value");
}

}  // namespace

Value concat_values(const Value& a, const Value& b) {
    Value x = to_str_value(a);
    Value y = to_str_value(b);
    Value out;
    out.type = ValType::Str;
    // null concatenates as the text "null", matching Java's StringBuilder.
    if (x.isNull) out.segs.push_back({false, "null", 0, x.taint});
    else out.segs = x.segs;
    if (y.isNull) out.segs.push_back({false, "null", 0, y.taint});
    else out.segs.insert(out.segs.end(), y.segs.begin(), y.segs.end());
    out.taint = propagate_taint({x.taint, y.taint});
    out.symbolic = false;
    return out;
}

}  // namespace leaksem
