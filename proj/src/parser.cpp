#include "leaksem/parser.hpp"

#include <cctype>
#include <set>
#include <sstream>

namespace leaksem {

std::string to_string(ValType t) {
    switch (t) {
        case ValType::Str: return "string";
        case ValType::Int: return "int";
        case ValType::Bool: return "bool";
        case ValType::StrArray: return "string-array";
    }
    return "?";
}

const MethodBody* Component::find_body(const std::string& n) const {
    if (auto it = callbacks.find(n); it != callbacks.end()) return &it->second;
    if (auto it = listeners.find(n); it != listeners.end()) return &it->second;
    if (auto it = methods.find(n); it != methods.end()) return &it->second;
    return nullptr;
}

const FieldDecl* Component::find_field(const std::string& n) const {
    for (const auto& f : fields)
        if (f.name == n) return &f;
    return nullptr;
}

const Component* Program::find_component(const std::string& n) const {
    for (const auto& c : components)
        if (c.name == n) return &c;
    return nullptr;
}

namespace {

struct Token {
    enum class Kind { Ident, Str, Int, Punct, End };
    Kind kind;
    std::string text;
    long long num = 0;
    SourcePos pos;
};

class Lexer {
  public:
    explicit Lexer(const std::string& src) : src_(src) { advance(); }

    const Token& peek() const { return tok_; }

    Token next() {
        Token t = tok_;
        advance();
        return t;
    }

  private:
    void advance() {
        skip_ws();
        tok_.pos = {line_, col_};
        if (i_ >= src_.size()) {
            tok_ = {Token::Kind::End, "", 0, {line_, col_}};
            return;
        }
        char c = src_[i_];
        if (std::isalpha((unsigned char)c) || c == '_') {
            size_t start = i_;
            while (i_ < src_.size() &&
                   (std::isalnum((unsigned char)src_[i_]) || src_[i_] == '_'))
                bump();
            tok_.kind = Token::Kind::Ident;
            tok_.text = src_.substr(start, i_ - start);
            return;
        }
        if (std::isdigit((unsigned char)c)) {
            size_t start = i_;
            while (i_ < src_.size() && std::isdigit((unsigned char)src_[i_])) bump();
            tok_.kind = Token::Kind::Int;
            tok_.text = src_.substr(start, i_ - start);
            tok_.num = std::stoll(tok_.text);
            return;
        }
        if (c == '"') {
            bump();
            std::string s;
            while (i_ < src_.size() && src_[i_] != '"') {
                if (src_[i_] == '\\' && i_ + 1 < src_.size()) {
                    bump();
                    char e = src_[i_];
                    if (e == 'n') s += '\n';
                    else if (e == 't') s += '\t';
                    else s += e;
                    bump();
                } else {
                    s += src_[i_];
                    bump();
                }
            }
            if (i_ >= src_.size()) throw ParseError("unterminated string literal", tok_.pos);
            bump();  // closing quote
            tok_.kind = Token::Kind::Str;
            tok_.text = s;
            return;
        }
        // multi-char punctuation first
        static const char* two[] = {"==", "!=", "<=", ">=", "&&"};
        for (const char* p : two) {
            if (src_.compare(i_, 2, p) == 0) {
                tok_.kind = Token::Kind::Punct;
                tok_.text = p;
                bump();
                bump();
                return;
            }
        }
        static const std::string singles = "{}();:=+-*<>,[]";
        if (singles.find(c) != std::string::npos) {
            tok_.kind = Token::Kind::Punct;
            tok_.text = std::string(1, c);
            bump();
            return;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", tok_.pos);
    }

    void skip_ws() {
        while (i_ < src_.size()) {
            char c = src_[i_];
            if (c == '#') {
                while (i_ < src_.size() && src_[i_] != '\n') bump();
            } else if (c == '/' && i_ + 1 < src_.size() && src_[i_ + 1] == '/') {
                while (i_ < src_.size() && src_[i_] != '\n') bump();
            } else if (std::isspace((unsigned char)c)) {
                bump();
            } else {
                break;
            }
        }
    }

    void bump() {
        if (src_[i_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++i_;
    }

    const std::string& src_;
    size_t i_ = 0;
    int line_ = 1, col_ = 1;
    Token tok_;
};

class Parser {
  public:
    Parser(const std::string& text, const ApiCatalog& catalog)
        : lex_(text), catalog_(catalog) {}

    Program parse() {
        Program p;
        if (lex_.peek().kind == Token::Kind::End) return p;  // empty app body
        expect_kw("app");
        p.name = expect_ident("app name");
        expect_punct("{");
        while (!at_punct("}")) {
            if (at_kw("component")) {
                p.components.push_back(parse_component());
            } else {
                throw ParseError("expected 'component'", lex_.peek().pos);
            }
        }
        expect_punct("}");
        if (lex_.peek().kind != Token::Kind::End)
            throw ParseError("trailing input after app body", lex_.peek().pos);
        validate(p);
        return p;
    }

  private:
    Component parse_component() {
        expect_kw("component");
        Component c;
        c.pos = lex_.peek().pos;
        std::string kind = expect_ident("component kind");
        if (kind == "Activity") c.kind = ComponentKind::Activity;
        else if (kind == "Service") c.kind = ComponentKind::Service;
        else throw ParseError("component kind must be Activity or Service", c.pos);
        c.name = expect_ident("component name");
        expect_punct("{");
        while (!at_punct("}")) {
            if (at_kw("field")) {
                parse_field(c);
            } else if (at_kw("callback")) {
                parse_body(c, c.callbacks, c.callbackOrder, "callback");
            } else if (at_kw("listener")) {
                parse_body(c, c.listeners, c.listenerOrder, "listener");
            } else if (at_kw("method")) {
                parse_body(c, c.methods, c.methodOrder, "method");
            } else {
                throw ParseError("expected field/callback/listener/method", lex_.peek().pos);
            }
        }
        expect_punct("}");
        return c;
    }

    void parse_field(Component& c) {
        expect_kw("field");
        FieldDecl f;
        f.pos = lex_.peek().pos;
        f.name = expect_ident("field name");
        expect_punct(":");
        std::string ty = expect_ident("field type");
        if (ty == "string") {
            // string-array is spelled "string-array"
            if (at_punct("-")) {
                lex_.next();
                std::string rest = expect_ident("field type");
                if (rest != "array")
                    throw ParseError("unknown field type string-" + rest, f.pos);
                f.type = ValType::StrArray;
            } else {
                f.type = ValType::Str;
            }
        } else if (ty == "int") {
            f.type = ValType::Int;
        } else if (ty == "bool") {
            f.type = ValType::Bool;
        } else {
            throw ParseError("unknown field type " + ty, f.pos);
        }
        if (at_punct("=")) {
            lex_.next();
            f.init = parse_primary();
            if (f.init->kind != Expr::Kind::StrLit && f.init->kind != Expr::Kind::IntLit &&
                f.init->kind != Expr::Kind::BoolLit && f.init->kind != Expr::Kind::NullLit)
                throw ParseError("field initializer must be a literal", f.init->pos);
        }
        expect_punct(";");
        c.fields.push_back(std::move(f));
    }

    void parse_body(Component& c, std::map<std::string, MethodBody>& into,
                    std::vector<std::string>& order, const char* what) {
        lex_.next();  // keyword
        MethodBody b;
        b.pos = lex_.peek().pos;
        b.name = expect_ident(what);
        b.stmts = parse_block();
        if (into.count(b.name))
            throw ParseError(std::string("duplicate ") + what + " " + b.name, b.pos);
        order.push_back(b.name);
        into.emplace(b.name, std::move(b));
    }

    Block parse_block() {
        expect_punct("{");
        Block b;
        while (!at_punct("}")) b.push_back(parse_stmt());
        expect_punct("}");
        return b;
    }

    Stmt parse_stmt() {
        Stmt s;
        s.pos = lex_.peek().pos;
        if (at_kw("if")) {
            lex_.next();
            s.kind = Stmt::Kind::If;
            expect_punct("(");
            s.cond = parse_cond();
            expect_punct(")");
            s.thenBlock = std::make_shared<Block>(parse_block());
            if (at_kw("else")) {
                lex_.next();
                s.elseBlock = std::make_shared<Block>(parse_block());
            }
            return s;
        }
        if (at_kw("while")) {
            lex_.next();
            s.kind = Stmt::Kind::While;
            expect_punct("(");
            s.cond = parse_cond();
            expect_punct(")");
            s.thenBlock = std::make_shared<Block>(parse_block());
            return s;
        }
        if (at_kw("return")) {
            lex_.next();
            s.kind = Stmt::Kind::Return;
            expect_punct(";");
            return s;
        }
        if (at_kw("call")) {
            lex_.next();
            s.kind = Stmt::Kind::LocalCall;
            s.callee = expect_ident("method name");
            expect_punct(";");
            return s;
        }
        // lval = expr ; | lval = api(args) ; | api(args) ;
        std::string name = expect_ident("statement");
        if (at_punct("(")) {
            s.kind = Stmt::Kind::ApiCall;
            s.callee = name;
            s.args = parse_args();
            expect_punct(";");
            return s;
        }
        expect_punct("=");
        if (lex_.peek().kind == Token::Kind::Ident && is_call_ahead()) {
            std::string api = expect_ident("api name");
            s.kind = Stmt::Kind::ApiCall;
            s.target = name;
            s.callee = api;
            s.args = parse_args();
        } else {
            s.kind = Stmt::Kind::Assign;
            s.target = name;
            s.expr = parse_expr();
        }
        expect_punct(";");
        return s;
    }

    // After "x =", an identifier followed by '(' is an api call, otherwise expression.
    bool is_call_ahead() {
        Lexer save = lex_;
        save.next();  // ident
        return save.peek().kind == Token::Kind::Punct && save.peek().text == "(";
    }

    std::vector<ExprPtr> parse_args() {
        expect_punct("(");
        std::vector<ExprPtr> args;
        if (!at_punct(")")) {
            args.push_back(parse_expr());
            while (at_punct(",")) {
                lex_.next();
                args.push_back(parse_expr());
            }
        }
        expect_punct(")");
        return args;
    }

    CondExpr parse_cond() {
        CondExpr c;
        c.conjuncts.push_back(parse_cond_atom());
        while (at_punct("&&")) {
            lex_.next();
            c.conjuncts.push_back(parse_cond_atom());
        }
        return c;
    }

    CondAtom parse_cond_atom() {
        CondAtom a;
        a.pos = lex_.peek().pos;
        a.lhs = parse_expr();
        static const std::set<std::string> cmps = {"==", "!=", "<", ">", "<=", ">="};
        if (lex_.peek().kind == Token::Kind::Punct && cmps.count(lex_.peek().text)) {
            a.kind = CondAtom::Kind::Cmp;
            a.op = lex_.next().text;
            a.rhs = parse_expr();
        } else {
            a.kind = CondAtom::Kind::BoolExpr;
        }
        return a;
    }

    ExprPtr parse_expr() {
        ExprPtr e = parse_term();
        while (at_punct("+") || at_punct("-")) {
            auto op = lex_.next().text;
            auto b = std::make_shared<Expr>();
            b->kind = Expr::Kind::Binop;
            b->pos = e->pos;
            b->str = op;
            b->lhs = e;
            b->rhs = parse_term();
            e = b;
        }
        return e;
    }

    ExprPtr parse_term() {
        ExprPtr e = parse_primary();
        while (at_punct("*")) {
            lex_.next();
            auto b = std::make_shared<Expr>();
            b->kind = Expr::Kind::Binop;
            b->pos = e->pos;
            b->str = "*";
            b->lhs = e;
            b->rhs = parse_primary();
            e = b;
        }
        return e;
    }

    ExprPtr parse_primary() {
        auto e = std::make_shared<Expr>();
        const Token& t = lex_.peek();
        e->pos = t.pos;
        if (t.kind == Token::Kind::Str) {
            e->kind = Expr::Kind::StrLit;
            e->str = lex_.next().text;
            return e;
        }
        if (t.kind == Token::Kind::Int) {
            e->kind = Expr::Kind::IntLit;
            e->num = lex_.next().num;
            return e;
        }
        if (t.kind == Token::Kind::Punct && t.text == "(") {
            lex_.next();
            ExprPtr inner = parse_expr();
            expect_punct(")");
            return inner;
        }
        if (t.kind == Token::Kind::Ident) {
            std::string name = lex_.next().text;
            if (name == "true" || name == "false") {
                e->kind = Expr::Kind::BoolLit;
                e->boolean = (name == "true");
                return e;
            }
            if (name == "null") {
                e->kind = Expr::Kind::NullLit;
                return e;
            }
            if (at_punct("[")) {
                lex_.next();
                auto base = std::make_shared<Expr>();
                base->kind = Expr::Kind::Ident;
                base->pos = e->pos;
                base->str = name;
                e->kind = Expr::Kind::Index;
                e->lhs = base;
                e->rhs = parse_expr();
                expect_punct("]");
                return e;
            }
            e->kind = Expr::Kind::Ident;
            e->str = name;
            return e;
        }
        throw ParseError("expected expression", t.pos);
    }

    // ---- validation ----

    void validate(const Program& p) {
        std::set<std::string> compNames;
        for (const auto& c : p.components) {
            if (!compNames.insert(c.name).second)
                throw ParseError("duplicate component name " + c.name, c.pos);
            std::set<std::string> fieldNames;
            for (const auto& f : c.fields)
                if (!fieldNames.insert(f.name).second)
                    throw ParseError("duplicate field name " + f.name + " in " + c.name,
                                     f.pos);
            if (!c.callbacks.count("onCreate"))
                throw ParseError("component " + c.name + " has no onCreate callback",
                                 c.pos);
            for (const auto& [n, b] : c.listeners)
                if (c.callbacks.count(n))
                    throw ParseError("listener " + n + " clashes with a callback name",
                                     b.pos);
            for (const auto& coll : {&c.callbacks, &c.listeners, &c.methods})
                for (const auto& [n, b] : *coll) validate_block(c, b.stmts);
        }
    }

    void validate_block(const Component& c, const Block& b) {
        for (const auto& s : b) {
            switch (s.kind) {
                case Stmt::Kind::ApiCall:
                    if (!catalog_.find(s.callee) && !c.methods.count(s.callee))
                        throw ParseError("unresolved API " + s.callee, s.pos);
                    break;
                case Stmt::Kind::LocalCall:
                    if (!c.methods.count(s.callee))
                        throw ParseError("call to undeclared method " + s.callee, s.pos);
                    break;
                case Stmt::Kind::If:
                    validate_block(c, *s.thenBlock);
                    if (s.elseBlock) validate_block(c, *s.elseBlock);
                    break;
                case Stmt::Kind::While:
                    validate_block(c, *s.thenBlock);
                    break;
                default:
                    break;
            }
        }
    }

    // ---- token helpers ----

    bool at_punct(const std::string& p) const {
        return lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == p;
    }
    bool at_kw(const std::string& k) const {
        return lex_.peek().kind == Token::Kind::Ident && lex_.peek().text == k;
    }
    void expect_punct(const std::string& p) {
        if (!at_punct(p)) throw ParseError("expected '" + p + "'", lex_.peek().pos);
        lex_.next();
    }
    void expect_kw(const std::string& k) {
        if (!at_kw(k)) throw ParseError("expected '" + k + "'", lex_.peek().pos);
        lex_.next();
    }
    std::string expect_ident(const char* what) {
        if (lex_.peek().kind != Token::Kind::Ident)
            throw ParseError(std::string("expected ") + what, lex_.peek().pos);
        return lex_.next().text;
    }

    Lexer lex_;
    const ApiCatalog& catalog_;
};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') { out += "\\n"; continue; }
        out += c;
    }
    return out;
}

void print_block(std::ostringstream& os, const Block& b, int indent);

void print_stmt(std::ostringstream& os, const Stmt& s, int indent) {
    std::string pad(indent, ' ');
    switch (s.kind) {
        case Stmt::Kind::Assign:
            os << pad << s.target << " = " << pretty_print(*s.expr) << ";\n";
            break;
        case Stmt::Kind::ApiCall: {
            os << pad;
            if (!s.target.empty()) os << s.target << " = ";
            os << s.callee << "(";
            for (size_t i = 0; i < s.args.size(); ++i)
                os << (i ? ", " : "") << pretty_print(*s.args[i]);
            os << ");\n";
            break;
        }
        case Stmt::Kind::LocalCall:
            os << pad << "call " << s.callee << ";\n";
            break;
        case Stmt::Kind::Return:
            os << pad << "return;\n";
            break;
        case Stmt::Kind::If:
            os << pad << "if (" << pretty_print(s.cond) << ") {\n";
            print_block(os, *s.thenBlock, indent + 2);
            os << pad << "}";
            if (s.elseBlock) {
                os << " else {\n";
                print_block(os, *s.elseBlock, indent + 2);
                os << pad << "}";
            }
            os << "\n";
            break;
        case Stmt::Kind::While:
            os << pad << "while (" << pretty_print(s.cond) << ") {\n";
            print_block(os, *s.thenBlock, indent + 2);
            os << pad << "}\n";
            break;
    }
}

void print_block(std::ostringstream& os, const Block& b, int indent) {
    for (const auto& s : b) print_stmt(os, s, indent);
}

}  // namespace

Program parse_program(const std::string& text, const ApiCatalog& catalog) {
    return Parser(text, catalog).parse();
}

std::string pretty_print(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::StrLit: return "\"" + escape(e.str) + "\"";
        case Expr::Kind::IntLit: return std::to_string(e.num);
        case Expr::Kind::BoolLit: return e.boolean ? "true" : "false";
        case Expr::Kind::NullLit: return "null";
        case Expr::Kind::Ident: return e.str;
        case Expr::Kind::Index: return pretty_print(*e.lhs) + "[" + pretty_print(*e.rhs) + "]";
        case Expr::Kind::Binop: {
            auto wrap = [](const Expr& sub) {
                std::string s = pretty_print(sub);
                return sub.kind == Expr::Kind::Binop ? "(" + s + ")" : s;
            };
            return wrap(*e.lhs) + " " + e.str + " " + wrap(*e.rhs);
        }
    }
    return "?";
}

std::string pretty_print(const CondExpr& c) {
    std::string out;
    for (size_t i = 0; i < c.conjuncts.size(); ++i) {
        const auto& a = c.conjuncts[i];
        if (i) out += " && ";
        if (a.kind == CondAtom::Kind::Cmp)
            out += pretty_print(*a.lhs) + " " + a.op + " " + pretty_print(*a.rhs);
        else
            out += pretty_print(*a.lhs);
    }
    return out;
}

std::string pretty_print(const Program& p) {
    std::ostringstream os;
    if (p.name.empty() && p.components.empty()) return "";
    os << "app " << p.name << " {\n";
    for (const auto& c : p.components) {
        os << "  component "
           << (c.kind == ComponentKind::Activity ? "Activity " : "Service ") << c.name
           << " {\n";
        for (const auto& f : c.fields) {
            os << "    field " << f.name << " : " << to_string(f.type);
            if (f.init) os << " = " << pretty_print(*f.init);
            os << ";\n";
        }
        auto emit = [&](const char* kw, const std::vector<std::string>& order,
                        const std::map<std::string, MethodBody>& bodies) {
            for (const auto& n : order) {
                os << "    " << kw << " " << n << " {\n";
                print_block(os, bodies.at(n).stmts, 6);
                os << "    }\n";
            }
        };
        emit("callback", c.callbackOrder, c.callbacks);
        emit("listener", c.listenerOrder, c.listeners);
        emit("method", c.methodOrder, c.methods);
        os << "  }\n";
    }
    os << "}\n";
    return os.str();
}

namespace {

bool eq(const Expr& a, const Expr& b);
bool eq(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return !a && !b;
    return eq(*a, *b);
}
bool eq(const Expr& a, const Expr& b) {
    if (a.kind != b.kind) return false;
    return a.str == b.str && a.num == b.num && a.boolean == b.boolean &&
           eq(a.lhs, b.lhs) && eq(a.rhs, b.rhs);
}
bool eq(const CondExpr& a, const CondExpr& b) {
    if (a.conjuncts.size() != b.conjuncts.size()) return false;
    for (size_t i = 0; i < a.conjuncts.size(); ++i) {
        const auto& x = a.conjuncts[i];
        const auto& y = b.conjuncts[i];
        if (x.kind != y.kind || x.op != y.op || !eq(x.lhs, y.lhs) || !eq(x.rhs, y.rhs))
            return false;
    }
    return true;
}
bool eq(const Block& a, const Block& b);
bool eq(const Stmt& a, const Stmt& b) {
    if (a.kind != b.kind || a.target != b.target || a.callee != b.callee) return false;
    if (!eq(a.expr, b.expr)) return false;
    if (a.args.size() != b.args.size()) return false;
    for (size_t i = 0; i < a.args.size(); ++i)
        if (!eq(a.args[i], b.args[i])) return false;
    if (!eq(a.cond, b.cond)) return false;
    auto blk = [](const std::shared_ptr<Block>& x, const std::shared_ptr<Block>& y) {
        if (!x || !y) return !x && !y;
        return eq(*x, *y);
    };
    return blk(a.thenBlock, b.thenBlock) && blk(a.elseBlock, b.elseBlock);
}
bool eq(const Block& a, const Block& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (!eq(a[i], b[i])) return false;
    return true;
}

}  // namespace

bool structurally_equal(const Program& a, const Program& b) {
    if (a.name != b.name || a.components.size() != b.components.size()) return false;
    for (size_t i = 0; i < a.components.size(); ++i) {
        const auto& x = a.components[i];
        const auto& y = b.components[i];
        if (x.name != y.name || x.kind != y.kind) return false;
        if (x.fields.size() != y.fields.size()) return false;
        for (size_t j = 0; j < x.fields.size(); ++j) {
            if (x.fields[j].name != y.fields[j].name ||
                x.fields[j].type != y.fields[j].type ||
                !eq(x.fields[j].init, y.fields[j].init))
                return false;
        }
        if (x.callbackOrder != y.callbackOrder || x.listenerOrder != y.listenerOrder ||
            x.methodOrder != y.methodOrder)
            return false;
        for (const auto& [n, body] : x.callbacks)
            if (!y.callbacks.count(n) || !eq(body.stmts, y.callbacks.at(n).stmts))
                return false;
        for (const auto& [n, body] : x.listeners)
            if (!y.listeners.count(n) || !eq(body.stmts, y.listeners.at(n).stmts))
                return false;
        for (const auto& [n, body] : x.methods)
            if (!y.methods.count(n) || !eq(body.stmts, y.methods.at(n).stmts))
                return false;
    }
    return true;
}

}  // namespace leaksem
