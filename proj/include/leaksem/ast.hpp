#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace leaksem {

struct SourcePos {
    int line = 0;
    int col = 0;
};

enum class ValType { Str, Int, Bool, StrArray };

std::string to_string(ValType t);

// ---- expressions ----

struct Expr;
using ExprPtr = std::shared_ptr<Expr>;

struct Expr {
    enum class Kind { StrLit, IntLit, BoolLit, NullLit, Ident, Index, Binop };
    Kind kind;
    SourcePos pos;

    std::string str;        // StrLit text, Ident name, Binop op ("+","-","*")
    long long num = 0;      // IntLit
    bool boolean = false;   // BoolLit
    ExprPtr lhs, rhs;       // Binop operands; Index: lhs=array ident expr, rhs=index
};

// Comparison or bare boolean expression; a condition is a conjunction of these.
struct CondAtom {
    enum class Kind { Cmp, BoolExpr };
    Kind kind;
    std::string op;  // "==","!=","<",">","<=",">=" for Cmp
    ExprPtr lhs, rhs;  // BoolExpr uses lhs only
    SourcePos pos;
};

struct CondExpr {
    std::vector<CondAtom> conjuncts;  // joined by &&
};

// ---- statements ----

struct Stmt;
using Block = std::vector<Stmt>;

struct Stmt {
    enum class Kind { Assign, ApiCall, LocalCall, If, While, Return };
    Kind kind;
    SourcePos pos;

    std::string target;           // Assign lval; ApiCall optional target
    ExprPtr expr;                 // Assign rhs
    std::string callee;           // ApiCall api name / LocalCall method name
    std::vector<ExprPtr> args;    // ApiCall arguments
    CondExpr cond;                // If / While
    std::shared_ptr<Block> thenBlock, elseBlock;  // If; While uses thenBlock
};

// ---- declarations ----

struct FieldDecl {
    std::string name;
    ValType type = ValType::Str;
    ExprPtr init;  // literal initializer, optional
    SourcePos pos;
};

struct MethodBody {
    std::string name;
    Block stmts;
    SourcePos pos;
};

enum class ComponentKind { Activity, Service };

struct Component {
    std::string name;
    ComponentKind kind = ComponentKind::Activity;
    std::vector<FieldDecl> fields;
    // Declaration order preserved; maps keyed by callback/listener/method name.
    std::vector<std::string> callbackOrder, listenerOrder, methodOrder;
    std::map<std::string, MethodBody> callbacks;   // lifecycle callbacks (onCreate, ...)
    std::map<std::string, MethodBody> listeners;   // event listeners (onClick, ...)
    std::map<std::string, MethodBody> methods;     // local methods
    SourcePos pos;

    const MethodBody* find_body(const std::string& n) const;
    const FieldDecl* find_field(const std::string& n) const;
};

struct Program {
    std::string name;
    std::vector<Component> components;
    std::string apiCatalogRef;  // informational

    const Component* find_component(const std::string& n) const;
};

}  // namespace leaksem
