#pragma once

#include <stdexcept>
#include <string>

#include "leaksem/ast.hpp"
#include "leaksem/catalog.hpp"

namespace leaksem {

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, SourcePos pos)
        : std::runtime_error(msg + " at line " + std::to_string(pos.line) + ", col " +
                             std::to_string(pos.col)),
          pos(pos) {}
    SourcePos pos;
};

// Parses AML source and validates it against the catalog:
// component/field names unique, onCreate present, listener names disjoint from
// callback names, every api call resolves to the catalog or a local method.
Program parse_program(const std::string& text, const ApiCatalog& catalog);

// Canonical textual form; pretty_print(parse(text)) re-parses to an equal Program.
std::string pretty_print(const Program& p);
std::string pretty_print(const Expr& e);
std::string pretty_print(const CondExpr& c);

bool structurally_equal(const Program& a, const Program& b);

}  // namespace leaksem
