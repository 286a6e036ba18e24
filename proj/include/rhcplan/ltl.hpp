#pragma once

#include <cctype>
#include <memory>
#include <string>
#include <vector>

#include "rhcplan/atoms.hpp"

namespace rhcplan {

enum class LtlKind {
    Atom,
    True,
    False,
    Not,
    And,
    Or,
    Next,
    Eventually,
    Always,
    Until,
};

struct LtlNode;
using LtlPtr = std::shared_ptr<const LtlNode>;

struct LtlNode {
    LtlKind kind;
    std::uint32_t atom = 0; // valid for Atom
    LtlPtr lhs;             // unary operand or left operand
    LtlPtr rhs;             // right operand of binary nodes
};

inline LtlPtr ltl_atom(std::uint32_t index) {
    return std::make_shared<LtlNode>(LtlNode{LtlKind::Atom, index, nullptr, nullptr});
}
inline LtlPtr ltl_true() {
    return std::make_shared<LtlNode>(LtlNode{LtlKind::True, 0, nullptr, nullptr});
}
inline LtlPtr ltl_false() {
    return std::make_shared<LtlNode>(LtlNode{LtlKind::False, 0, nullptr, nullptr});
}
inline LtlPtr ltl_not(LtlPtr f) {
    return std::make_shared<LtlNode>(LtlNode{LtlKind::Not, 0, std::move(f), nullptr});
}
inline LtlPtr ltl_and(LtlPtr a, LtlPtr b) {
    return std::make_shared<LtlNode>(LtlNode{LtlKind::And, 0, std::move(a), std::move(b)});
}
inline LtlPtr ltl_or(LtlPtr a, LtlPtr b) {
    return std::make_shared<LtlNode>(LtlNode{LtlKind::Or, 0, std::move(a), std::move(b)});
}
inline LtlPtr ltl_next(LtlPtr f) {
    return std::make_shared<LtlNode>(LtlNode{LtlKind::Next, 0, std::move(f), nullptr});
}
inline LtlPtr ltl_eventually(LtlPtr f) {
    return std::make_shared<LtlNode>(LtlNode{LtlKind::Eventually, 0, std::move(f), nullptr});
}
inline LtlPtr ltl_always(LtlPtr f) {
    return std::make_shared<LtlNode>(LtlNode{LtlKind::Always, 0, std::move(f), nullptr});
}
inline LtlPtr ltl_until(LtlPtr a, LtlPtr b) {
    return std::make_shared<LtlNode>(LtlNode{LtlKind::Until, 0, std::move(a), std::move(b)});
}

class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& message, std::size_t position)
        : std::runtime_error(message + " at position " + std::to_string(position)),
          position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

namespace detail {

// Recursive-descent parser for the LTL2BA-style surface syntax:
//   unary:  ! X [] <>
//   binary: U (right assoc), &&, ||, -> (right assoc, lowest)
// Implication is sugar and is expanded while parsing.
class LtlParser {
public:
    LtlParser(const std::string& text, const AtomSet& atoms)
        : text_(text), atoms_(atoms) {}

    LtlPtr parse() {
        LtlPtr f = parse_implies();
        skip_ws();
        if (pos_ != text_.size())
            throw parse_error("unexpected trailing input", pos_);
        return f;
    }

private:
    LtlPtr parse_implies() {
        LtlPtr lhs = parse_or();
        skip_ws();
        if (match("->"))
            return ltl_or(ltl_not(std::move(lhs)), parse_implies());
        return lhs;
    }

    LtlPtr parse_or() {
        LtlPtr lhs = parse_and();
        for (;;) {
            skip_ws();
            if (!match("||")) return lhs;
            lhs = ltl_or(std::move(lhs), parse_and());
        }
    }

    LtlPtr parse_and() {
        LtlPtr lhs = parse_until();
        for (;;) {
            skip_ws();
            if (!match("&&")) return lhs;
            lhs = ltl_and(std::move(lhs), parse_until());
        }
    }

    LtlPtr parse_until() {
        LtlPtr lhs = parse_unary();
        skip_ws();
        if (match_keyword("U"))
            return ltl_until(std::move(lhs), parse_until());
        return lhs;
    }

    LtlPtr parse_unary() {
        skip_ws();
        if (pos_ >= text_.size())
            throw parse_error("unexpected end of formula", pos_);
        if (match("!")) return ltl_not(parse_unary());
        if (match("[]")) return ltl_always(parse_unary());
        if (match("<>")) return ltl_eventually(parse_unary());
        if (match_keyword("X")) return ltl_next(parse_unary());
        return parse_primary();
    }

    LtlPtr parse_primary() {
        skip_ws();
        if (pos_ >= text_.size())
            throw parse_error("unexpected end of formula", pos_);
        if (match("(")) {
            LtlPtr f = parse_implies();
            skip_ws();
            if (!match(")"))
                throw parse_error("expected ')'", pos_);
            return f;
        }
        std::size_t start = pos_;
        std::string ident = read_identifier();
        if (ident.empty())
            throw parse_error("expected atom, constant, or '('", pos_);
        if (ident == "true") return ltl_true();
        if (ident == "false") return ltl_false();
        if (ident == "U" || ident == "X")
            throw parse_error("operator '" + ident + "' needs a left operand", start);
        int idx = atoms_.index_of(ident);
        if (idx < 0)
            throw parse_error("undeclared atom '" + ident + "'", start);
        return ltl_atom(static_cast<std::uint32_t>(idx));
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool match(const char* token) {
        skip_ws();
        std::size_t n = std::char_traits<char>::length(token);
        if (text_.compare(pos_, n, token) != 0) return false;
        pos_ += n;
        return true;
    }

    // Keywords are identifiers and must not swallow a prefix of a longer name.
    bool match_keyword(const char* kw) {
        skip_ws();
        std::size_t n = std::char_traits<char>::length(kw);
        if (text_.compare(pos_, n, kw) != 0) return false;
        std::size_t after = pos_ + n;
        if (after < text_.size()) {
            char c = text_[after];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') return false;
        }
        pos_ += n;
        return true;
    }

    std::string read_identifier() {
        std::size_t start = pos_;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_')
                ++pos_;
            else
                break;
        }
        return text_.substr(start, pos_ - start);
    }

    const std::string& text_;
    const AtomSet& atoms_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline LtlPtr parse_ltl(const std::string& text, const AtomSet& atoms) {
    return detail::LtlParser(text, atoms).parse();
}

inline std::string to_string(const LtlPtr& f, const AtomSet& atoms) {
    switch (f->kind) {
        case LtlKind::Atom: return atoms.name(f->atom);
        case LtlKind::True: return "true";
        case LtlKind::False: return "false";
        case LtlKind::Not: return "!" + to_string(f->lhs, atoms);
        case LtlKind::And:
            return "(" + to_string(f->lhs, atoms) + " && " + to_string(f->rhs, atoms) + ")";
        case LtlKind::Or:
            return "(" + to_string(f->lhs, atoms) + " || " + to_string(f->rhs, atoms) + ")";
        case LtlKind::Next: return "X " + to_string(f->lhs, atoms);
        case LtlKind::Eventually: return "<> " + to_string(f->lhs, atoms);
        case LtlKind::Always: return "[] " + to_string(f->lhs, atoms);
        case LtlKind::Until:
            return "(" + to_string(f->lhs, atoms) + " U " + to_string(f->rhs, atoms) + ")";
    }
    return "?";
}

/// Number of conjuncts when the formula is viewed as a top-level conjunction.
inline std::size_t count_top_conjuncts(const LtlPtr& f) {
    if (f->kind == LtlKind::And)
        return count_top_conjuncts(f->lhs) + count_top_conjuncts(f->rhs);
    return 1;
}

} // namespace rhcplan
