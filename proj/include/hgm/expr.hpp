#ifndef HGM_EXPR_HPP
#define HGM_EXPR_HPP

#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hgm/bigfloat.hpp"
#include "hgm/errors.hpp"
#include "hgm/jet.hpp"

namespace hgm {

enum class ExprKind { Literal, Time, Param, Add, Sub, Mul, Div, Neg, PowInt, PowRational, Sqrt, Exp, Log };

template <class R>
struct ExprNode;

template <class R>
using ExprPtr = std::shared_ptr<const ExprNode<R>>;

template <class R>
struct ExprNode {
    ExprKind kind;
    R value{};           // Literal value or baked Param value
    std::string lexeme;  // literal text or parameter name
    long ipow = 0;
    long pnum = 0, pden = 1;  // rational exponent for PowRational
    ExprPtr<R> a, b;
};

// Immutable expression over {t, params, rational literals, +,-,*,/,^int,sqrt,exp,log}
// plus an internal rational-power node used by programmatic basis construction.
template <class R>
class Expr {
    ExprPtr<R> n_;

    static Expr wrap(ExprNode<R>&& node) { return Expr(std::make_shared<const ExprNode<R>>(std::move(node))); }

public:
    Expr() : n_(nullptr) {}
    explicit Expr(ExprPtr<R> n) : n_(std::move(n)) {}

    bool valid() const { return n_ != nullptr; }
    const ExprNode<R>* node() const { return n_.get(); }
    ExprPtr<R> ptr() const { return n_; }

    static Expr literal(const R& v, std::string lexeme = {}) {
        ExprNode<R> n;
        n.kind = ExprKind::Literal;
        n.value = v;
        n.lexeme = lexeme.empty() ? format_shortest(v) : std::move(lexeme);
        return wrap(std::move(n));
    }
    static Expr time() {
        ExprNode<R> n;
        n.kind = ExprKind::Time;
        return wrap(std::move(n));
    }
    static Expr param(std::string name, const R& v) {
        ExprNode<R> n;
        n.kind = ExprKind::Param;
        n.lexeme = std::move(name);
        n.value = v;
        return wrap(std::move(n));
    }
    static Expr binary(ExprKind k, Expr a, Expr b) {
        ExprNode<R> n;
        n.kind = k;
        n.a = a.n_;
        n.b = b.n_;
        return wrap(std::move(n));
    }
    static Expr unary(ExprKind k, Expr a) {
        ExprNode<R> n;
        n.kind = k;
        n.a = a.n_;
        return wrap(std::move(n));
    }
    static Expr pow_int(Expr a, long e) {
        ExprNode<R> n;
        n.kind = ExprKind::PowInt;
        n.a = a.n_;
        n.ipow = e;
        return wrap(std::move(n));
    }
    static Expr pow_rational(Expr a, long num, long den) {
        if (den <= 0) throw DomainError("pow_rational: denominator must be positive");
        ExprNode<R> n;
        n.kind = ExprKind::PowRational;
        n.a = a.n_;
        n.pnum = num;
        n.pden = den;
        return wrap(std::move(n));
    }

    friend Expr operator+(Expr a, Expr b) { return binary(ExprKind::Add, a, b); }
    friend Expr operator-(Expr a, Expr b) { return binary(ExprKind::Sub, a, b); }
    friend Expr operator*(Expr a, Expr b) {
        // keep units out of the tree so serialize/parse round-trips are stable
        if (a.n_ && a.n_->kind == ExprKind::Literal && a.n_->value == R(1)) return b;
        if (b.n_ && b.n_->kind == ExprKind::Literal && b.n_->value == R(1)) return a;
        return binary(ExprKind::Mul, a, b);
    }
    friend Expr operator/(Expr a, Expr b) { return binary(ExprKind::Div, a, b); }
    // unary minus canonicalized as (0 - x) so it survives reparsing unchanged
    Expr operator-() const { return binary(ExprKind::Sub, literal(R(0), "0"), *this); }

    bool is_literal_zero() const {
        switch (n_->kind) {
            case ExprKind::Literal: return n_->value == R(0);
            case ExprKind::Neg: return Expr(n_->a).is_literal_zero();
            case ExprKind::Mul:
                return Expr(n_->a).is_literal_zero() || Expr(n_->b).is_literal_zero();
            case ExprKind::Add:
            case ExprKind::Sub:
                return Expr(n_->a).is_literal_zero() && Expr(n_->b).is_literal_zero();
            default: return false;
        }
    }

    R eval(const R& t) const {
        std::unordered_map<const ExprNode<R>*, R> memo;
        return eval_impl(n_.get(), t, memo);
    }

    Jet<R> eval_jet(const R& t, int order) const {
        std::unordered_map<const ExprNode<R>*, Jet<R>> memo;
        return eval_jet_impl(n_.get(), t, order, memo);
    }

    std::string str() const { return str_impl(n_.get()); }

    friend bool structurally_equal(const Expr& x, const Expr& y) { return eq_impl(x.n_.get(), y.n_.get()); }

private:
    static R eval_impl(const ExprNode<R>* n, const R& t, std::unordered_map<const ExprNode<R>*, R>& memo) {
        auto it = memo.find(n);
        if (it != memo.end()) return it->second;
        R r(0);
        switch (n->kind) {
            case ExprKind::Literal:
            case ExprKind::Param: r = n->value; break;
            case ExprKind::Time: r = t; break;
            case ExprKind::Add: r = eval_impl(n->a.get(), t, memo) + eval_impl(n->b.get(), t, memo); break;
            case ExprKind::Sub: r = eval_impl(n->a.get(), t, memo) - eval_impl(n->b.get(), t, memo); break;
            case ExprKind::Mul: r = eval_impl(n->a.get(), t, memo) * eval_impl(n->b.get(), t, memo); break;
            case ExprKind::Div: {
                R den = eval_impl(n->b.get(), t, memo);
                if (den == R(0)) throw SingularPointError("expression division by zero at t", to_double(t));
                r = eval_impl(n->a.get(), t, memo) / den;
                break;
            }
            case ExprKind::Neg: r = -eval_impl(n->a.get(), t, memo); break;
            case ExprKind::PowInt: {
                R base = eval_impl(n->a.get(), t, memo);
                if (n->ipow < 0 && base == R(0))
                    throw SingularPointError("expression pole at t", to_double(t));
                r = R(1);
                long m = n->ipow >= 0 ? n->ipow : -n->ipow;
                R acc = base;
                while (m) {
                    if (m & 1) r = r * acc;
                    m >>= 1;
                    if (m) acc = acc * acc;
                }
                if (n->ipow < 0) r = R(1) / r;
                break;
            }
            case ExprKind::PowRational: {
                R base = eval_impl(n->a.get(), t, memo);
                if (base <= R(0)) throw DomainError("rational power of non-positive base");
                R e = scalar<R>::from_double(static_cast<double>(n->pnum));
                e = e / static_cast<double>(n->pden);
                r = exp(e * log(base));
                break;
            }
            case ExprKind::Sqrt: {
                R u = eval_impl(n->a.get(), t, memo);
                if (u < R(0)) throw DomainError("sqrt of negative value");
                r = sqrt(u);
                break;
            }
            case ExprKind::Exp: r = exp(eval_impl(n->a.get(), t, memo)); break;
            case ExprKind::Log: {
                R u = eval_impl(n->a.get(), t, memo);
                if (u <= R(0)) throw DomainError("log of non-positive value");
                r = log(u);
                break;
            }
        }
        memo.emplace(n, r);
        return r;
    }

    static Jet<R> eval_jet_impl(const ExprNode<R>* n, const R& t, int order,
                                std::unordered_map<const ExprNode<R>*, Jet<R>>& memo) {
        auto it = memo.find(n);
        if (it != memo.end()) return it->second;
        Jet<R> r;
        switch (n->kind) {
            case ExprKind::Literal:
            case ExprKind::Param: r = Jet<R>::constant(order, n->value); break;
            case ExprKind::Time: r = Jet<R>::variable(order, t); break;
            case ExprKind::Add: r = eval_jet_impl(n->a.get(), t, order, memo) + eval_jet_impl(n->b.get(), t, order, memo); break;
            case ExprKind::Sub: r = eval_jet_impl(n->a.get(), t, order, memo) - eval_jet_impl(n->b.get(), t, order, memo); break;
            case ExprKind::Mul: r = jet_mul(eval_jet_impl(n->a.get(), t, order, memo), eval_jet_impl(n->b.get(), t, order, memo)); break;
            case ExprKind::Div: {
                Jet<R> den = eval_jet_impl(n->b.get(), t, order, memo);
                if (den.value() == R(0)) throw SingularPointError("expression division by zero at t", to_double(t));
                r = jet_div(eval_jet_impl(n->a.get(), t, order, memo), den);
                break;
            }
            case ExprKind::Neg: r = -eval_jet_impl(n->a.get(), t, order, memo); break;
            case ExprKind::PowInt: r = jet_pow_int(eval_jet_impl(n->a.get(), t, order, memo), n->ipow); break;
            case ExprKind::PowRational: {
                R e = scalar<R>::from_double(static_cast<double>(n->pnum));
                e = e / static_cast<double>(n->pden);
                r = jet_pow_real(eval_jet_impl(n->a.get(), t, order, memo), e);
                break;
            }
            case ExprKind::Sqrt: r = jet_sqrt(eval_jet_impl(n->a.get(), t, order, memo)); break;
            case ExprKind::Exp: r = jet_exp(eval_jet_impl(n->a.get(), t, order, memo)); break;
            case ExprKind::Log: r = jet_log(eval_jet_impl(n->a.get(), t, order, memo)); break;
        }
        memo.emplace(n, r);
        return r;
    }

    static std::string str_impl(const ExprNode<R>* n) {
        switch (n->kind) {
            case ExprKind::Literal: return n->lexeme;
            case ExprKind::Time: return "t";
            case ExprKind::Param: return n->lexeme;
            case ExprKind::Add: return "(" + str_impl(n->a.get()) + " + " + str_impl(n->b.get()) + ")";
            case ExprKind::Sub: return "(" + str_impl(n->a.get()) + " - " + str_impl(n->b.get()) + ")";
            case ExprKind::Mul: return "(" + str_impl(n->a.get()) + "*" + str_impl(n->b.get()) + ")";
            case ExprKind::Div: return "(" + str_impl(n->a.get()) + "/" + str_impl(n->b.get()) + ")";
            case ExprKind::Neg: return "(0 - " + str_impl(n->a.get()) + ")";
            case ExprKind::PowInt: return "(" + str_impl(n->a.get()) + ")^" + std::to_string(n->ipow);
            case ExprKind::PowRational:
                return "powr(" + str_impl(n->a.get()) + ";" + std::to_string(n->pnum) + "/" +
                       std::to_string(n->pden) + ")";
            case ExprKind::Sqrt: return "sqrt(" + str_impl(n->a.get()) + ")";
            case ExprKind::Exp: return "exp(" + str_impl(n->a.get()) + ")";
            case ExprKind::Log: return "log(" + str_impl(n->a.get()) + ")";
        }
        return {};
    }

    static bool eq_impl(const ExprNode<R>* x, const ExprNode<R>* y) {
        if (x == y) return true;
        if (!x || !y || x->kind != y->kind) return false;
        switch (x->kind) {
            case ExprKind::Literal: return x->value == y->value;
            case ExprKind::Time: return true;
            case ExprKind::Param: return x->lexeme == y->lexeme && x->value == y->value;
            case ExprKind::PowInt: return x->ipow == y->ipow && eq_impl(x->a.get(), y->a.get());
            case ExprKind::PowRational:
                return x->pnum == y->pnum && x->pden == y->pden && eq_impl(x->a.get(), y->a.get());
            case ExprKind::Neg:
            case ExprKind::Sqrt:
            case ExprKind::Exp:
            case ExprKind::Log: return eq_impl(x->a.get(), y->a.get());
            default: return eq_impl(x->a.get(), y->a.get()) && eq_impl(x->b.get(), y->b.get());
        }
    }
};

// ---- tokenizer / parser for the operator grammar ----------------------------
//   op     := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := atom ('^' INT)?
//   atom   := 'd' | 't' | IDENT | RATIONAL | '(' op ')' | FUNC '(' op ')'
// 'd' denotes d/dt; the parser normalizes to sum-of-c_k(t)*d^k form and
// rejects d inside coefficients or right-multiplied by non-d factors.

namespace parsing {

struct Token {
    enum Kind { Num, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End } kind;
    std::string text;
    int line, col;
};

inline std::vector<Token> tokenize(const std::string& s) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto push = [&](Token::Kind k, std::string text) { out.push_back({k, std::move(text), line, col}); };
    while (i < s.size()) {
        char c = s[i];
        if (c == '\n') {
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            ++col;
            continue;
        }
        int startcol = col;
        if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
            std::size_t j = i;
            while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
            if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
                if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
                    ++k;
                    while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
                    j = k;
                }
            }
            out.push_back({Token::Num, s.substr(i, j - i), line, startcol});
            col += static_cast<int>(j - i);
            i = j;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
            out.push_back({Token::Ident, s.substr(i, j - i), line, startcol});
            col += static_cast<int>(j - i);
            i = j;
            continue;
        }
        switch (c) {
            case '+': push(Token::Plus, "+"); break;
            case '-': push(Token::Minus, "-"); break;
            case '*': push(Token::Star, "*"); break;
            case '/': push(Token::Slash, "/"); break;
            case '^': push(Token::Caret, "^"); break;
            case '(': push(Token::LParen, "("); break;
            case ')': push(Token::RParen, ")"); break;
            default:
                throw ParseError(std::string("unexpected character '") + c + "'", line, col);
        }
        ++i;
        ++col;
    }
    out.push_back({Token::End, "", line, col});
    return out;
}

// polynomial in d with scalar-expression coefficients
template <class R>
struct DPoly {
    std::map<int, Expr<R>> coeff;

    bool pure_scalar() const { return coeff.size() == 1 && coeff.count(0) == 1; }
    bool is_bare_d_power() const {
        if (coeff.size() != 1) return false;
        auto& [k, e] = *coeff.begin();
        if (k == 0) return false;
        const ExprNode<R>* n = e.node();
        return n->kind == ExprKind::Literal && n->value == R(1);
    }
    Expr<R> scalar_part() const { return coeff.at(0); }
};

template <class R>
class Parser {
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    const std::map<std::string, R>* params_;
    bool allow_d_;

    const Token& peek() const { return toks_[pos_]; }
    Token take() { return toks_[pos_++]; }
    [[noreturn]] void fail(const std::string& msg, const Token& t) const {
        throw ParseError(msg, t.line, t.col);
    }

public:
    Parser(const std::string& text, const std::map<std::string, R>& params, bool allow_d)
        : toks_(tokenize(text)), params_(&params), allow_d_(allow_d) {}

    DPoly<R> parse_all() {
        DPoly<R> p = parse_op();
        if (peek().kind != Token::End) fail("trailing input after expression", peek());
        return p;
    }

private:
    DPoly<R> scalar_poly(Expr<R> e) {
        DPoly<R> p;
        p.coeff.emplace(0, std::move(e));
        return p;
    }

    DPoly<R> parse_op() {
        DPoly<R> acc = parse_term();
        while (peek().kind == Token::Plus || peek().kind == Token::Minus) {
            bool plus = take().kind == Token::Plus;
            DPoly<R> rhs = parse_term();
            for (auto& [k, e] : rhs.coeff) {
                auto it = acc.coeff.find(k);
                if (it == acc.coeff.end())
                    acc.coeff.emplace(k, plus ? e : -e);
                else
                    it->second = plus ? (it->second + e) : (it->second - e);
            }
        }
        return acc;
    }

    DPoly<R> parse_term() {
        Token start = peek();
        DPoly<R> acc = parse_factor();
        while (peek().kind == Token::Star || peek().kind == Token::Slash) {
            bool mul = take().kind == Token::Star;
            Token optok = peek();
            DPoly<R> rhs = parse_factor();
            if (!mul) {
                if (!rhs.pure_scalar()) fail("cannot divide by an expression containing d", optok);
                for (auto& [k, e] : acc.coeff) e = e / rhs.scalar_part();
                continue;
            }
            if (acc.pure_scalar()) {
                Expr<R> c = acc.scalar_part();
                DPoly<R> out;
                for (auto& [k, e] : rhs.coeff) out.coeff.emplace(k, c * e);
                acc = std::move(out);
            } else if (rhs.is_bare_d_power()) {
                int shift = rhs.coeff.begin()->first;
                DPoly<R> out;
                for (auto& [k, e] : acc.coeff) out.coeff.emplace(k + shift, e);
                acc = std::move(out);
            } else if (rhs.pure_scalar()) {
                fail("d may not be multiplied from the right by a coefficient", optok);
            } else {
                fail("product of two d-containing factors (operator multiplication unsupported)", start);
            }
        }
        return acc;
    }

    DPoly<R> parse_factor() {
        DPoly<R> base = parse_atom();
        if (peek().kind == Token::Caret) {
            Token caret = take();
            bool neg = false;
            if (peek().kind == Token::Minus) {
                take();
                neg = true;
            }
            if (peek().kind != Token::Num || peek().text.find_first_of(".eE") != std::string::npos)
                fail("exponent must be an integer", peek());
            long e = std::stol(take().text);
            if (neg) e = -e;
            if (base.is_bare_d_power()) {
                if (e < 0) fail("negative power of d", caret);
                int k = base.coeff.begin()->first;
                DPoly<R> out;
                out.coeff.emplace(static_cast<int>(k * e), Expr<R>::literal(R(1), "1"));
                return out;
            }
            if (!base.pure_scalar()) fail("cannot exponentiate an expression containing d", caret);
            return scalar_poly(Expr<R>::pow_int(base.scalar_part(), e));
        }
        return base;
    }

    DPoly<R> parse_atom() {
        Token t = peek();
        switch (t.kind) {
            case Token::Num: {
                take();
                return scalar_poly(Expr<R>::literal(from_string<R>(t.text), t.text));
            }
            case Token::Minus: {  // unary minus on an atom
                take();
                DPoly<R> p = parse_factor();
                for (auto& [k, e] : p.coeff) e = -e;
                return p;
            }
            case Token::Ident: {
                take();
                if (t.text == "d") {
                    if (!allow_d_) fail("d is not allowed in a scalar expression", t);
                    DPoly<R> p;
                    p.coeff.emplace(1, Expr<R>::literal(R(1), "1"));
                    return p;
                }
                if (t.text == "t") return scalar_poly(Expr<R>::time());
                if (t.text == "exp" || t.text == "log" || t.text == "sqrt") {
                    if (peek().kind != Token::LParen) fail("expected '(' after " + t.text, peek());
                    take();
                    DPoly<R> arg = parse_op();
                    if (!arg.pure_scalar()) fail("d inside " + t.text + "()", t);
                    if (peek().kind != Token::RParen) fail("expected ')'", peek());
                    take();
                    ExprKind k = t.text == "exp" ? ExprKind::Exp : t.text == "log" ? ExprKind::Log : ExprKind::Sqrt;
                    return scalar_poly(Expr<R>::unary(k, arg.scalar_part()));
                }
                auto it = params_->find(t.text);
                if (it == params_->end()) fail("unknown identifier '" + t.text + "'", t);
                return scalar_poly(Expr<R>::param(t.text, it->second));
            }
            case Token::LParen: {
                take();
                DPoly<R> p = parse_op();
                if (peek().kind != Token::RParen) fail("expected ')'", peek());
                take();
                return p;
            }
            default:
                fail("unexpected token '" + t.text + "'", t);
        }
    }
};

}  // namespace parsing

// Parse a scalar (d-free) expression.
template <class R>
Expr<R> parse_expr(const std::string& text, const std::map<std::string, R>& params = {}) {
    parsing::Parser<R> p(text, params, /*allow_d=*/false);
    auto poly = p.parse_all();
    return poly.scalar_part();
}

// Helper: t^(num/den) * exp(kappa * t^(snum/sden)) style factors used by
// asymptotic bases; exponents are held exactly as rationals.
template <class R>
Expr<R> expr_rational_power_of_t(long num, long den) {
    Expr<R> t = Expr<R>::time();
    if (den == 1) return Expr<R>::pow_int(t, num);
    return Expr<R>::pow_rational(t, num, den);
}

}  // namespace hgm

#endif
