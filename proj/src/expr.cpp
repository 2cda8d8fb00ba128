#include "spherekit/expr.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>

namespace spherekit {

namespace {

constexpr std::array<const char*, 9> kFuncs = {"sin",  "cos",  "tan",  "exp", "log",
                                               "sqrt", "abs",  "sinh", "cosh"};

double apply_func(int f, double x) {
    switch (f) {
        case 0: return std::sin(x);
        case 1: return std::cos(x);
        case 2: return std::tan(x);
        case 3: return std::exp(x);
        case 4: return std::log(x);
        case 5: return std::sqrt(x);
        case 6: return std::abs(x);
        case 7: return std::sinh(x);
        case 8: return std::cosh(x);
    }
    return 0;
}

}  // namespace

class ExprParser {
public:
    explicit ExprParser(std::string_view text) : text_(text) {}

    Expr run() {
        Expr e;
        out_ = &e;
        e.root_ = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) throw parse_error("unexpected trailing input", pos_);
        e.vars_ = vars_;
        return e;
    }

private:
    int parse_expr() {
        int lhs = parse_term();
        while (true) {
            skip_ws();
            if (match('+'))
                lhs = node(Expr::Node::Kind::add, lhs, parse_term());
            else if (match('-'))
                lhs = node(Expr::Node::Kind::sub, lhs, parse_term());
            else
                return lhs;
        }
    }

    int parse_term() {
        int lhs = parse_unary();
        while (true) {
            skip_ws();
            if (match('*'))
                lhs = node(Expr::Node::Kind::mul, lhs, parse_unary());
            else if (match('/'))
                lhs = node(Expr::Node::Kind::div, lhs, parse_unary());
            else
                return lhs;
        }
    }

    int parse_unary() {
        skip_ws();
        if (match('-')) {
            int n = node(Expr::Node::Kind::neg, parse_unary(), -1);
            return n;
        }
        return parse_power();
    }

    int parse_power() {
        int base = parse_primary();
        skip_ws();
        if (match('^')) return node(Expr::Node::Kind::pow, base, parse_unary());
        return base;
    }

    int parse_primary() {
        skip_ws();
        if (pos_ >= text_.size()) throw parse_error("unexpected end of expression", pos_);
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && pos_ + 1 < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))))
            return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        if (match('(')) {
            int inner = parse_expr();
            expect(')');
            return inner;
        }
        throw parse_error(std::string("unexpected character '") + c + "'", pos_);
    }

    int parse_number() {
        const size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            size_t p = pos_ + 1;
            if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
            if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
                pos_ = p;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
            }
        }
        const std::string tok(text_.substr(start, pos_ - start));
        Expr::Node n;
        n.kind = Expr::Node::Kind::number;
        n.value = std::strtod(tok.c_str(), nullptr);
        out_->nodes_.push_back(n);
        return static_cast<int>(out_->nodes_.size()) - 1;
    }

    int parse_ident() {
        const size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                       text_[pos_] == '_'))
            ++pos_;
        const std::string name(text_.substr(start, pos_ - start));

        if (name == "pi") return number_node(kPi);
        if (name == "e") return number_node(std::exp(1.0));

        for (size_t f = 0; f < kFuncs.size(); ++f) {
            if (name == kFuncs[f]) {
                skip_ws();
                expect('(');
                int arg = parse_expr();
                expect(')');
                Expr::Node n;
                n.kind = Expr::Node::Kind::call;
                n.func = static_cast<int>(f);
                n.lhs = arg;
                out_->nodes_.push_back(n);
                return static_cast<int>(out_->nodes_.size()) - 1;
            }
        }

        int var = -1;
        VarSet set = VarSet::none;
        if (name == "x") var = 0, set = VarSet::cart;
        if (name == "y") var = 1, set = VarSet::cart;
        if (name == "z") var = 2, set = VarSet::cart;
        if (name == "lam") var = 0, set = VarSet::sph;
        if (name == "th") var = 1, set = VarSet::sph;
        if (var < 0) throw parse_error("unknown identifier '" + name + "'", start);
        if (vars_ != VarSet::none && vars_ != set)
            throw parse_error("cannot mix Cartesian and spherical variables", start);
        vars_ = set;
        Expr::Node n;
        n.kind = Expr::Node::Kind::var;
        n.var = var;
        out_->nodes_.push_back(n);
        return static_cast<int>(out_->nodes_.size()) - 1;
    }

    int number_node(double v) {
        Expr::Node n;
        n.kind = Expr::Node::Kind::number;
        n.value = v;
        out_->nodes_.push_back(n);
        return static_cast<int>(out_->nodes_.size()) - 1;
    }

    int node(Expr::Node::Kind kind, int lhs, int rhs) {
        Expr::Node n;
        n.kind = kind;
        n.lhs = lhs;
        n.rhs = rhs;
        out_->nodes_.push_back(n);
        return static_cast<int>(out_->nodes_.size()) - 1;
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool match(char c) {
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        skip_ws();
        if (!match(c)) throw parse_error(std::string("expected '") + c + "'", pos_);
    }

    std::string_view text_;
    size_t pos_ = 0;
    VarSet vars_ = VarSet::none;
    Expr* out_ = nullptr;
};

Expr Expr::parse(std::string_view text) { return ExprParser(text).run(); }

double Expr::eval_node(int idx, const double* v) const {
    const Node& n = nodes_[idx];
    switch (n.kind) {
        case Node::Kind::number: return n.value;
        case Node::Kind::var: return v[n.var];
        case Node::Kind::neg: return -eval_node(n.lhs, v);
        case Node::Kind::add: return eval_node(n.lhs, v) + eval_node(n.rhs, v);
        case Node::Kind::sub: return eval_node(n.lhs, v) - eval_node(n.rhs, v);
        case Node::Kind::mul: return eval_node(n.lhs, v) * eval_node(n.rhs, v);
        case Node::Kind::div: return eval_node(n.lhs, v) / eval_node(n.rhs, v);
        case Node::Kind::pow: return std::pow(eval_node(n.lhs, v), eval_node(n.rhs, v));
        case Node::Kind::call: return apply_func(n.func, eval_node(n.lhs, v));
    }
    return 0;
}

double Expr::eval_cart(double x, double y, double z) const {
    const double v[3] = {x, y, z};
    return eval_node(root_, v);
}

double Expr::eval_sph(double lam, double th) const {
    const double v[3] = {lam, th, 0};
    return eval_node(root_, v);
}

sphere_fn Expr::as_sphere_fn() const {
    if (vars_ == VarSet::sph) {
        Expr self = *this;
        return [self](double lam, double th) { return complex(self.eval_sph(lam, th), 0.0); };
    }
    Expr self = *this;
    return [self](double lam, double th) {
        const CartPoint p = sph_to_cart({lam, th});
        return complex(self.eval_cart(p.x, p.y, p.z), 0.0);
    };
}

}  // namespace spherekit
