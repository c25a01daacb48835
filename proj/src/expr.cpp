#include "hcap/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace hcap {

namespace {

std::string fmt_double(double v) {
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v));
        return buf;
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    if (std::strtod(buf, nullptr) != v) std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double value_of(double v) { return v; }
double value_of(const Jet& j) { return j.value(); }

double int_pow(double base, int k) {
    if (k < 0) return 1.0 / int_pow(base, -k);
    double r = 1.0, b = base;
    int e = k;
    while (e > 0) {
        if (e & 1) r *= b;
        e >>= 1;
        if (e) b *= b;
    }
    return r;
}

Jet int_pow(const Jet& base, int k) { return powi(base, k); }

}  // namespace

ExprPtr Expr::constant(double c) {
    auto e = std::shared_ptr<Expr>(new Expr);
    e->kind_ = Kind::Constant;
    e->cval_ = c;
    return e;
}

ExprPtr Expr::variable(int i) {
    if (i < 0 || i >= kMaxJetDim) throw ParseError("variable index out of range");
    auto e = std::shared_ptr<Expr>(new Expr);
    e->kind_ = Kind::Variable;
    e->var_ = i;
    e->arity_ = i + 1;
    return e;
}

ExprPtr Expr::binary(Kind k, ExprPtr a, ExprPtr b) {
    auto e = std::shared_ptr<Expr>(new Expr);
    e->kind_ = k;
    e->arity_ = std::max(a->arity_, b->arity_);
    e->lhs_ = std::move(a);
    e->rhs_ = std::move(b);
    return e;
}

ExprPtr Expr::unary(Kind k, ExprPtr a) {
    auto e = std::shared_ptr<Expr>(new Expr);
    e->kind_ = k;
    e->arity_ = a->arity_;
    e->lhs_ = std::move(a);
    return e;
}

ExprPtr Expr::add(ExprPtr a, ExprPtr b) { return binary(Kind::Add, std::move(a), std::move(b)); }
ExprPtr Expr::sub(ExprPtr a, ExprPtr b) { return binary(Kind::Sub, std::move(a), std::move(b)); }
ExprPtr Expr::mul(ExprPtr a, ExprPtr b) { return binary(Kind::Mul, std::move(a), std::move(b)); }
ExprPtr Expr::div(ExprPtr a, ExprPtr b) { return binary(Kind::Div, std::move(a), std::move(b)); }
ExprPtr Expr::sqrt(ExprPtr a) { return unary(Kind::Sqrt, std::move(a)); }
ExprPtr Expr::exp(ExprPtr a) { return unary(Kind::Exp, std::move(a)); }
ExprPtr Expr::log(ExprPtr a) { return unary(Kind::Log, std::move(a)); }

ExprPtr Expr::pow(ExprPtr a, int k) {
    auto e = std::shared_ptr<Expr>(new Expr);
    e->kind_ = Kind::Pow;
    e->expo_ = k;
    e->arity_ = a->arity_;
    e->lhs_ = std::move(a);
    return e;
}

namespace {
std::string short_str(const Expr& e) {
    std::string s = e.str();
    if (s.size() > 72) s = s.substr(0, 69) + "...";
    return s;
}
}  // namespace

template <class T>
T Expr::eval_impl(std::span<const T> vars) const {
    switch (kind_) {
        case Kind::Constant: {
            if constexpr (std::is_same_v<T, double>) return cval_;
            else return Jet::constant(vars[0].dim(), vars[0].order(), cval_);
        }
        case Kind::Variable:
            return vars[var_];
        case Kind::Add:
            return lhs_->eval_impl(vars) + rhs_->eval_impl(vars);
        case Kind::Sub:
            return lhs_->eval_impl(vars) - rhs_->eval_impl(vars);
        case Kind::Mul:
            return lhs_->eval_impl(vars) * rhs_->eval_impl(vars);
        case Kind::Div: {
            T num = lhs_->eval_impl(vars);
            T den = rhs_->eval_impl(vars);
            if (value_of(den) == 0.0)
                throw EvalError("division by zero in " + short_str(*this));
            return num / den;
        }
        case Kind::Sqrt: {
            T arg = lhs_->eval_impl(vars);
            if (value_of(arg) <= 0.0)
                throw EvalError("sqrt of nonpositive argument in " + short_str(*this));
            using std::sqrt;
            return sqrt(arg);
        }
        case Kind::Exp: {
            using std::exp;
            return exp(lhs_->eval_impl(vars));
        }
        case Kind::Log: {
            T arg = lhs_->eval_impl(vars);
            if (value_of(arg) <= 0.0)
                throw EvalError("log of nonpositive argument in " + short_str(*this));
            using std::log;
            return log(arg);
        }
        case Kind::Pow: {
            T base = lhs_->eval_impl(vars);
            if (expo_ < 0 && value_of(base) == 0.0)
                throw EvalError("negative power of zero in " + short_str(*this));
            return int_pow(base, expo_);
        }
    }
    throw EvalError("corrupt expression node");
}

double Expr::eval(std::span<const double> x) const {
    if (static_cast<int>(x.size()) < arity_)
        throw EvalError("point has fewer coordinates than the expression uses");
    return eval_impl<double>(x);
}

Jet Expr::lift(std::span<const double> point, int order) const {
    if (static_cast<int>(point.size()) < arity_)
        throw EvalError("point has fewer coordinates than the expression uses");
    const int dim = std::max<int>(1, static_cast<int>(point.size()));
    std::vector<Jet> seeds;
    seeds.reserve(dim);
    for (int i = 0; i < dim; ++i)
        seeds.push_back(Jet::variable(dim, order, i, i < static_cast<int>(point.size()) ? point[i] : 0.0));
    return eval_impl<Jet>(std::span<const Jet>(seeds));
}

std::string Expr::str() const {
    switch (kind_) {
        case Kind::Constant:
            return fmt_double(cval_);
        case Kind::Variable:
            return "x" + std::to_string(var_ + 1);
        case Kind::Add:
            return "(add " + lhs_->str() + " " + rhs_->str() + ")";
        case Kind::Sub:
            return "(sub " + lhs_->str() + " " + rhs_->str() + ")";
        case Kind::Mul:
            return "(mul " + lhs_->str() + " " + rhs_->str() + ")";
        case Kind::Div:
            return "(div " + lhs_->str() + " " + rhs_->str() + ")";
        case Kind::Sqrt:
            return "(sqrt " + lhs_->str() + ")";
        case Kind::Exp:
            return "(exp " + lhs_->str() + ")";
        case Kind::Log:
            return "(log " + lhs_->str() + ")";
        case Kind::Pow:
            return "(pow " + lhs_->str() + " " + std::to_string(expo_) + ")";
    }
    return "?";
}

namespace {

struct Tokenizer {
    const std::string& s;
    size_t i = 0;
    explicit Tokenizer(const std::string& text) : s(text) {}

    void skip_ws() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool done() {
        skip_ws();
        return i >= s.size();
    }
    char peek() {
        skip_ws();
        return i < s.size() ? s[i] : '\0';
    }
    std::string next() {
        skip_ws();
        if (i >= s.size()) throw ParseError("unexpected end of surface expression");
        if (s[i] == '(' || s[i] == ')') return std::string(1, s[i++]);
        size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) && s[j] != '(' &&
               s[j] != ')')
            ++j;
        std::string t = s.substr(i, j - i);
        i = j;
        return t;
    }
};

bool is_number(const std::string& t, double& out) {
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end && *end == '\0' && end != t.c_str();
}

ExprPtr parse_expr(Tokenizer& tz) {
    std::string t = tz.next();
    if (t == ")") throw ParseError("unexpected ')' at position " + std::to_string(tz.i));
    if (t != "(") {
        double v;
        if (is_number(t, v)) return Expr::constant(v);
        if (t.size() == 2 && t[0] == 'x' && t[1] >= '1' && t[1] <= '3')
            return Expr::variable(t[1] - '1');
        throw ParseError("unknown token '" + t + "'");
    }
    std::string op = tz.next();
    std::vector<ExprPtr> args;
    std::vector<std::string> raw;
    while (tz.peek() != ')') {
        raw.push_back("");  // placeholder to keep raw token of pow exponent below
        args.push_back(parse_expr(tz));
    }
    tz.next();  // consume ')'

    auto need = [&](size_t n) {
        if (args.size() != n)
            throw ParseError("operator '" + op + "' expects " + std::to_string(n) +
                             " arguments, got " + std::to_string(args.size()));
    };
    auto fold = [&](ExprPtr (*f)(ExprPtr, ExprPtr)) {
        if (args.size() < 2)
            throw ParseError("operator '" + op + "' expects at least 2 arguments");
        ExprPtr acc = args[0];
        for (size_t k = 1; k < args.size(); ++k) acc = f(acc, args[k]);
        return acc;
    };

    if (op == "add") return fold(&Expr::add);
    if (op == "mul") return fold(&Expr::mul);
    if (op == "sub") { need(2); return Expr::sub(args[0], args[1]); }
    if (op == "div") { need(2); return Expr::div(args[0], args[1]); }
    if (op == "sqrt") { need(1); return Expr::sqrt(args[0]); }
    if (op == "exp") { need(1); return Expr::exp(args[0]); }
    if (op == "log") { need(1); return Expr::log(args[0]); }
    if (op == "neg") { need(1); return Expr::sub(Expr::constant(0), args[0]); }
    if (op == "pow") {
        need(2);
        // exponent must be a literal integer
        std::span<const double> none;
        double k;
        try {
            k = args[1]->eval(none);
        } catch (const Error&) {
            throw ParseError("pow exponent must be an integer literal");
        }
        if (k != std::floor(k) || std::abs(k) > 64)
            throw ParseError("pow exponent must be a small integer, got " + fmt_double(k));
        return Expr::pow(args[0], static_cast<int>(k));
    }
    throw ParseError("unknown operator '" + op + "'");
}

}  // namespace

ExprPtr Expr::parse(const std::string& text) {
    Tokenizer tz(text);
    ExprPtr e = parse_expr(tz);
    if (!tz.done()) throw ParseError("trailing input after expression");
    return e;
}

ExprPtr Expr::substituted(const std::vector<ExprPtr>& subs) const {
    switch (kind_) {
        case Kind::Constant:
            return constant(cval_);
        case Kind::Variable:
            if (var_ >= static_cast<int>(subs.size()))
                throw ParseError("substitution does not cover x" + std::to_string(var_ + 1));
            return subs[var_];
        case Kind::Add:
            return add(lhs_->substituted(subs), rhs_->substituted(subs));
        case Kind::Sub:
            return sub(lhs_->substituted(subs), rhs_->substituted(subs));
        case Kind::Mul:
            return mul(lhs_->substituted(subs), rhs_->substituted(subs));
        case Kind::Div:
            return div(lhs_->substituted(subs), rhs_->substituted(subs));
        case Kind::Sqrt:
            return sqrt(lhs_->substituted(subs));
        case Kind::Exp:
            return exp(lhs_->substituted(subs));
        case Kind::Log:
            return log(lhs_->substituted(subs));
        case Kind::Pow:
            return pow(lhs_->substituted(subs), expo_);
    }
    throw ParseError("corrupt expression node");
}

ExprPtr operator+(ExprPtr a, ExprPtr b) { return Expr::add(std::move(a), std::move(b)); }
ExprPtr operator-(ExprPtr a, ExprPtr b) { return Expr::sub(std::move(a), std::move(b)); }
ExprPtr operator*(ExprPtr a, ExprPtr b) { return Expr::mul(std::move(a), std::move(b)); }
ExprPtr operator/(ExprPtr a, ExprPtr b) { return Expr::div(std::move(a), std::move(b)); }
ExprPtr operator+(ExprPtr a, double b) { return Expr::add(std::move(a), Expr::constant(b)); }
ExprPtr operator+(double a, ExprPtr b) { return Expr::add(Expr::constant(a), std::move(b)); }
ExprPtr operator-(ExprPtr a, double b) { return Expr::sub(std::move(a), Expr::constant(b)); }
ExprPtr operator-(double a, ExprPtr b) { return Expr::sub(Expr::constant(a), std::move(b)); }
ExprPtr operator*(ExprPtr a, double b) { return Expr::mul(std::move(a), Expr::constant(b)); }
ExprPtr operator*(double a, ExprPtr b) { return Expr::mul(Expr::constant(a), std::move(b)); }
ExprPtr operator/(ExprPtr a, double b) { return Expr::div(std::move(a), Expr::constant(b)); }
ExprPtr operator/(double a, ExprPtr b) { return Expr::div(Expr::constant(a), std::move(b)); }
ExprPtr operator-(ExprPtr a) { return Expr::sub(Expr::constant(0), std::move(a)); }

ExprPtr compose_affine(const ExprPtr& e, std::span<const double> A, std::span<const double> b,
                       int dim) {
    std::vector<ExprPtr> subs;
    subs.reserve(dim);
    for (int i = 0; i < dim; ++i) {
        ExprPtr row = Expr::constant(b[i]);
        for (int j = 0; j < dim; ++j) {
            if (A[i * dim + j] == 0.0) continue;
            row = row + Expr::constant(A[i * dim + j]) * Expr::variable(j);
        }
        subs.push_back(row);
    }
    return e->substituted(subs);
}

}  // namespace hcap
