#include "sphkep/expr.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <functional>

namespace sphkep {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

using Fn = double (*)(double);
constexpr std::array<std::pair<std::string_view, Fn>, 10> kFunctions{{
    {"sin", [](double x) { return std::sin(x); }},
    {"cos", [](double x) { return std::cos(x); }},
    {"tan", [](double x) { return std::tan(x); }},
    {"asin", [](double x) { return std::asin(x); }},
    {"acos", [](double x) { return std::acos(x); }},
    {"atan", [](double x) { return std::atan(x); }},
    {"sqrt", [](double x) { return std::sqrt(x); }},
    {"abs", [](double x) { return std::abs(x); }},
    {"exp", [](double x) { return std::exp(x); }},
    {"log", [](double x) { return std::log(x); }},
}};

struct Token {
    enum class Kind { kNumber, kIdent, kOperator, kLparen, kRparen, kEnd } kind;
    double number{0.0};
    std::string text;
    char op{0};
    std::size_t pos{0};
};

[[noreturn]] void fail(std::string_view src, std::size_t pos, const std::string& what)
{
    throw InvalidArgument("expression error at position " + std::to_string(pos) + " in \""
                          + std::string(src) + "\": " + what);
}

std::vector<Token> tokenize(std::string_view src)
{
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = src.data() + i;
            char* end = nullptr;
            const double value = std::strtod(begin, &end);
            if (end == begin) {
                fail(src, i, "malformed number");
            }
            out.push_back({Token::Kind::kNumber, value, {}, 0, i});
            i += static_cast<std::size_t>(end - begin);
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size()
                   && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
                ++j;
            }
            out.push_back({Token::Kind::kIdent, 0.0, std::string(src.substr(i, j - i)), 0, i});
            i = j;
            continue;
        }
        if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^') {
            out.push_back({Token::Kind::kOperator, 0.0, {}, c, i});
            ++i;
            continue;
        }
        if (c == '(') {
            out.push_back({Token::Kind::kLparen, 0.0, {}, c, i});
            ++i;
            continue;
        }
        if (c == ')') {
            out.push_back({Token::Kind::kRparen, 0.0, {}, c, i});
            ++i;
            continue;
        }
        fail(src, i, std::string("unexpected character '") + c + "'");
    }
    out.push_back({Token::Kind::kEnd, 0.0, {}, 0, src.size()});
    return out;
}

int variable_index(std::string_view name)
{
    if (name == "t1" || name == "theta1") return 0;
    if (name == "t2" || name == "theta2") return 1;
    if (name == "t12" || name == "theta12") return 2;
    return -1;
}

int function_index(std::string_view name)
{
    for (std::size_t i = 0; i < kFunctions.size(); ++i) {
        if (kFunctions[i].first == name) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

} // namespace

// Recursive descent with precedence climbing; ^ binds tightest and to the
// right, unary minus sits between ^ and the multiplicative level.
Expression Expression::parse(std::string_view source)
{
    Expression expr;
    expr.source_ = std::string(source);
    const std::vector<Token> tokens = tokenize(source);
    std::size_t cursor = 0;

    std::function<void(int)> parse_binary;  // min precedence: 1 add, 2 mul
    std::function<void()> parse_unary;
    std::function<void()> parse_primary;

    auto peek = [&]() -> const Token& { return tokens[cursor]; };
    auto advance = [&]() -> const Token& { return tokens[cursor++]; };

    parse_primary = [&]() {
        const Token& tok = advance();
        switch (tok.kind) {
        case Token::Kind::kNumber:
            expr.program_.push_back({OpCode::kPush, tok.number, 0});
            return;
        case Token::Kind::kIdent: {
            if (tok.text == "pi") {
                expr.program_.push_back({OpCode::kPush, kPi, 0});
                return;
            }
            if (const int var = variable_index(tok.text); var >= 0) {
                expr.program_.push_back({OpCode::kVar, 0.0, var});
                return;
            }
            if (const int fn = function_index(tok.text); fn >= 0) {
                if (peek().kind != Token::Kind::kLparen) {
                    fail(source, peek().pos, "expected '(' after function name");
                }
                ++cursor;
                parse_binary(1);
                if (peek().kind != Token::Kind::kRparen) {
                    fail(source, peek().pos, "expected ')'");
                }
                ++cursor;
                expr.program_.push_back({OpCode::kCall, 0.0, fn});
                return;
            }
            fail(source, tok.pos, "unknown identifier \"" + tok.text + "\"");
        }
        case Token::Kind::kLparen:
            parse_binary(1);
            if (peek().kind != Token::Kind::kRparen) {
                fail(source, peek().pos, "expected ')'");
            }
            ++cursor;
            return;
        default:
            fail(source, tok.pos, "expected a value");
        }
    };

    // unary := ('-' | '+')* power; power := primary ('^' unary)?
    parse_unary = [&]() {
        if (peek().kind == Token::Kind::kOperator && (peek().op == '-' || peek().op == '+')) {
            const char op = advance().op;
            parse_unary();
            if (op == '-') {
                expr.program_.push_back({OpCode::kNeg, 0.0, 0});
            }
            return;
        }
        parse_primary();
        if (peek().kind == Token::Kind::kOperator && peek().op == '^') {
            ++cursor;
            parse_unary();
            expr.program_.push_back({OpCode::kPow, 0.0, 0});
        }
    };

    parse_binary = [&](int min_prec) {
        if (min_prec < 2) {
            parse_binary(2);
            while (peek().kind == Token::Kind::kOperator
                   && (peek().op == '+' || peek().op == '-')) {
                const char op = advance().op;
                parse_binary(2);
                expr.program_.push_back({op == '+' ? OpCode::kAdd : OpCode::kSub, 0.0, 0});
            }
            return;
        }
        parse_unary();
        while (peek().kind == Token::Kind::kOperator && (peek().op == '*' || peek().op == '/')) {
            const char op = advance().op;
            parse_unary();
            expr.program_.push_back({op == '*' ? OpCode::kMul : OpCode::kDiv, 0.0, 0});
        }
    };

    parse_binary(1);
    if (peek().kind != Token::Kind::kEnd) {
        fail(source, peek().pos, "trailing input");
    }
    return expr;
}

double Expression::eval(double t1, double t2, double t12) const
{
    const std::array<double, 3> vars{t1, t2, t12};
    std::array<double, 64> stack;
    std::size_t top = 0;
    auto push = [&](double v) {
        if (top >= stack.size()) {
            throw InvalidArgument("expression evaluation stack overflow");
        }
        stack[top++] = v;
    };
    for (const Op& op : program_) {
        switch (op.code) {
        case OpCode::kPush: push(op.value); break;
        case OpCode::kVar: push(vars[static_cast<std::size_t>(op.arg)]); break;
        case OpCode::kNeg: stack[top - 1] = -stack[top - 1]; break;
        case OpCode::kCall:
            stack[top - 1] = kFunctions[static_cast<std::size_t>(op.arg)].second(stack[top - 1]);
            break;
        default: {
            const double b = stack[--top];
            const double a = stack[top - 1];
            double r = 0.0;
            switch (op.code) {
            case OpCode::kAdd: r = a + b; break;
            case OpCode::kSub: r = a - b; break;
            case OpCode::kMul: r = a * b; break;
            case OpCode::kDiv: r = a / b; break;
            case OpCode::kPow: r = std::pow(a, b); break;
            default: throw InvalidArgument("expression: corrupt program");
            }
            stack[top - 1] = r;
            break;
        }
        }
    }
    if (top != 1) {
        throw InvalidArgument("expression: corrupt program");
    }
    return stack[0];
}

} // namespace sphkep
