// sphkep/expr.hpp
//
// Tiny arithmetic expression evaluator for user-supplied invariant
// candidates. Grammar: + - * / ^ with the usual precedence, parentheses,
// unary minus, the variables t1 t2 t12 (aliases theta1 theta2 theta12), the
// constant pi, and the one-argument functions sin cos tan asin acos atan
// sqrt abs exp log.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sphkep/errors.hpp"

namespace sphkep {

class Expression {
public:
    /// Compile the source into an evaluable program.
    /// @throws InvalidArgument on any syntax error, with position info.
    [[nodiscard]] static Expression parse(std::string_view source);

    /// Evaluate with the three triangle variables bound.
    [[nodiscard]] double eval(double t1, double t2, double t12) const;

    [[nodiscard]] const std::string& source() const noexcept { return source_; }

private:
    enum class OpCode : std::uint8_t {
        kPush,  // push constant
        kVar,   // push variable [arg: 0 = t1, 1 = t2, 2 = t12]
        kAdd,
        kSub,
        kMul,
        kDiv,
        kPow,
        kNeg,
        kCall,  // 1-argument function [arg: function index]
    };

    struct Op {
        OpCode code;
        double value{0.0};
        int arg{0};
    };

    std::string source_;
    std::vector<Op> program_;
};

} // namespace sphkep
