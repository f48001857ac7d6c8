#pragma once

// Problem files for the command-line tool.
//
//     # comment
//     [field]
//     p = 5
//     [group]
//     t            (one generator per line, or gens = ["t", "1 - t"])
//     1 - t
//     [variety]
//     x1 + x2 - x3 = 1   (one equation per line, or eq = "...")
//     [options]
//     mode = radical
//
// Statements may also be separated by ';'. Expressions are rational functions in t over
// integer literals with + - * / ^ and parentheses; ^ takes a nonnegative integer literal.
// Equations are linear in x1..xn (affine, x, y, z, w alias x1..x4) or X0..Xn (homogeneous).

#include "sunit/descent.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sunit::cli {

// Syntax error at a 1-based line and column of the input.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message);
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_, column_;
};

// Well-formed input that does not describe a valid problem.
class SemanticError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Expression text and where it starts in the input.
struct SourceText {
    std::string text;
    std::size_t line = 1, column = 1;
};

struct ProblemSpec {
    std::optional<std::uint32_t> p;
    std::vector<SourceText> generators;
    std::vector<SourceText> equations;
    std::optional<std::size_t> n;
    std::optional<SolveMode> mode;
    std::optional<BigInt> height_cap;
    std::optional<unsigned> threads;
    std::optional<std::uint64_t> max_classes;
    std::optional<bool> isotrivial_refine;
};

ProblemSpec parse_problem(const std::string& text);

// A rational function of t; the source position is used in error messages.
RatFunc parse_ratfunc(std::uint32_t p, const SourceText& src);

// Forms (a_0, ..., a_n) of sum a_i X_i = 0, one per equation; n is the largest variable
// index unless given.
Matrix parse_equations(std::uint32_t p, const std::vector<SourceText>& equations, std::optional<std::size_t> n);

SolveMode parse_mode(const std::string& s);
// Decimal digits only; throws ParseError.
BigInt parse_nonnegative(const std::string& s);

struct Problem {
    std::uint32_t p;
    GroupPresentation group;
    std::optional<LinearVariety> variety;
};

// Builds the group and, when equations are present, the variety. Throws SemanticError.
Problem build_problem(const ProblemSpec& spec);

}  // namespace sunit::cli
