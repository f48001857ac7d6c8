#include "problem.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <map>

namespace sunit::cli {

namespace {

constexpr std::uint64_t kMaxLiteralExponent = 1000000;

std::string at(std::size_t line, std::size_t column) {
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

enum class VarKind { None, Affine, Homogeneous };

// Linear combination constant + sum_i vars[i] * X_i.
struct LinearValue {
    RatFunc constant;
    std::map<std::size_t, RatFunc> vars;

    bool is_constant() const { return vars.empty(); }
};

LinearValue scaled(LinearValue v, const RatFunc& c) {
    v.constant *= c;
    for (auto& [i, a] : v.vars) a *= c;
    return v;
}

LinearValue combined(LinearValue a, const LinearValue& b, bool subtract) {
    if (subtract) a.constant -= b.constant;
    else a.constant += b.constant;
    for (const auto& [i, x] : b.vars) {
        auto it = a.vars.try_emplace(i, RatFunc(x.p())).first;
        if (subtract) it->second -= x;
        else it->second += x;
    }
    return a;
}

class ExpressionParser {
public:
    ExpressionParser(std::uint32_t p, const SourceText& src, bool allow_variables)
        : p_(p), src_(src), allow_vars_(allow_variables) {}

    LinearValue parse_expression_only() {
        LinearValue v = expression();
        skip_space();
        if (pos_ < text().size()) fail("unexpected '" + std::string(1, text()[pos_]) + "'");
        return v;
    }

    // lhs = rhs, or an expression equal to zero.
    LinearValue parse_equation() {
        LinearValue lhs = expression();
        skip_space();
        if (pos_ < text().size() && text()[pos_] == '=') {
            ++pos_;
            LinearValue rhs = expression();
            skip_space();
            if (pos_ < text().size()) fail("unexpected '" + std::string(1, text()[pos_]) + "'");
            return combined(lhs, rhs, true);
        }
        if (pos_ < text().size()) fail("unexpected '" + std::string(1, text()[pos_]) + "'");
        return lhs;
    }

    VarKind kind() const { return kind_; }

private:
    const std::string& text() const { return src_.text; }

    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError(src_.line, src_.column + std::min(pos_, text().size()), message);
    }
    [[noreturn]] void semantic(std::size_t pos, const std::string& message) const {
        throw SemanticError(at(src_.line, src_.column + pos) + ": " + message);
    }

    void skip_space() {
        while (pos_ < text().size() && std::isspace(static_cast<unsigned char>(text()[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text().size() && text()[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= text().size()) fail(std::string("expected '") + c + "' before end of input");
            fail(std::string("expected '") + c + "'");
        }
    }

    LinearValue constant(const RatFunc& x) const { return LinearValue{x, {}}; }

    LinearValue expression() {
        LinearValue v = term();
        while (true) {
            if (accept('+')) v = combined(v, term(), false);
            else if (accept('-')) v = combined(v, term(), true);
            else return v;
        }
    }

    LinearValue term() {
        LinearValue v = unary();
        while (true) {
            skip_space();
            const std::size_t op = pos_;
            if (accept('*')) {
                LinearValue w = unary();
                if (v.is_constant()) v = scaled(w, v.constant);
                else if (w.is_constant()) v = scaled(v, w.constant);
                else semantic(op, "product of two variable terms; equations must be linear");
            } else if (accept('/')) {
                LinearValue w = unary();
                if (!w.is_constant()) semantic(op, "division by a variable term");
                if (w.constant.is_zero()) semantic(op, "division by zero");
                v = scaled(v, RatFunc::constant(p_, 1) / w.constant);
            } else {
                return v;
            }
        }
    }

    LinearValue unary() {
        if (accept('-')) return scaled(unary(), RatFunc::constant(p_, -1));
        if (accept('+')) return unary();
        return power();
    }

    LinearValue power() {
        LinearValue base = primary();
        skip_space();
        const std::size_t op = pos_;
        if (!accept('^')) return base;
        const bool paren = accept('(');
        skip_space();
        const std::size_t epos = pos_;
        if (pos_ >= text().size() || !std::isdigit(static_cast<unsigned char>(text()[pos_])))
            fail("exponent must be a nonnegative integer literal");
        const BigInt e = integer();
        if (paren) expect(')');
        if (!base.is_constant()) semantic(op, "power of a variable term");
        if (e > kMaxLiteralExponent) semantic(epos, "exponent " + to_decimal(e) + " exceeds " + std::to_string(kMaxLiteralExponent));
        return constant(base.constant.pow(e.convert_to<std::int64_t>()));
    }

    BigInt integer() {
        std::string digits;
        while (pos_ < text().size() && std::isdigit(static_cast<unsigned char>(text()[pos_]))) digits += text()[pos_++];
        return BigInt(digits);
    }

    LinearValue primary() {
        skip_space();
        if (pos_ >= text().size()) fail("unexpected end of expression");
        const char ch = text()[pos_];
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            const BigInt v = integer();
            return constant(RatFunc::constant(p_, static_cast<std::int64_t>(mod_floor(v, BigInt(p_)))));
        }
        if (std::isalpha(static_cast<unsigned char>(ch))) {
            const std::size_t start = pos_;
            std::string name;
            while (pos_ < text().size() && std::isalnum(static_cast<unsigned char>(text()[pos_]))) name += text()[pos_++];
            if (name == "t") return constant(RatFunc::t(p_));
            return variable(name, start);
        }
        if (accept('(')) {
            LinearValue v = expression();
            expect(')');
            return v;
        }
        fail("unexpected '" + std::string(1, ch) + "'");
    }

    LinearValue variable(const std::string& name, std::size_t start) {
        static const std::map<std::string, std::size_t> aliases{{"x", 1}, {"y", 2}, {"z", 3}, {"w", 4}};
        VarKind kind = VarKind::None;
        std::size_t index = 0;
        if (auto it = aliases.find(name); it != aliases.end()) {
            kind = VarKind::Affine;
            index = it->second;
        } else if ((name[0] == 'x' || name[0] == 'X') && name.size() > 1 &&
                   std::all_of(name.begin() + 1, name.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
            if (name.size() > 7) semantic(start, "variable index too large in '" + name + "'");
            kind = name[0] == 'x' ? VarKind::Affine : VarKind::Homogeneous;
            index = std::stoul(name.substr(1));
            if (kind == VarKind::Affine && index == 0) semantic(start, "affine variables start at x1");
        } else {
            pos_ = start;
            fail("unknown identifier '" + name + "'");
        }
        if (!allow_vars_) semantic(start, "variable '" + name + "' in a constant expression");
        if (kind_ != VarKind::None && kind_ != kind) semantic(start, "mixes affine x_i and homogeneous X_i variables");
        kind_ = kind;
        LinearValue v{RatFunc(p_), {}};
        v.vars.emplace(index, RatFunc::constant(p_, 1));
        return v;
    }

    std::uint32_t p_;
    const SourceText& src_;
    bool allow_vars_;
    std::size_t pos_ = 0;
    VarKind kind_ = VarKind::None;
};

// --- problem files ---------------------------------------------------------------------

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

struct Statement {
    std::string text;
    std::size_t line, column;  // of the first character of text
};

// Splits on newlines and on ';' outside quotes, dropping comments.
std::vector<Statement> statements(const std::string& input) {
    std::vector<Statement> out;
    std::size_t line = 1, column = 1;
    std::string current;
    std::size_t start_col = 1;
    bool quoted = false, comment = false;
    auto flush = [&] {
        const auto lead = current.find_first_not_of(" \t\r");
        if (lead != std::string::npos) out.push_back({trim(current), line, start_col + lead});
        current.clear();
    };
    for (char ch : input) {
        if (ch == '\n') {
            if (quoted) throw ParseError(line, column, "unterminated string");
            flush();
            ++line;
            column = 1;
            start_col = 1;
            comment = false;
            continue;
        }
        if (!comment) {
            if (ch == '"') quoted = !quoted;
            if (!quoted && ch == '#') comment = true;
            else if (!quoted && ch == ';') {
                flush();
                start_col = column + 1;
            } else {
                current += ch;
            }
        }
        ++column;
    }
    if (quoted) throw ParseError(line, column, "unterminated string");
    flush();
    return out;
}

// A value: "quoted", ["a", "b"] or raw text to the end of the statement.
std::vector<SourceText> parse_value(const std::string& text, std::size_t line, std::size_t column) {
    std::size_t i = 0;
    auto skip = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    auto quoted = [&]() -> SourceText {
        const std::size_t open = i++;
        const auto close = text.find('"', i);
        if (close == std::string::npos) throw ParseError(line, column + open, "unterminated string");
        SourceText s{text.substr(i, close - i), line, column + i};
        i = close + 1;
        return s;
    };
    skip();
    std::vector<SourceText> out;
    if (i < text.size() && text[i] == '[') {
        ++i;
        skip();
        if (i < text.size() && text[i] == ']') {
            ++i;
        } else {
            while (true) {
                skip();
                if (i >= text.size() || text[i] != '"') throw ParseError(line, column + i, "expected a quoted string in the list");
                out.push_back(quoted());
                skip();
                if (i < text.size() && text[i] == ',') {
                    ++i;
                    continue;
                }
                if (i < text.size() && text[i] == ']') {
                    ++i;
                    break;
                }
                throw ParseError(line, column + i, "expected ',' or ']'");
            }
        }
    } else if (i < text.size() && text[i] == '"') {
        out.push_back(quoted());
    } else {
        if (i >= text.size()) throw ParseError(line, column + i, "missing value");
        out.push_back({trim(text.substr(i)), line, column + i});
        i = text.size();
    }
    skip();
    if (i < text.size()) throw ParseError(line, column + i, "unexpected text after the value");
    return out;
}

BigInt parse_integer(const SourceText& s, const std::string& key) {
    const std::string v = trim(s.text);
    if (v.empty() || !std::all_of(v.begin(), v.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        throw ParseError(s.line, s.column, key + " must be a nonnegative integer");
    return BigInt(v);
}

template <class T>
T bounded_integer(const SourceText& s, const std::string& key) {
    const BigInt v = parse_integer(s, key);
    if (v > std::numeric_limits<T>::max()) throw SemanticError(at(s.line, s.column) + ": " + key + " is too large");
    return v.convert_to<T>();
}

bool parse_bool(const SourceText& s, const std::string& key) {
    const std::string v = trim(s.text);
    if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "off" || v == "no") return false;
    throw ParseError(s.line, s.column, key + " must be true or false");
}

bool is_identifier(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

}  // namespace

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error(at(line, column) + ": " + message), line_(line), column_(column) {}

SolveMode parse_mode(const std::string& s) {
    if (s == "radical") return SolveMode::Radical;
    if (s == "group") return SolveMode::Group;
    throw SemanticError("mode must be radical or group, not '" + s + "'");
}

BigInt parse_nonnegative(const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError(1, 1, "'" + s + "' is not a nonnegative integer");
    return BigInt(s);
}

ProblemSpec parse_problem(const std::string& text) {
    enum class Section { None, Field, Group, Variety, Options };
    static const std::map<std::string, Section> sections{
        {"field", Section::Field}, {"group", Section::Group}, {"variety", Section::Variety}, {"options", Section::Options}};
    ProblemSpec spec;
    Section section = Section::None;
    std::map<std::string, std::size_t> seen;
    for (const auto& st : statements(text)) {
        if (st.text.front() == '[' && st.text.find('"') == std::string::npos) {
            if (st.text.back() != ']') throw ParseError(st.line, st.column + st.text.size(), "expected ']'");
            const std::string name = trim(st.text.substr(1, st.text.size() - 2));
            auto it = sections.find(name);
            if (it == sections.end()) throw ParseError(st.line, st.column + 1, "unknown section '" + name + "'");
            section = it->second;
            continue;
        }
        const auto eq = st.text.find('=');
        const std::string key = eq == std::string::npos ? "" : trim(st.text.substr(0, eq));
        static const std::vector<std::string> keys{"p", "n", "gens", "gen", "generators", "eq", "eqs", "equations", "mode",
                                                   "height_cap", "threads", "max_classes", "isotrivial_refine"};
        if (is_identifier(key) && std::find(keys.begin(), keys.end(), key) != keys.end()) {
            const auto values = parse_value(st.text.substr(eq + 1), st.line, st.column + eq + 1);
            const bool list_key = key == "gens" || key == "gen" || key == "generators" || key == "eq" || key == "eqs" ||
                                  key == "equations";
            if (!list_key) {
                if (values.size() != 1) throw ParseError(st.line, st.column + eq + 1, key + " takes a single value");
                if (seen.count(key)) throw ParseError(st.line, st.column, "duplicate key '" + key + "'");
                seen[key] = st.line;
            }
            const SourceText v = values.empty() ? SourceText{} : values.front();
            if (key == "p") spec.p = bounded_integer<std::uint32_t>(v, key);
            else if (key == "n") spec.n = bounded_integer<std::uint32_t>(v, key);
            else if (key == "gens" || key == "gen" || key == "generators")
                spec.generators.insert(spec.generators.end(), values.begin(), values.end());
            else if (key == "eq" || key == "eqs" || key == "equations")
                spec.equations.insert(spec.equations.end(), values.begin(), values.end());
            else if (key == "mode") {
                try {
                    spec.mode = parse_mode(trim(v.text));
                } catch (const SemanticError& e) {
                    throw ParseError(v.line, v.column, e.what());
                }
            } else if (key == "height_cap") spec.height_cap = parse_integer(v, key);
            else if (key == "threads") spec.threads = bounded_integer<unsigned>(v, key);
            else if (key == "max_classes") spec.max_classes = bounded_integer<std::uint64_t>(v, key);
            else if (key == "isotrivial_refine") spec.isotrivial_refine = parse_bool(v, key);
            continue;
        }
        switch (section) {
        case Section::Group:
            spec.generators.push_back({st.text, st.line, st.column});
            break;
        case Section::Variety:
            spec.equations.push_back({st.text, st.line, st.column});
            break;
        default:
            if (eq != std::string::npos && is_identifier(key))
                throw ParseError(st.line, st.column, "unknown key '" + key + "'");
            throw ParseError(st.line, st.column, "statement outside the [group] and [variety] sections");
        }
    }
    return spec;
}

RatFunc parse_ratfunc(std::uint32_t p, const SourceText& src) {
    ExpressionParser parser(p, src, false);
    return parser.parse_expression_only().constant;
}

Matrix parse_equations(std::uint32_t p, const std::vector<SourceText>& equations, std::optional<std::size_t> n) {
    std::vector<LinearValue> values;
    VarKind kind = VarKind::None;
    std::size_t max_index = 0;
    for (const auto& src : equations) {
        ExpressionParser parser(p, src, true);
        LinearValue v = parser.parse_equation();
        if (parser.kind() != VarKind::None) {
            if (kind != VarKind::None && kind != parser.kind())
                throw SemanticError(at(src.line, src.column) + ": equations mix affine and homogeneous variables");
            kind = parser.kind();
        }
        for (auto it = v.vars.begin(); it != v.vars.end();) it = it->second.is_zero() ? v.vars.erase(it) : std::next(it);
        if (v.vars.empty())
            throw SemanticError(at(src.line, src.column) + (v.constant.is_zero() ? ": equation is trivial" : ": equation has no solutions"));
        if (kind == VarKind::Homogeneous && !v.constant.is_zero())
            throw SemanticError(at(src.line, src.column) + ": constant term in a homogeneous equation");
        max_index = std::max(max_index, v.vars.rbegin()->first);
        values.push_back(std::move(v));
    }
    const std::size_t dim = n.value_or(max_index);
    if (dim == 0) throw SemanticError("the ambient dimension must be at least 1");
    if (max_index > dim) throw SemanticError("variable index " + std::to_string(max_index) + " exceeds n = " + std::to_string(dim));
    Matrix forms;
    for (const auto& v : values) {
        Vec row(dim + 1, RatFunc(p));
        row[0] = v.constant;
        for (const auto& [i, a] : v.vars) row[i] += a;
        forms.push_back(std::move(row));
    }
    return forms;
}

Problem build_problem(const ProblemSpec& spec) {
    if (!spec.p) throw SemanticError("missing p");
    const std::uint32_t p = *spec.p;
    std::optional<FieldContext> field;
    try {
        field.emplace(p);
    } catch (const MathError& e) {
        throw SemanticError(e.what());
    }
    if (spec.generators.empty()) throw SemanticError("the group has no generators");
    std::vector<RatFunc> gens;
    for (const auto& src : spec.generators) {
        RatFunc g = parse_ratfunc(p, src);
        if (g.is_zero()) throw SemanticError(at(src.line, src.column) + ": generator is zero");
        gens.push_back(std::move(g));
    }
    Problem out{p, GroupPresentation{}, std::nullopt};
    try {
        out.group = build_group(gens, *field);
    } catch (const MathError& e) {
        throw SemanticError(std::string("invalid group: ") + e.what());
    }
    if (!spec.equations.empty()) {
        const Matrix forms = parse_equations(p, spec.equations, spec.n);
        const std::size_t n = forms.front().size() - 1;
        try {
            out.variety.emplace(p, n, forms);
        } catch (const MathError& e) {
            throw SemanticError(std::string("inconsistent equations: ") + e.what());
        }
    } else if (spec.n) {
        throw SemanticError("n is given without equations");
    }
    return out;
}

}  // namespace sunit::cli
