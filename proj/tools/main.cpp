// Command-line front end: reads a problem, runs the solver and prints a JSON report.

#include "problem.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

using namespace sunit;
using namespace sunit::cli;
using nlohmann::json;

namespace {

enum ExitCode : int {
    kOk = 0,
    kInternal = 1,
    kUsage = 2,
    kSyntax = 3,
    kSemantic = 4,
    kResource = 5,
    kBoundViolation = 6,
};

// Members above this height are reported by exponents only.
constexpr long kPrintableHeight = 200;

std::string dec(const BigInt& v) { return to_decimal(v); }

json strings(const IntVec& v) {
    json out = json::array();
    for (const auto& x : v) out.push_back(dec(x));
    return out;
}

json matrix_json(const ExpMatrix& m) {
    json out = json::array();
    for (const auto& row : m) out.push_back(strings(row));
    return out;
}

json rat_matrix_json(const RatMatrix& m) {
    json out = json::array();
    for (const auto& row : m) {
        json r = json::array();
        for (const auto& x : row) r.push_back(x.str());
        out.push_back(r);
    }
    return out;
}

json places_json(const std::vector<Place>& places) {
    json out = json::array();
    for (const auto& w : places) out.push_back(w.to_string());
    return out;
}

json point_json(const std::vector<Place>& support, const ExpPoint& x) {
    json coords = json::array();
    for (const auto& m : x.coords) coords.push_back({{"constant", m.constant}, {"exponents", strings(m.exponents)}});
    const BigInt h = point_height(support, x);
    json out{{"coordinates", coords}, {"height", dec(h)}};
    if (h <= kPrintableHeight) {
        json value = json::array();
        for (const auto& c : realize_point(support, x)) value.push_back(c.to_string());
        out["value"] = value;
    }
    return out;
}

json variety_json(const LinearVariety& v) {
    json forms = json::array();
    for (const auto& row : v.forms()) {
        json r = json::array();
        for (const auto& a : row) r.push_back(a.to_string());
        forms.push_back(r);
    }
    return {{"n", v.n()}, {"dim", v.dim()}, {"height", v.height()}, {"forms", forms}};
}

std::string mode_name(SolveMode m) { return m == SolveMode::Radical ? "radical" : "group"; }

json family_json(const std::vector<Place>& support, const FrobeniusFamily& f, std::size_t index) {
    json out{{"index", index}, {"h", f.h()}, {"q", dec(f.q)}, {"mode", mode_name(f.mode)}};
    json subgroup = json::array();
    for (const auto& block : f.subgroup) subgroup.push_back(block);
    out["subgroup"] = subgroup;
    if (f.kind == FamilyKind::Bracket) {
        out["kind"] = "bracket";
        json steps = json::array();
        for (const auto& s : f.steps) steps.push_back(matrix_json(s));
        out["steps"] = steps;
        out["tail"] = point_json(support, f.tail);
    } else {
        out["kind"] = "symmetric";
        json points = json::array();
        for (const auto& pt : f.points) points.push_back({{"exponents", rat_matrix_json(pt.exponents)}, {"constants", pt.constants}});
        out["points"] = points;
    }
    if (!f.congruence.empty()) {
        json cong = json::array();
        for (const auto& c : f.congruence) cong.push_back({{"offset", dec(c.offset)}, {"period", dec(c.period)}});
        out["congruence"] = cong;
    }
    if (f.carrier) out["carrier"] = variety_json(*f.carrier);
    if (f.carrier_witness) {
        json s = json::array();
        for (const auto& x : f.carrier_witness->scalars) s.push_back(x.to_string());
        out["carrier_witness"] = s;
    }
    out["provenance"] = f.provenance;
    return out;
}

json certificate_json(const BoundCertificate& c) {
    json stages = json::array();
    for (const auto& s : c.stages) stages.push_back({{"stage", s.stage}, {"ceiling", dec(s.ceiling)}});
    return {{"n", c.n},
            {"r", c.r},
            {"m", c.m},
            {"q", dec(c.q)},
            {"h_star", dec(c.h_star)},
            {"delta", dec(c.delta)},
            {"psi_const", dec(c.psi_const)},
            {"rho", dec(c.rho)},
            {"eta", dec(c.eta)},
            {"regulator_sq_radical", dec(c.regulator_sq_radical)},
            {"regulator_sq_group", dec(c.regulator_sq_group)},
            {"f", dec(c.f)},
            {"index", dec(c.index)},
            {"stages", stages}};
}

json problem_json(const Problem& pr) {
    json gens = json::array();
    for (const auto& g : pr.group.free_generators) gens.push_back(g.to_string());
    json out{{"p", pr.p}, {"group_basis", gens}};
    if (pr.variety) out["variety"] = variety_json(*pr.variety);
    return out;
}

// Options shared by the problem-based subcommands.
struct Inputs {
    std::string input;
    std::optional<std::uint32_t> p;
    std::vector<std::string> gens, eqs;
    std::optional<std::size_t> n;
    std::string mode;
    std::string height_cap;
    bool isotrivial_refine = false;
    std::optional<unsigned> threads;
    std::optional<std::uint64_t> max_classes;
};

void add_problem_options(CLI::App* cmd, Inputs& in) {
    cmd->add_option("--input", in.input, "problem file, or - for standard input");
    cmd->add_option("--p", in.p, "field characteristic");
    cmd->add_option("--gen", in.gens, "group generator (repeatable)");
    cmd->add_option("--eq", in.eqs, "variety equation (repeatable)");
    cmd->add_option("--n", in.n, "ambient dimension");
}

void add_solver_options(CLI::App* cmd, Inputs& in) {
    cmd->add_option("--mode", in.mode, "radical or group")->check(CLI::IsMember({"radical", "group"}));
    cmd->add_flag("--isotrivial-refine", in.isotrivial_refine, "run the isotrivial refinement");
    cmd->add_option("--threads", in.threads, "solver threads")->check(CLI::PositiveNumber);
    cmd->add_option("--max-classes", in.max_classes, "cap on class tuples per node");
}

ProblemSpec load_spec(const Inputs& in) {
    ProblemSpec spec;
    if (!in.input.empty()) {
        std::stringstream buf;
        if (in.input == "-") {
            buf << std::cin.rdbuf();
        } else {
            std::ifstream f(in.input);
            if (!f) throw SemanticError("cannot read " + in.input);
            buf << f.rdbuf();
        }
        spec = parse_problem(buf.str());
    }
    if (in.p) spec.p = *in.p;
    if (in.n) spec.n = *in.n;
    for (std::size_t i = 0; i < in.gens.size(); ++i) spec.generators.push_back({in.gens[i], 1, 1});
    for (std::size_t i = 0; i < in.eqs.size(); ++i) spec.equations.push_back({in.eqs[i], 1, 1});
    if (!in.mode.empty()) spec.mode = parse_mode(in.mode);
    if (!in.height_cap.empty()) spec.height_cap = parse_nonnegative(in.height_cap);
    if (in.isotrivial_refine) spec.isotrivial_refine = true;
    if (in.threads) spec.threads = *in.threads;
    if (in.max_classes) spec.max_classes = *in.max_classes;
    return spec;
}

SolveOptions solve_options(const ProblemSpec& spec) {
    SolveOptions o;
    o.isotrivial_refine = spec.isotrivial_refine.value_or(false);
    o.threads = spec.threads.value_or(1);
    if (spec.max_classes) o.max_classes = *spec.max_classes;
    return o;
}

const LinearVariety& require_variety(const Problem& pr) {
    if (!pr.variety) throw SemanticError("the problem has no equations");
    return *pr.variety;
}

// Splits a comma-separated list at depth zero, keeping columns.
std::vector<SourceText> split_list(const std::string& s) {
    std::vector<SourceText> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || (s[i] == ',' && depth == 0)) {
            out.push_back({s.substr(start, i - start), 1, start + 1});
            start = i + 1;
        } else if (s[i] == '(') {
            ++depth;
        } else if (s[i] == ')') {
            --depth;
        }
    }
    return out;
}

json run_solve(const Problem& pr, const ProblemSpec& spec, bool symmetric, bool nondegenerate) {
    const LinearVariety& v = require_variety(pr);
    DescentContext ctx(v, pr.group);
    const SolveMode mode = spec.mode.value_or(SolveMode::Radical);
    SolutionSet sol = solve(ctx, mode, solve_options(spec));
    if (nondegenerate) sol.families = theorem3_filter(ctx, sol.families);
    json fams = json::array();
    for (std::size_t i = 0; i < sol.families.size(); ++i) {
        json f = family_json(ctx.support(), sol.families[i], i);
        if (symmetric) f["symmetric"] = family_json(ctx.support(), symmetrize(ctx, sol.families[i]), i);
        fams.push_back(f);
    }
    json isolated = json::array();
    for (const auto& x : sol.isolated) isolated.push_back(point_json(ctx.support(), x));
    json out{{"command", "solve"},
             {"mode", mode_name(mode)},
             {"problem", problem_json(pr)},
             {"support", places_json(ctx.support())},
             {"certificate", certificate_json(sol.certificate)},
             {"family_count", sol.families.size()},
             {"families", fams},
             {"isolated", isolated},
             {"provenance", sol.provenance}};
    if (spec.height_cap) {
        ExpandOptions eo;
        eo.nondegenerate = nondegenerate;
        json members = json::array();
        for (std::size_t i = 0; i < sol.families.size(); ++i)
            for (const auto& x : expand_family(ctx, sol.families[i], *spec.height_cap, eo)) {
                json m = point_json(ctx.support(), x);
                m["family"] = i;
                members.push_back(m);
            }
        out["height_cap"] = dec(*spec.height_cap);
        out["members"] = members;
    }
    return out;
}

json run_expand(const Problem& pr, const ProblemSpec& spec, std::optional<std::size_t> family, bool nondegenerate) {
    if (!spec.height_cap) throw SemanticError("expand needs --height-cap or height_cap in [options]");
    const LinearVariety& v = require_variety(pr);
    DescentContext ctx(v, pr.group);
    const SolveMode mode = spec.mode.value_or(SolveMode::Radical);
    SolutionSet sol = solve(ctx, mode, solve_options(spec));
    if (nondegenerate) sol.families = theorem3_filter(ctx, sol.families);
    if (family && *family >= sol.families.size())
        throw SemanticError("family " + std::to_string(*family) + " does not exist; there are " +
                            std::to_string(sol.families.size()));
    ExpandOptions eo;
    eo.nondegenerate = nondegenerate;
    json members = json::array();
    std::set<ExpPoint> distinct;
    for (std::size_t i = 0; i < sol.families.size(); ++i) {
        if (family && *family != i) continue;
        for (const auto& x : expand_family(ctx, sol.families[i], *spec.height_cap, eo)) {
            json m = point_json(ctx.support(), x);
            m["family"] = i;
            members.push_back(m);
            distinct.insert(x);
        }
    }
    return {{"command", "expand"},
            {"mode", mode_name(mode)},
            {"problem", problem_json(pr)},
            {"support", places_json(ctx.support())},
            {"certificate", certificate_json(sol.certificate)},
            {"height_cap", dec(*spec.height_cap)},
            {"members", members},
            {"distinct_points", distinct.size()}};
}

json run_verify(const Problem& pr, const ProblemSpec& spec, const std::string& point) {
    const LinearVariety& v = require_variety(pr);
    Vec x;
    for (const auto& src : split_list(point)) x.push_back(parse_ratfunc(pr.p, src));
    if (x.size() != v.n())
        throw SemanticError("the point has " + std::to_string(x.size()) + " coordinates; expected " + std::to_string(v.n()));
    const SolveMode mode = spec.mode.value_or(SolveMode::Group);
    std::optional<RadicalData> rad;
    if (mode == SolveMode::Radical) rad = radical(pr.group);
    const GroupPresentation& g = rad ? rad->radical : pr.group;
    const PointCertificate c = verify_point(v, g, x);
    json coords = json::array();
    for (const auto& a : x) coords.push_back(a.to_string());
    std::vector<bool> in_group = c.in_group;
    return {{"command", "verify"},
            {"mode", mode_name(mode)},
            {"problem", problem_json(pr)},
            {"point", coords},
            {"height", proj_height([&] {
                 Vec h{RatFunc::constant(pr.p, 1)};
                 h.insert(h.end(), x.begin(), x.end());
                 return h;
             }())},
            {"on_variety", c.on_variety},
            {"in_group", in_group},
            {"passed", c.passed()}};
}

json run_bounds(const Problem& pr, const ProblemSpec& spec, const std::string& q_text) {
    const LinearVariety& v = require_variety(pr);
    const SolveMode mode = spec.mode.value_or(SolveMode::Radical);
    BoundCertificate cert;
    if (!q_text.empty()) {
        cert = bound_certificate(v, pr.group, parse_nonnegative(q_text));
    } else {
        DescentContext ctx(v, pr.group);
        cert = solve(ctx, mode, solve_options(spec)).certificate;
    }
    return {{"command", "bounds"}, {"mode", mode_name(mode)}, {"problem", problem_json(pr)}, {"certificate", certificate_json(cert)}};
}

json run_group_info(const Problem& pr) {
    const auto& g = pr.group;
    const RadicalData rd = radical(g);
    json rad_gens = json::array();
    for (const auto& x : rd.radical.free_generators) rad_gens.push_back(x.to_string());
    json gens = json::array();
    for (const auto& x : g.free_generators) gens.push_back(x.to_string());
    return {{"command", "group-info"},
            {"p", pr.p},
            {"support", places_json(g.support)},
            {"finite_support", places_json(g.finite_support)},
            {"rank", g.rank()},
            {"basis", gens},
            {"constant_order", g.constant_order},
            {"regulator_sq", dec(regulator_sq(g))},
            {"radical",
             {{"basis", rad_gens},
              {"rank", rd.radical.rank()},
              {"constant_order", rd.radical.constant_order},
              {"regulator_sq", dec(regulator_sq(rd.radical))}}},
            {"elementary_divisors", strings(rd.elementary_divisors)},
            {"constant_divisor", dec(rd.constant_divisor)},
            {"index", dec(rd.index)}};
}

json run_congruence(const std::string& q_text, const std::vector<std::string>& constraints) {
    const BigInt q = parse_nonnegative(q_text);
    std::vector<CongruenceConstraint> cons;
    json cons_json = json::array();
    for (const auto& c : constraints) {
        std::vector<BigInt> parts;
        std::stringstream ss(c);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item.erase(0, item.find_first_not_of(' '));
            item.erase(item.find_last_not_of(' ') + 1);
            const bool neg = !item.empty() && item[0] == '-';
            const std::string digits = neg ? item.substr(1) : item;
            if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
                throw ParseError(1, 1, "constraint '" + c + "' must be three integers L,M,N");
            parts.push_back(neg ? BigInt(-BigInt(digits)) : BigInt(digits));
        }
        if (parts.size() != 3) throw ParseError(1, 1, "constraint '" + c + "' must be three integers L,M,N");
        if (parts[2] <= 0) throw SemanticError("modulus in '" + c + "' must be positive");
        cons.push_back({parts[0], parts[1], parts[2]});
        cons_json.push_back({{"L", dec(parts[0])}, {"M", dec(parts[1])}, {"N", dec(parts[2])}});
    }
    const CongruenceSolution s = congruence_solve(q, cons);
    json exc = json::array(), off = json::array();
    for (const auto& e : s.exceptional) exc.push_back(dec(e));
    for (const auto& o : s.offsets) off.push_back(dec(o));
    return {{"command", "congruence"},
            {"Q", dec(q)},
            {"constraints", cons_json},
            {"finite", s.finite},
            {"exceptional", exc},
            {"start", dec(s.start)},
            {"period", dec(s.period)},
            {"offsets", off}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Solver for unit equations on linear varieties over F_p(t)"};
    app.require_subcommand(1);
    Inputs in;
    bool symmetric = false, nondegenerate = false;
    std::optional<std::size_t> family;
    std::string point, q_text;
    std::vector<std::string> constraints;

    auto* solve_cmd = app.add_subcommand("solve", "families of solutions with the bound certificate");
    auto* verify_cmd = app.add_subcommand("verify", "check one point");
    auto* expand_cmd = app.add_subcommand("expand", "family members up to a height cap");
    auto* bounds_cmd = app.add_subcommand("bounds", "bound certificate only");
    auto* info_cmd = app.add_subcommand("group-info", "support, regulator and radical of the group");
    auto* cong_cmd = app.add_subcommand("congruence", "solve L Q^e = M (mod N) for e");

    for (auto* cmd : {solve_cmd, verify_cmd, expand_cmd, bounds_cmd, info_cmd}) add_problem_options(cmd, in);
    for (auto* cmd : {solve_cmd, verify_cmd, expand_cmd, bounds_cmd}) add_solver_options(cmd, in);
    for (auto* cmd : {solve_cmd, expand_cmd}) {
        cmd->add_option("--height-cap", in.height_cap, "list members up to this projective height");
        cmd->add_flag("--nondegenerate", nondegenerate, "keep point families and drop members with vanishing subsums");
    }
    solve_cmd->add_flag("--symmetrize", symmetric, "add the symmetric form of each family");
    expand_cmd->add_option("--family", family, "expand only this family index");
    verify_cmd->add_option("--point", point, "affine coordinates, comma separated")->required();
    bounds_cmd->add_option("--q", q_text, "Frobenius power for the certificate (default: from the solver)");
    cong_cmd->add_option("--Q", q_text, "base Q")->required();
    cong_cmd->add_option("--constraint", constraints, "L,M,N (repeatable)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        json report;
        if (cong_cmd->parsed()) {
            report = run_congruence(q_text, constraints);
        } else {
            const ProblemSpec spec = load_spec(in);
            const Problem pr = build_problem(spec);
            if (solve_cmd->parsed()) report = run_solve(pr, spec, symmetric, nondegenerate);
            else if (verify_cmd->parsed()) report = run_verify(pr, spec, point);
            else if (expand_cmd->parsed()) report = run_expand(pr, spec, family, nondegenerate);
            else if (bounds_cmd->parsed()) report = run_bounds(pr, spec, q_text);
            else report = run_group_info(pr);
        }
        std::cout << report.dump(2) << "\n";
        return kOk;
    } catch (const ParseError& e) {
        std::cerr << "syntax error: " << e.what() << "\n";
        return kSyntax;
    } catch (const SemanticError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kSemantic;
    } catch (const MathError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kSemantic;
    } catch (const ResourceError& e) {
        std::cerr << "resource limit: " << e.what() << "\n";
        return kResource;
    } catch (const BoundViolation& e) {
        std::cerr << "bound violation: " << e.what() << "\n";
        return kBoundViolation;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
}
