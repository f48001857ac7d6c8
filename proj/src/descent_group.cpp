#include "descent_internal.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace sunit {

using namespace detail;

namespace {

constexpr std::size_t kMaxGroupFamilies = 200000;

unsigned valuation(BigInt n, const BigInt& p) {
    unsigned v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

struct GroupRaw {
    const FrobeniusFamily* source;
    std::vector<Bracket> brackets;
    ExpPoint tail;
    std::vector<IndexSpec> specs;
};

class GroupDescent {
public:
    GroupDescent(const DescentContext& ctx, const BigInt& Q) : ctx_(ctx), Q_(Q), p_(ctx.p()) {
        const auto& rd = ctx.radical_data();
        const auto& g = ctx.group();
        const std::size_t f = ctx.support().size();
        aligned_ = Lattice(rd.aligned_basis, f);
        divisors_ = rd.elementary_divisors;
        D_ = 1;
        for (const auto& d : divisors_) D_ = big_lcm(D_, d);
        m0_ = BigInt((p_ - 1) / g.constant_order);
        K_ = (Q_ - 1) * D_;
        for (std::size_t i = 0; i < rd.aligned_basis.size(); ++i) {
            IntVec v = rd.aligned_basis[i];
            for (auto& x : v) x *= divisors_[i];
            auto e = g.lattice.coords(v);
            if (!e) throw MathError("aligned basis does not match the group lattice");
            Residue kappa = element_coords(GroupElement{*e, 1}, g).constant;
            nu_.push_back(BigInt(discrete_log(kappa, p_)));
        }
        M_ = (Q_ - 1) * D_ * (p_ - 1);
        const BigInt mm = (Q_ - 1) * M_;
        unsigned a = valuation(Q_, p_);
        pre_ = (valuation(mm, p_) + a - 1) / a;
        BigInt rest = mm;
        while (rest % p_ == 0) rest /= p_;
        period_ = order_mod(Q_, rest);
    }

    // Aligned coordinates of test rows.
    std::vector<IntVec> aligned(const ExpMatrix& rows) const {
        std::vector<IntVec> out;
        for (const auto& r : rows) {
            auto c = aligned_.coords(r);
            if (!c) throw MathError("family member leaves the radical");
            out.push_back(*c);
        }
        return out;
    }

    void descend(const FrobeniusFamily& fam, std::vector<GroupRaw>& out) const {
        if (fam.kind != FamilyKind::Bracket) throw MathError("group descent needs bracket families");
        const std::size_t n = fam.tail.coords.size();
        const auto tests = test_vectors(n, fam.subgroup);
        const BlockNormalizer norm(n, fam.subgroup);
        std::vector<Bracket> brackets;
        for (const auto& s : fam.steps) brackets.push_back(Bracket{norm.apply(s), fam.q});
        const ExpPoint tail = norm.apply(fam.tail, p_);
        const std::size_t h = brackets.size();
        if (h == 0) {
            if (coset_meets_group(ctx_, fam.tail, fam.subgroup)) out.push_back(GroupRaw{&fam, {}, tail, {}});
            return;
        }
        const auto consts = test_constants(tests, tail, p_);
        std::vector<BigInt> logc;
        for (auto c : consts) logc.push_back(BigInt(discrete_log(c, p_)));
        std::vector<std::vector<IntVec>> phi;
        for (const auto& b : brackets) phi.push_back(aligned(apply_tests(tests, b.phi)));
        const auto tail_al = aligned(apply_tests(tests, exponents_of(tail)));

        // States of the inner indices.
        std::vector<IndexSpec> states;
        for (BigInt k = 0; k < pre_; ++k) states.push_back({k, 0});
        for (BigInt r = 0; r < period_; ++r) states.push_back({pre_ + r, period_});
        std::uint64_t combos = 1;
        for (std::size_t i = 1; i < h; ++i) {
            combos *= states.size();
            if (combos > kMaxGroupFamilies) throw ResourceError("too many inner index states in the group descent");
        }
        std::vector<std::size_t> pick(h - 1, 0);
        for (std::uint64_t idx = 0; idx < combos; ++idx) {
            std::uint64_t x = idx;
            for (auto& s : pick) {
                s = x % states.size();
                x /= states.size();
            }
            // Inner member Z modulo M in aligned coordinates.
            auto z = tail_al;
            for (std::size_t i = h; i-- > 1;) {
                const BigInt k = states[pick[i - 1]].offset;
                const BigInt qk = big_powmod(Q_, k, M_);
                const BigInt geo = (mod_floor(big_powmod(Q_, k, (Q_ - 1) * M_) - 1, (Q_ - 1) * M_)) / (Q_ - 1);
                for (std::size_t t = 0; t < z.size(); ++t)
                    for (std::size_t w = 0; w < z[t].size(); ++w)
                        z[t][w] = mod_floor(phi[i][t][w] * geo + qk * z[t][w], M_);
            }
            std::vector<CongruenceConstraint> cons;
            for (std::size_t t = 0; t < tests.size(); ++t) {
                BigInt c1 = 0, c0 = K_ * logc[t];
                for (std::size_t w = 0; w < divisors_.size(); ++w) {
                    const BigInt y1 = (Q_ - 1) * z[t][w] + phi[0][t][w];
                    const BigInt y0 = phi[0][t][w];
                    cons.push_back({y1, y0, (Q_ - 1) * divisors_[w]});
                    c1 += nu_[w] * (D_ / divisors_[w]) * y1;
                    c0 += nu_[w] * (D_ / divisors_[w]) * y0;
                }
                cons.push_back({c1, c0, K_ * m0_});
            }
            const CongruenceSolution sol = congruence_solve(Q_, cons);
            std::vector<IndexSpec> firsts;
            for (const auto& e : sol.exceptional) firsts.push_back({e, 0});
            for (const auto& o : sol.offsets) firsts.push_back({o, sol.period});
            for (const auto& first : firsts) {
                GroupRaw raw{&fam, brackets, tail, {first}};
                for (auto s : pick) raw.specs.push_back(states[s]);
                out.push_back(std::move(raw));
                if (out.size() > kMaxGroupFamilies) throw ResourceError("too many group families");
            }
        }
    }

private:
    const DescentContext& ctx_;
    BigInt Q_;
    std::uint32_t p_;
    Lattice aligned_;
    IntVec divisors_;
    std::vector<BigInt> nu_;
    BigInt D_, m0_, K_, M_, pre_, period_;
};

}  // namespace

SolutionSet descend_to_G(const DescentContext& ctx, const SolutionSet& radical_solution) {
    if (radical_solution.mode != SolveMode::Radical) throw MathError("group descent starts from a radical solution");
    const BigInt Q = radical_solution.certificate.q;
    GroupDescent gd(ctx, Q);
    std::vector<GroupRaw> raws;
    for (const auto& fam : radical_solution.families) {
        if (fam.q != Q) throw MathError("radical families do not share q");
        gd.descend(fam, raws);
    }

    BigInt f = 1;
    for (const auto& raw : raws)
        for (const auto& s : raw.specs)
            if (s.period != 0) f = big_lcm(f, s.period);
    const BigInt Qf = big_pow(Q, f.convert_to<std::uint64_t>());

    std::vector<FrobeniusFamily> families;
    for (const auto& raw : raws) {
        std::vector<BigInt> copies;
        for (const auto& s : raw.specs) copies.push_back(s.period == 0 ? BigInt(1) : f / s.period);
        std::vector<BigInt> j(raw.specs.size(), 0);
        while (true) {
            std::vector<IndexSpec> specs;
            std::vector<IndexConstraint> origin;
            for (std::size_t i = 0; i < raw.specs.size(); ++i) {
                const auto& s = raw.specs[i];
                if (s.period == 0) {
                    specs.push_back(s);
                    origin.push_back({s.offset, 0});
                } else {
                    specs.push_back({s.offset + j[i] * s.period, f});
                    origin.push_back({s.offset + j[i] * s.period, f});
                }
            }
            Reindexed r = reindex(raw.brackets, raw.tail, specs, Qf);
            FrobeniusFamily fam;
            fam.mode = SolveMode::Group;
            fam.q = Qf;
            for (const auto& b : r.brackets) fam.steps.push_back(b.phi);
            fam.tail = r.tail;
            fam.subgroup = raw.source->subgroup;
            fam.congruence = origin;
            fam.carrier = raw.source->carrier;
            fam.carrier_witness = raw.source->carrier_witness;
            fam.provenance = raw.source->provenance;
            families.push_back(std::move(fam));
            if (families.size() > kMaxGroupFamilies) throw ResourceError("too many group families");
            std::size_t i = 0;
            while (i < j.size() && ++j[i] == copies[i]) j[i++] = 0;
            if (i == j.size()) break;
        }
    }
    std::stable_sort(families.begin(), families.end(), family_less);
    families.erase(std::unique(families.begin(), families.end(), family_equal), families.end());

    SolutionSet out;
    out.mode = SolveMode::Group;
    out.certificate = bound_certificate(ctx.variety(), ctx.group(), Qf);
    out.certificate.f = f;
    for (const auto& fam : families) check_family_bounds(ctx, out.certificate, fam);
    for (const auto& fam : families)
        if (fam.h() == 0 && fam.point_tail()) out.isolated.push_back(fam.tail);
    out.families = std::move(families);
    out.provenance = radical_solution.provenance;
    out.provenance.push_back("group descent: period f = " + to_decimal(f) + ", index " +
                             to_decimal(ctx.radical_data().index));
    return out;
}

}  // namespace sunit
