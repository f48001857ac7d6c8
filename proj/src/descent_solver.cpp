#include "descent_internal.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <thread>

namespace sunit {

using namespace detail;

namespace {

std::vector<std::size_t> descending(std::size_t n) {
    std::vector<std::size_t> order(n + 1);
    std::iota(order.rbegin(), order.rend(), 0);
    return order;
}

// Connected components of the affine coordinates 1..n linked by the forms.
struct CoordinateBlocks {
    std::vector<std::vector<std::size_t>> comps;  // coordinates (1-based), sorted
    std::vector<bool> affine;                     // some form of the block involves X_0
    std::vector<std::vector<std::size_t>> rows;   // form indices per block
    std::vector<std::size_t> free;                // coordinates in no form
};

CoordinateBlocks coordinate_blocks(const Matrix& forms, std::size_t n) {
    std::vector<std::size_t> parent(n + 1);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    std::vector<bool> used(n + 1, false);
    for (const auto& row : forms) {
        std::optional<std::size_t> first;
        for (std::size_t j = 1; j <= n; ++j) {
            if (row[j].is_zero()) continue;
            used[j] = true;
            if (first) parent[find(j)] = find(*first);
            else first = j;
        }
    }
    CoordinateBlocks out;
    std::map<std::size_t, std::size_t> index;
    for (std::size_t j = 1; j <= n; ++j) {
        if (!used[j]) {
            out.free.push_back(j);
            continue;
        }
        auto [it, inserted] = index.emplace(find(j), out.comps.size());
        if (inserted) {
            out.comps.emplace_back();
            out.affine.push_back(false);
            out.rows.emplace_back();
        }
        out.comps[it->second].push_back(j);
    }
    for (std::size_t r = 0; r < forms.size(); ++r) {
        for (std::size_t j = 1; j <= n; ++j) {
            if (forms[r][j].is_zero()) continue;
            std::size_t b = index.at(find(j));
            out.rows[b].push_back(r);
            if (!forms[r][0].is_zero()) out.affine[b] = true;
            break;
        }
    }
    return out;
}

struct CosetLeaf {
    ExpPoint tau;
    std::vector<std::vector<std::size_t>> blocks;  // 0-based coordinates, representative first
    bool alive = true;
};

std::optional<CosetLeaf> coset_leaf(const DescentContext& ctx, const LinearVariety& v) {
    auto cf = coset_form(v);
    if (!cf) return std::nullopt;
    CosetLeaf out;
    const auto& fs = ctx.support();
    std::map<std::size_t, std::vector<std::size_t>> blocks;
    for (std::size_t i = 1; i <= v.n(); ++i) {
        auto m = support_coords(cf->ratio[i], fs);
        if (!m || !ctx.in_radical(*m)) {
            out.alive = false;
            m = MonicCoords{1, IntVec(fs.size(), 0)};
        }
        out.tau.coords.push_back(*m);
        if (cf->representative[cf->block[i]] != 0) blocks[cf->block[i]].push_back(i - 1);
    }
    for (auto& [b, coords] : blocks) out.blocks.push_back(coords);
    std::sort(out.blocks.begin(), out.blocks.end());
    return out;
}

struct Successor {
    std::vector<std::size_t> classes;  // coordinates 0..n, entry 0 unused
    Matrix rows;
};

class NodeExpander {
public:
    NodeExpander(const DescentContext& ctx, const LinearVariety& u) : ctx_(ctx), u_(u), p_(u.p()) {
        const Matrix& f = u.forms();
        const std::size_t n = u.n();
        const std::size_t classes = ctx.class_count();
        table_.resize(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) {
            table_[i].resize(n + 1);
            for (std::size_t j = 0; j <= n; ++j) {
                if (f[i][j].is_zero()) continue;
                const std::size_t count = j == 0 ? 1 : classes;
                for (std::size_t c = 0; c < count; ++c) table_[i][j].push_back(frobenius_split(f[i][j] * ctx.rep(c)));
            }
        }
        for (auto j : u.free_variables())
            if (j != 0) free_.push_back(j);
    }

    std::uint64_t tuple_count() const {
        std::uint64_t t = 1;
        for (std::size_t i = 0; i < free_.size(); ++i) t *= ctx_.class_count();
        return t;
    }

    void expand_range(std::uint64_t begin, std::uint64_t end, std::vector<Successor>& out) const {
        const std::size_t n = u_.n();
        const std::size_t classes = ctx_.class_count();
        const Matrix& f = u_.forms();
        const auto& pivots = u_.pivots();
        std::vector<std::size_t> cls(n + 1, 0);
        for (std::uint64_t t = begin; t < end; ++t) {
            std::uint64_t x = t;
            for (auto j : free_) {
                cls[j] = static_cast<std::size_t>(x % classes);
                x /= classes;
            }
            std::vector<std::vector<std::pair<std::size_t, Matrix>>> cands(f.size());
            bool dead = false;
            for (std::size_t i = 0; i < f.size() && !dead; ++i) {
                for (std::size_t c = 0; c < classes; ++c) {
                    cls[pivots[i]] = c;
                    Echelon e = rref(form_rows(i, cls), descending(n));
                    if (canonical_feasible(e.rows)) cands[i].emplace_back(c, std::move(e.rows));
                }
                dead = cands[i].empty();
            }
            if (dead) continue;
            std::vector<std::size_t> pick(f.size(), 0);
            while (true) {
                Matrix rows;
                for (std::size_t i = 0; i < f.size(); ++i) {
                    cls[pivots[i]] = cands[i][pick[i]].first;
                    const Matrix& r = cands[i][pick[i]].second;
                    rows.insert(rows.end(), r.begin(), r.end());
                }
                bool ok = true;
                if (f.size() > 1) {
                    Echelon e = rref(rows, descending(n));
                    ok = canonical_feasible(e.rows);
                    rows = std::move(e.rows);
                }
                if (ok) out.push_back(Successor{cls, std::move(rows)});
                std::size_t i = 0;
                while (i < f.size() && ++pick[i] == cands[i].size()) pick[i++] = 0;
                if (i == f.size()) break;
            }
        }
    }

private:
    Matrix form_rows(std::size_t i, const std::vector<std::size_t>& cls) const {
        const std::size_t n = u_.n();
        Matrix rows(p_, Vec(n + 1, RatFunc(p_)));
        for (std::size_t j = 0; j <= n; ++j) {
            if (table_[i][j].empty()) continue;
            const auto& comps = table_[i][j][j == 0 ? 0 : cls[j]];
            for (std::uint32_t l = 0; l < p_; ++l) rows[l][j] = comps[l];
        }
        Matrix out;
        for (auto& r : rows)
            if (std::any_of(r.begin(), r.end(), [](const RatFunc& x) { return !x.is_zero(); })) out.push_back(std::move(r));
        return out;
    }

    const DescentContext& ctx_;
    const LinearVariety& u_;
    std::uint32_t p_;
    std::vector<std::vector<std::vector<std::vector<RatFunc>>>> table_;  // form, column, class -> components
    std::vector<std::size_t> free_;
};

std::vector<Successor> expand_node(const DescentContext& ctx, const LinearVariety& u, unsigned threads) {
    NodeExpander ex(ctx, u);
    const std::uint64_t total = ex.tuple_count();
    threads = std::max(1u, threads);
    if (threads == 1 || total < 2 * threads) {
        std::vector<Successor> out;
        ex.expand_range(0, total, out);
        return out;
    }
    std::vector<std::vector<Successor>> parts(threads);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const std::uint64_t chunk = (total + threads - 1) / threads;
    for (unsigned k = 0; k < threads; ++k) {
        pool.emplace_back([&, k] {
            try {
                const std::uint64_t b = std::min<std::uint64_t>(total, k * chunk);
                const std::uint64_t e = std::min<std::uint64_t>(total, b + chunk);
                ex.expand_range(b, e, parts[k]);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<Successor> out;
    for (auto& part : parts)
        for (auto& s : part) out.push_back(std::move(s));
    return out;
}

void require_supported(const LinearVariety& v) {
    CoordinateBlocks b = coordinate_blocks(v.forms(), v.n());
    bool homogeneous = !b.free.empty();
    for (bool a : b.affine) homogeneous = homogeneous || !a;
    if (homogeneous)
        throw MathError("unsupported variety shape: a descent node has a homogeneous block of coordinates");
}

// Tarjan's algorithm over the edge lists; component ids in reverse topological order.
std::vector<std::size_t> strongly_connected(const std::vector<DescentNode>& nodes) {
    const std::size_t size = nodes.size();
    std::vector<std::size_t> index(size, SIZE_MAX), low(size, 0), comp(size, SIZE_MAX);
    std::vector<bool> on_stack(size, false);
    std::vector<std::size_t> stack;
    std::size_t counter = 0, comps = 0;
    std::function<void(std::size_t)> connect = [&](std::size_t v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for (const auto& e : nodes[v].edges) {
            const std::size_t w = e.target;
            if (index[w] == SIZE_MAX) {
                connect(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            while (true) {
                std::size_t w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                comp[w] = comps;
                if (w == v) break;
            }
            ++comps;
        }
    };
    for (std::size_t v = 0; v < size; ++v)
        if (index[v] == SIZE_MAX) connect(v);
    return comp;
}

}  // namespace

DescentTree build_descent(const DescentContext& ctx, const SolveOptions& options) {
    const LinearVariety& root = ctx.variety();
    const std::size_t n = root.n();
    const std::uint32_t p = root.p();
    const std::size_t f = ctx.support().size();
    DescentTree tree{root, root, {}, {}, {}, false, std::nullopt, {}, {}, ctx.class_count()};
    tree.base.coords.assign(n, MonicCoords{1, IntVec(f, 0)});

    if (!coset_form(root)) {
        CoordinateBlocks blocks = coordinate_blocks(root.forms(), n);
        for (auto j : blocks.free) tree.removed_blocks.push_back({j - 1});
        std::vector<std::size_t> cones;
        std::vector<std::size_t> kept;
        for (std::size_t b = 0; b < blocks.comps.size(); ++b) {
            const auto& comp = blocks.comps[b];
            if (blocks.affine[b]) {
                kept.insert(kept.end(), comp.begin(), comp.end());
                continue;
            }
            Matrix sub;
            for (auto r : blocks.rows[b]) {
                Vec row{RatFunc(p)};
                for (auto j : comp) row.push_back(root.forms()[r][j]);
                sub.push_back(std::move(row));
            }
            LinearVariety cone(p, comp.size(), sub);
            auto cf = coset_form(cone);
            if (!cf) {
                cones.push_back(b);
                continue;
            }
            for (auto r : blocks.rows[b]) tree.removed_forms.push_back(root.forms()[r]);
            std::map<std::size_t, std::vector<std::size_t>> groups;
            for (std::size_t i = 1; i <= comp.size(); ++i) {
                groups[cf->block[i]].push_back(comp[i - 1] - 1);
                auto m = support_coords(cf->ratio[i], ctx.support());
                if (!m || !ctx.in_radical(*m)) tree.empty = true;
                else tree.base.coords[comp[i - 1] - 1] = *m;
            }
            for (auto& [id, coords] : groups) tree.removed_blocks.push_back(coords);
        }
        std::sort(kept.begin(), kept.end());
        Matrix rows;
        if (!cones.empty()) {
            if (cones.size() > 1 || !kept.empty())
                throw MathError("unsupported variety shape: a non-coset cone next to other blocks");
            const auto& comp = blocks.comps[cones[0]];
            tree.scale_coordinate = comp.front() - 1;
            for (auto r : blocks.rows[cones[0]]) {
                Vec row{root.forms()[r][comp.front()]};
                for (std::size_t i = 1; i < comp.size(); ++i) row.push_back(root.forms()[r][comp[i]]);
                rows.push_back(std::move(row));
            }
            for (std::size_t i = 1; i < comp.size(); ++i) tree.kept.push_back(comp[i] - 1);
        } else {
            for (const auto& row : root.forms()) {
                bool mine = std::any_of(kept.begin(), kept.end(), [&](std::size_t j) { return !row[j].is_zero(); });
                if (!mine) continue;
                Vec r{row[0]};
                for (auto j : kept) r.push_back(row[j]);
                rows.push_back(std::move(r));
            }
            for (auto j : kept) tree.kept.push_back(j - 1);
        }
        for (auto& b : tree.removed_blocks) std::sort(b.begin(), b.end());
        tree.reduced_variety = LinearVariety(p, tree.kept.size(), rows);
    } else {
        for (std::size_t j = 0; j < n; ++j) tree.kept.push_back(j);
    }

    const LinearVariety& start = tree.reduced_variety;
    const std::size_t m = start.n();
    {
        BigInt total = big_pow(BigInt(ctx.class_count()), m);
        if (total > options.max_classes)
            throw ResourceError("residue class tuples (" + to_decimal(total) + ") exceed the configured maximum");
    }

    std::map<Matrix, std::size_t> ids;
    auto add_node = [&](const Matrix& rows) -> std::size_t {
        auto it = ids.find(rows);
        if (it != ids.end()) return it->second;
        if (tree.nodes.size() >= options.max_nodes) throw ResourceError("descent node count exceeds the configured maximum");
        DescentNode node{.variety = LinearVariety(p, m, rows)};
        if (auto leaf = coset_leaf(ctx, node.variety)) {
            node.coset = true;
            node.alive = leaf->alive;
        }
        ids.emplace(rows, tree.nodes.size());
        tree.nodes.push_back(std::move(node));
        return tree.nodes.size() - 1;
    };
    add_node(start.forms());
    if (tree.empty) return tree;

    for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
        if (tree.nodes[id].coset) continue;
        require_supported(tree.nodes[id].variety);
        const LinearVariety u = tree.nodes[id].variety;
        auto succ = expand_node(ctx, u, options.threads);
        for (auto& s : succ) {
            const std::size_t dim = m - s.rows.size();
            std::size_t target = add_node(s.rows);
            auto& node = tree.nodes[id];
            if (dim == 0) ++node.point_cases;
            else if (dim < u.dim()) ++node.subvariety_cases;
            else ++node.reduction_cases;
            node.edges.push_back(DescentNode::Edge{std::vector<std::size_t>(s.classes.begin() + 1, s.classes.end()), target});
        }
    }

    auto comp = strongly_connected(tree.nodes);
    std::map<std::size_t, std::vector<std::size_t>> members;
    for (std::size_t v = 0; v < tree.nodes.size(); ++v) {
        tree.nodes[v].scc = comp[v];
        members[comp[v]].push_back(v);
    }
    for (const auto& [c, vs] : members) {
        bool cyclic = vs.size() > 1;
        for (auto v : vs)
            for (const auto& e : tree.nodes[v].edges) cyclic = cyclic || e.target == v;
        if (!cyclic) continue;
        for (auto v : vs) {
            std::optional<std::size_t> inner;
            for (std::size_t k = 0; k < tree.nodes[v].edges.size(); ++k) {
                if (comp[tree.nodes[v].edges[k].target] != c) continue;
                if (inner) throw MathError("unsupported descent: a node has two edges inside its cycle");
                inner = k;
            }
            tree.nodes[v].cycle_edge = inner;
        }
        std::size_t v = vs.front(), steps = 0;
        do {
            v = tree.nodes[v].edges[*tree.nodes[v].cycle_edge].target;
            ++steps;
        } while (v != vs.front() && steps <= vs.size());
        if (steps != vs.size()) throw MathError("unsupported descent: a strongly connected component is not a cycle");
    }
    return tree;
}

namespace {

struct Prefix {
    ExpMatrix a;
    BigInt pk = 1;
};

ExpMatrix edge_exponents(const DescentContext& ctx, const DescentNode::Edge& e) {
    ExpMatrix out;
    for (auto c : e.classes) out.push_back(ctx.rep_exponents(c));
    return out;
}

std::vector<RatFunc> edge_scalars(const DescentContext& ctx, const DescentNode::Edge& e) {
    std::vector<RatFunc> g{RatFunc::constant(ctx.p(), 1)};
    for (auto c : e.classes) g.push_back(ctx.rep(c));
    return g;
}

Prefix follow(const DescentContext& ctx, const Prefix& x, const DescentNode::Edge& e) {
    return Prefix{add(x.a, scale(edge_exponents(ctx, e), x.pk)), x.pk * ctx.p()};
}

ExpPoint push_point(const Prefix& x, const ExpPoint& pt) {
    ExpPoint out = pt;
    for (std::size_t j = 0; j < out.coords.size(); ++j)
        for (std::size_t w = 0; w < out.coords[j].exponents.size(); ++w)
            out.coords[j].exponents[w] = x.a[j][w] + x.pk * pt.coords[j].exponents[w];
    return out;
}

LinearVariety point_variety(const DescentContext& ctx, const ExpPoint& pt) {
    const std::uint32_t p = ctx.p();
    const std::size_t n = pt.coords.size();
    Matrix forms;
    for (std::size_t j = 0; j < n; ++j) {
        Vec row(n + 1, RatFunc(p));
        row[j + 1] = RatFunc::constant(p, 1);
        row[0] = -realize(ctx.support(), pt.coords[j]);
        forms.push_back(std::move(row));
    }
    return LinearVariety(p, n, forms);
}

class FamilyWalker {
public:
    FamilyWalker(const DescentContext& ctx, const DescentTree& tree, const SolveOptions& options)
        : ctx_(ctx), tree_(tree), options_(options) {}

    std::vector<RawFamily> run() {
        const std::size_t m = tree_.reduced_variety.n();
        Prefix start{zero_exponents(m, ctx_.support().size()), 1};
        std::vector<Bracket> brackets;
        visit(0, start, brackets);
        return std::move(out_);
    }

    std::set<std::size_t> cycle_lengths;

private:
    struct Step {
        std::size_t node, edge;
        bool cycle;
    };

    // Period of the cycle through v and its composite exponents starting at v.
    std::pair<std::size_t, ExpMatrix> composite(std::size_t v) const {
        const std::size_t m = tree_.reduced_variety.n();
        ExpMatrix a = zero_exponents(m, ctx_.support().size());
        BigInt pk = 1;
        std::size_t c = 0, u = v;
        do {
            const auto& e = tree_.nodes[u].edges[*tree_.nodes[u].cycle_edge];
            a = add(a, scale(edge_exponents(ctx_, e), pk));
            pk *= ctx_.p();
            u = e.target;
            ++c;
        } while (u != v);
        return {c, a};
    }

    std::vector<ExpPoint> periodic_points(std::size_t v, std::size_t c, const ExpMatrix& a) const {
        const BigInt q = big_pow(BigInt(ctx_.p()), c);
        ExpMatrix e = a;
        for (auto& row : e)
            for (auto& x : row) {
                if (x % (q - 1) != 0) return {};
                x = -x / (q - 1);
            }
        const auto& fs = ctx_.support();
        Vec monomials{RatFunc::constant(ctx_.p(), 1)};
        for (const auto& row : e) monomials.push_back(realize(fs, MonicCoords{1, row}));
        std::vector<ExpPoint> out;
        for (const auto& consts : constant_solutions(tree_.nodes[v].variety.forms(), monomials, ctx_.p())) {
            ExpPoint pt;
            for (std::size_t j = 0; j < e.size(); ++j) pt.coords.push_back(MonicCoords{consts[j], e[j]});
            if (follows_cycle(v, pt)) out.push_back(std::move(pt));
        }
        return out;
    }

    bool follows_cycle(std::size_t v, ExpPoint pt) const {
        std::size_t u = v;
        do {
            const auto& e = tree_.nodes[u].edges[*tree_.nodes[u].cycle_edge];
            for (std::size_t j = 0; j < pt.coords.size(); ++j) {
                auto c = ctx_.class_of(pt.coords[j].exponents);
                if (!c || *c != e.classes[j]) return false;
                auto& ex = pt.coords[j].exponents;
                const auto& g = ctx_.rep_exponents(e.classes[j]);
                for (std::size_t w = 0; w < ex.size(); ++w) {
                    BigInt d = ex[w] - g[w];
                    if (d % ctx_.p() != 0) return false;
                    ex[w] = d / ctx_.p();
                }
            }
            u = e.target;
        } while (u != v);
        return true;
    }

    std::optional<LinearVariety> carrier(const std::optional<ExpPoint>& point_leaf) const {
        std::optional<std::size_t> exit;
        for (std::size_t i = 0; i < path_.size(); ++i)
            if (!path_[i].cycle) {
                exit = i;
                break;
            }
        if (!exit) {
            if (point_leaf && path_.empty()) return point_variety(ctx_, *point_leaf);
            if (path_.empty()) return tree_.nodes[0].variety;
            return std::nullopt;
        }
        const auto& first = tree_.nodes[path_[*exit].node].edges[path_[*exit].edge];
        LinearVariety w = tree_.nodes[first.target].variety;
        for (std::size_t i = *exit + 1; i-- > 0;) {
            const auto& e = tree_.nodes[path_[i].node].edges[path_[i].edge];
            w = image_variety(w, edge_scalars(ctx_, e));
        }
        return w;
    }

    void emit(const Prefix& x, const std::vector<Bracket>& brackets, const ExpPoint& tail,
              const std::vector<std::vector<std::size_t>>& blocks, bool point_leaf) {
        if (out_.size() >= options_.max_families) throw ResourceError("family count exceeds the configured maximum");
        RawFamily fam;
        fam.brackets = brackets;
        fam.tail = push_point(x, tail);
        fam.blocks = blocks;
        fam.carrier = carrier(point_leaf ? std::optional<ExpPoint>(fam.tail) : std::nullopt);
        std::string route = "0";
        for (const auto& s : path_) route += "->" + std::to_string(tree_.nodes[s.node].edges[s.edge].target);
        fam.provenance = "nodes " + route + (point_leaf ? " (periodic point)" : " (coset leaf)");
        out_.push_back(std::move(fam));
    }

    void visit(std::size_t v, const Prefix& x, std::vector<Bracket>& brackets) {
        const DescentNode& node = tree_.nodes[v];
        if (node.coset) {
            if (!node.alive) return;
            auto leaf = coset_leaf(ctx_, node.variety);
            emit(x, brackets, leaf->tau, leaf->blocks, false);
            return;
        }
        if (!node.cycle_edge) {
            for (std::size_t k = 0; k < node.edges.size(); ++k) descend(v, k, x, brackets, false);
            return;
        }
        auto [c, a] = composite(v);
        cycle_lengths.insert(c);
        for (const auto& pt : periodic_points(v, c, a)) emit(x, brackets, pt, {}, true);
        const BigInt q = big_pow(BigInt(ctx_.p()), c);
        // Fixed point chi(-a / (q - 1)) gives phi = -(q - 1) A + p^k a.
        Bracket b{add(scale(x.a, 1 - q), scale(a, x.pk)), q};
        brackets.push_back(b);
        Prefix cur = x;
        std::size_t u = v;
        std::size_t walked = 0;
        for (std::size_t j = 0; j < c; ++j) {
            const DescentNode& un = tree_.nodes[u];
            for (std::size_t k = 0; k < un.edges.size(); ++k)
                if (k != *un.cycle_edge) descend(u, k, cur, brackets, false);
            const auto& e = un.edges[*un.cycle_edge];
            path_.push_back(Step{u, *un.cycle_edge, true});
            ++walked;
            cur = follow(ctx_, cur, e);
            u = e.target;
        }
        path_.resize(path_.size() - walked);
        brackets.pop_back();
    }

    void descend(std::size_t v, std::size_t k, const Prefix& x, std::vector<Bracket>& brackets, bool cycle) {
        const auto& e = tree_.nodes[v].edges[k];
        path_.push_back(Step{v, k, cycle});
        visit(e.target, follow(ctx_, x, e), brackets);
        path_.pop_back();
    }

    const DescentContext& ctx_;
    const DescentTree& tree_;
    const SolveOptions& options_;
    std::vector<Step> path_;
    std::vector<RawFamily> out_;
};

// Embeds reduced-coordinate data into the input coordinates.
struct Lifter {
    const DescentContext& ctx;
    const DescentTree& tree;

    ExpMatrix matrix(const ExpMatrix& reduced) const {
        ExpMatrix out = zero_exponents(ctx.n(), ctx.support().size());
        for (std::size_t i = 0; i < tree.kept.size(); ++i) out[tree.kept[i]] = reduced[i];
        return out;
    }

    ExpPoint point(const ExpPoint& reduced) const {
        ExpPoint out = tree.base;
        for (std::size_t i = 0; i < tree.kept.size(); ++i) out.coords[tree.kept[i]] = reduced.coords[i];
        return out;
    }

    std::vector<std::vector<std::size_t>> blocks(const std::vector<std::vector<std::size_t>>& reduced) const {
        std::vector<std::vector<std::size_t>> out = tree.removed_blocks;
        std::vector<bool> covered(tree.kept.size(), false);
        for (const auto& b : reduced) {
            std::vector<std::size_t> mapped;
            for (auto j : b) {
                mapped.push_back(tree.kept[j]);
                covered[j] = true;
            }
            std::sort(mapped.begin(), mapped.end());
            out.push_back(std::move(mapped));
        }
        if (tree.scale_coordinate) {
            std::vector<std::size_t> scale{*tree.scale_coordinate};
            for (std::size_t i = 0; i < tree.kept.size(); ++i)
                if (!covered[i]) scale.push_back(tree.kept[i]);
            std::sort(scale.begin(), scale.end());
            out.push_back(std::move(scale));
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    std::optional<LinearVariety> variety(const std::optional<LinearVariety>& reduced) const {
        if (!reduced || tree.scale_coordinate) return std::nullopt;
        const std::size_t n = ctx.n();
        const std::uint32_t p = ctx.p();
        Matrix forms = tree.removed_forms;
        for (const auto& row : reduced->forms()) {
            Vec full(n + 1, RatFunc(p));
            full[0] = row[0];
            for (std::size_t i = 0; i < tree.kept.size(); ++i) full[tree.kept[i] + 1] = row[i + 1];
            forms.push_back(std::move(full));
        }
        return LinearVariety(p, n, forms);
    }
};

std::vector<RawFamily> raw_families(const DescentContext& ctx, const DescentTree& tree, const SolveOptions& options,
                                    std::set<std::size_t>& cycle_lengths) {
    if (tree.empty) return {};
    FamilyWalker walker(ctx, tree, options);
    auto out = walker.run();
    cycle_lengths = walker.cycle_lengths;
    return out;
}

}  // namespace

SolutionSet assemble_theorem1(const DescentContext& ctx, const DescentTree& tree, const SolveOptions& options) {
    std::set<std::size_t> lengths;
    auto raws = raw_families(ctx, tree, options, lengths);
    std::size_t period = 1;
    for (auto c : lengths) period = std::lcm(period, c);
    const BigInt Q = big_pow(BigInt(ctx.p()), period);
    Lifter lift{ctx, tree};

    std::vector<FrobeniusFamily> families;
    for (const auto& raw : raws) {
        // Split each bracket of q = p^c into period/c shifted brackets of q^(period/c).
        std::vector<std::size_t> mult;
        for (const auto& b : raw.brackets) {
            std::size_t c = 0;
            for (BigInt x = b.q; x > 1; x /= ctx.p()) ++c;
            mult.push_back(period / c);
        }
        std::vector<std::size_t> offset(raw.brackets.size(), 0);
        auto carrier = lift.variety(raw.carrier);
        while (true) {
            std::vector<IndexSpec> specs;
            for (std::size_t i = 0; i < offset.size(); ++i) specs.push_back({BigInt(offset[i]), BigInt(mult[i])});
            Reindexed r = reindex(raw.brackets, raw.tail, specs, Q);
            FrobeniusFamily fam;
            fam.mode = SolveMode::Radical;
            fam.q = Q;
            fam.subgroup = lift.blocks(raw.blocks);
            // Block coordinates relative to their representative; the subgroup absorbs the rest.
            const BlockNormalizer norm(ctx.n(), fam.subgroup);
            for (const auto& b : r.brackets) fam.steps.push_back(norm.apply(lift.matrix(b.phi)));
            fam.tail = norm.apply(lift.point(r.tail), ctx.p());
            const bool trivial = std::all_of(fam.steps.begin(), fam.steps.end(), [](const ExpMatrix& m) {
                return m == scale(m, 0);
            }) && exponents_of(fam.tail) == scale(exponents_of(fam.tail), 0);
            if (trivial) fam.steps.clear();
            fam.carrier = carrier;
            fam.provenance = raw.provenance;
            if (options.isotrivial_refine && carrier) fam.carrier_witness = isotrivial_witness(*carrier, ctx.radical_group());
            families.push_back(std::move(fam));
            std::size_t i = 0;
            while (i < offset.size() && ++offset[i] == mult[i]) offset[i++] = 0;
            if (i == offset.size()) break;
        }
    }
    std::stable_sort(families.begin(), families.end(), family_less);
    families.erase(std::unique(families.begin(), families.end(), family_equal), families.end());

    SolutionSet out;
    out.mode = SolveMode::Radical;
    out.certificate = bound_certificate(ctx.variety(), ctx.group(), Q);
    for (const auto& fam : families) check_family_bounds(ctx, out.certificate, fam);
    for (const auto& fam : families)
        if (fam.h() == 0 && fam.point_tail()) out.isolated.push_back(fam.tail);
    out.families = std::move(families);
    for (std::size_t v = 0; v < tree.nodes.size(); ++v) {
        const auto& node = tree.nodes[v];
        std::string kind = node.coset ? (node.alive ? "coset" : "dead coset") : node.cycle_edge ? "cycle" : "transient";
        out.provenance.push_back("node " + std::to_string(v) + ": dim " + std::to_string(node.variety.dim()) + ", " +
                                 kind + ", height " + std::to_string(node.variety.height()) + ", point cases " +
                                 std::to_string(node.point_cases) + ", subvariety cases " +
                                 std::to_string(node.subvariety_cases) + ", reduction cases " +
                                 std::to_string(node.reduction_cases));
    }
    return out;
}

SolutionSet solve_radical(const DescentContext& ctx, const SolveOptions& options) {
    return assemble_theorem1(ctx, build_descent(ctx, options), options);
}

SolutionSet solve(const DescentContext& ctx, SolveMode mode, const SolveOptions& options) {
    SolutionSet radical = solve_radical(ctx, options);
    if (mode == SolveMode::Radical) return radical;
    return descend_to_G(ctx, radical);
}

}  // namespace sunit
