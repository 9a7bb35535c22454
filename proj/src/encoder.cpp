#include "maxrefactor/encoder.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace maxref {

VariableLayout::VariableLayout(const Program& p, int k, const EncodeOptions& opts)
    : K_(k), opts_(opts) {
    if (k < 1) throw std::invalid_argument("the number of invented rules must be at least 1");
    if (p.rules.empty()) throw std::invalid_argument("cannot lay out an empty program");

    for (const auto& [pred, arity] : body_predicates(p)) {
        pred_index_.emplace(pred, static_cast<int>(preds_.size()));
        preds_.push_back(pred);
        arities_.push_back(arity);
    }
    m_max_.assign(preds_.size(), 0);
    for (const auto& rule : p.rules) {
        std::vector<int> body;
        std::vector<int> occ(preds_.size(), 0);
        for (const auto& lit : rule.body) {
            int pi = pred_index_.at(lit.pred);
            body.push_back(pi);
            ++occ[pi];
        }
        int tmax = 0;
        for (size_t pi = 0; pi < preds_.size(); ++pi) {
            m_max_[pi] = std::max(m_max_[pi], occ[pi]);
            tmax = std::max(tmax, occ[pi]);
        }
        t_max_.push_back(tmax);
        rules_.push_back(std::move(body));
    }

    if (opts_.candidates) {
        for (const auto& pattern : *opts_.candidates)
            for (const auto& [pred, count] : pattern) {
                auto it = pred_index_.find(pred);
                if (it == pred_index_.end() || count < 1 || count > m_max_[it->second])
                    throw std::invalid_argument("candidate pattern uses predicate '" + pred +
                                                "' outside the layout bounds");
            }
    }

    // Family allocation order: r, use, cover, used, covered.
    r_ids_.assign(K_ + 1, {});
    for (int kk = 1; kk <= K_; ++kk) {
        r_ids_[kk].resize(preds_.size());
        for (size_t pi = 0; pi < preds_.size(); ++pi)
            for (int m = 1; m <= m_max_[pi]; ++m)
                r_ids_[kk][pi].push_back(
                    add({VarTag::R, kk, static_cast<int>(pi), m, -1, -1, 0}));
    }
    use_ids_.resize(rules_.size());
    for (size_t c = 0; c < rules_.size(); ++c) {
        use_ids_[c].assign(K_ + 1, {});
        for (int kk = 1; kk <= K_; ++kk)
            for (int t = 1; t <= t_max_[c]; ++t)
                use_ids_[c][kk].push_back(
                    add({VarTag::Use, kk, -1, 0, static_cast<int>(c), -1, t}));
    }
    cover_ids_.resize(rules_.size());
    for (size_t c = 0; c < rules_.size(); ++c) {
        cover_ids_[c].resize(rules_[c].size());
        for (size_t a = 0; a < rules_[c].size(); ++a) {
            cover_ids_[c][a].assign(K_ + 1, {});
            for (int kk = 1; kk <= K_; ++kk)
                for (int t = 1; t <= t_max_[c]; ++t)
                    cover_ids_[c][a][kk].push_back(add({VarTag::Cover, kk, -1, 0,
                                                        static_cast<int>(c),
                                                        static_cast<int>(a), t}));
        }
    }
    used_ids_.assign(K_ + 1, 0);
    for (int kk = 1; kk <= K_; ++kk) used_ids_[kk] = add({VarTag::Used, kk, -1, 0, -1, -1, 0});
    covered_ids_.resize(rules_.size());
    for (size_t c = 0; c < rules_.size(); ++c)
        for (size_t a = 0; a < rules_[c].size(); ++a)
            covered_ids_[c].push_back(
                add({VarTag::Covered, 0, -1, 0, static_cast<int>(c), static_cast<int>(a), 0}));
}

int VariableLayout::add(const VarTag& tag) {
    tags_.push_back(tag);
    return static_cast<int>(tags_.size());
}

int VariableLayout::alloc_aux_var() {
    return add(VarTag{});
}

int VariableLayout::pred_index(const std::string& p) const {
    auto it = pred_index_.find(p);
    if (it == pred_index_.end()) throw std::out_of_range("unknown body predicate: " + p);
    return it->second;
}

int VariableLayout::total_body_literals() const {
    int total = 0;
    for (const auto& body : rules_) total += static_cast<int>(body.size());
    return total;
}

int VariableLayout::r_var(int k, int pred, int m) const { return r_ids_[k][pred][m - 1]; }
int VariableLayout::use_var(int rule, int k, int t) const { return use_ids_[rule][k][t - 1]; }
int VariableLayout::cover_var(int rule, int lit, int k, int t) const {
    return cover_ids_[rule][lit][k][t - 1];
}
int VariableLayout::used_var(int k) const { return used_ids_[k]; }
int VariableLayout::covered_var(int rule, int lit) const { return covered_ids_[rule][lit]; }

namespace {

// r-template bit vector of slot k in allocation order, used for the
// lexicographic symmetry ordering.
std::vector<int> r_vector(const VariableLayout& layout, int k) {
    std::vector<int> bits;
    for (size_t pi = 0; pi < layout.preds().size(); ++pi)
        for (int m = 1; m <= layout.m_max(static_cast<int>(pi)); ++m)
            bits.push_back(layout.r_var(k, static_cast<int>(pi), m));
    return bits;
}

// X >=lex Y via a prefix-equality chain.
void emit_lex_geq(const std::vector<int>& xs, const std::vector<int>& ys, VariableLayout& layout,
                  std::vector<std::vector<int>>& out) {
    int prev = 0;  // constant true
    for (size_t i = 0; i < xs.size(); ++i) {
        if (prev == 0)
            out.push_back({xs[i], -ys[i]});
        else
            out.push_back({-prev, xs[i], -ys[i]});
        if (i + 1 == xs.size()) break;
        int e = layout.alloc_aux_var();
        if (prev == 0) {
            out.push_back({e, -xs[i], -ys[i]});
            out.push_back({e, xs[i], ys[i]});
        } else {
            out.push_back({e, -prev, -xs[i], -ys[i]});
            out.push_back({e, -prev, xs[i], ys[i]});
        }
        prev = e;
    }
}

void emit_candidate_pins(VariableLayout& layout, std::vector<std::vector<int>>& out) {
    const auto& candidates = *layout.options().candidates;
    int K = layout.K();
    int C = static_cast<int>(candidates.size());
    // Selector variables per slot; index 0 keeps the slot empty.
    std::vector<std::vector<int>> sel(K + 1, std::vector<int>(C + 1));
    for (int k = 1; k <= K; ++k)
        for (int j = 0; j <= C; ++j) sel[k][j] = layout.alloc_aux_var();
    for (int k = 1; k <= K; ++k) {
        std::vector<int> atLeast;
        for (int j = 0; j <= C; ++j) atLeast.push_back(sel[k][j]);
        out.push_back(atLeast);
        for (int j1 = 0; j1 <= C; ++j1)
            for (int j2 = j1 + 1; j2 <= C; ++j2) out.push_back({-sel[k][j1], -sel[k][j2]});
        for (int j = 0; j <= C; ++j) {
            for (size_t pi = 0; pi < layout.preds().size(); ++pi) {
                int want = 0;
                if (j >= 1) {
                    auto it = candidates[j - 1].find(layout.preds()[pi]);
                    if (it != candidates[j - 1].end()) want = it->second;
                }
                for (int m = 1; m <= layout.m_max(static_cast<int>(pi)); ++m) {
                    int r = layout.r_var(k, static_cast<int>(pi), m);
                    out.push_back({-sel[k][j], m == want ? r : -r});
                }
            }
        }
    }
    // A pattern may occupy at most one slot.
    for (int j = 1; j <= C; ++j)
        for (int k1 = 1; k1 <= K; ++k1)
            for (int k2 = k1 + 1; k2 <= K; ++k2) out.push_back({-sel[k1][j], -sel[k2][j]});
}

}  // namespace

ConstraintIR emit_constraints(VariableLayout& layout) {
    ConstraintIR ir;
    int K = layout.K();
    int P = static_cast<int>(layout.preds().size());
    int N = layout.num_rules();

    // Mutual exclusion of the multiplicity indicators.
    for (int k = 1; k <= K; ++k)
        for (int p = 0; p < P; ++p)
            for (int m1 = 1; m1 <= layout.m_max(p); ++m1)
                for (int m2 = m1 + 1; m2 <= layout.m_max(p); ++m2)
                    ir.hard.push_back({-layout.r_var(k, p, m1), -layout.r_var(k, p, m2)});

    // Instance chain: the t-th use implies the (t-1)-th.
    for (int c = 0; c < N; ++c)
        for (int k = 1; k <= K; ++k)
            for (int t = 2; t <= layout.t_max(c); ++t)
                ir.hard.push_back({-layout.use_var(c, k, t), layout.use_var(c, k, t - 1)});

    // A used invented rule cannot mention a predicate absent from the rule
    // being refactored.
    for (int c = 0; c < N; ++c) {
        std::vector<bool> present(P, false);
        for (int a = 0; a < layout.body_size(c); ++a) present[layout.body_pred(c, a)] = true;
        for (int p = 0; p < P; ++p) {
            if (present[p]) continue;
            for (int k = 1; k <= K; ++k)
                for (int t = 1; t <= layout.t_max(c); ++t)
                    for (int m = 1; m <= layout.m_max(p); ++m)
                        ir.hard.push_back({-layout.use_var(c, k, t), -layout.r_var(k, p, m)});
        }
    }

    // Covering a literal requires the matching instance and a slot for the
    // literal's predicate.
    for (int c = 0; c < N; ++c)
        for (int a = 0; a < layout.body_size(c); ++a) {
            int p = layout.body_pred(c, a);
            for (int k = 1; k <= K; ++k)
                for (int t = 1; t <= layout.t_max(c); ++t) {
                    int cov = layout.cover_var(c, a, k, t);
                    ir.hard.push_back({-cov, layout.use_var(c, k, t)});
                    std::vector<int> any{-cov};
                    for (int m = 1; m <= layout.m_max(p); ++m)
                        any.push_back(layout.r_var(k, p, m));
                    ir.hard.push_back(std::move(any));
                }
        }

    // One instance covers at most m literals of a predicate with
    // multiplicity m.
    for (int c = 0; c < N; ++c) {
        std::vector<std::vector<int>> byPred(P);
        for (int a = 0; a < layout.body_size(c); ++a)
            byPred[layout.body_pred(c, a)].push_back(a);
        for (int p = 0; p < P; ++p) {
            if (byPred[p].empty()) continue;
            for (int k = 1; k <= K; ++k)
                for (int t = 1; t <= layout.t_max(c); ++t)
                    for (int m = 1; m <= layout.m_max(p); ++m) {
                        if (static_cast<int>(byPred[p].size()) <= m) continue;
                        CardinalityAtom card;
                        card.guard = layout.r_var(k, p, m);
                        for (int a : byPred[p]) card.lits.push_back(layout.cover_var(c, a, k, t));
                        card.bound = m;
                        ir.cards.push_back(std::move(card));
                    }
        }
    }

    // used_k is exactly "some rule uses slot k".
    for (int k = 1; k <= K; ++k) {
        std::vector<int> any{-layout.used_var(k)};
        for (int c = 0; c < N; ++c)
            for (int t = 1; t <= layout.t_max(c); ++t) {
                ir.hard.push_back({-layout.use_var(c, k, t), layout.used_var(k)});
                any.push_back(layout.use_var(c, k, t));
            }
        ir.hard.push_back(std::move(any));
    }

    // covered_{c,a} is exactly "some instance covers the literal".
    for (int c = 0; c < N; ++c)
        for (int a = 0; a < layout.body_size(c); ++a) {
            std::vector<int> any{-layout.covered_var(c, a)};
            for (int k = 1; k <= K; ++k)
                for (int t = 1; t <= layout.t_max(c); ++t) {
                    ir.hard.push_back({-layout.cover_var(c, a, k, t), layout.covered_var(c, a)});
                    any.push_back(layout.cover_var(c, a, k, t));
                }
            ir.hard.push_back(std::move(any));
        }

    if (layout.options().candidates) emit_candidate_pins(layout, ir.hard);

    if (layout.options().symmetry_breaking && K > 1) {
        for (int k = 1; k < K; ++k)
            emit_lex_geq(r_vector(layout, k), r_vector(layout, k + 1), layout, ir.hard);
    }

    return ir;
}

Objective emit_objective(const VariableLayout& layout) {
    Objective obj;
    for (int k = 1; k <= layout.K(); ++k) obj.soft.emplace_back(-layout.used_var(k), 1);
    for (int k = 1; k <= layout.K(); ++k)
        for (size_t p = 0; p < layout.preds().size(); ++p)
            for (int m = 1; m <= layout.m_max(static_cast<int>(p)); ++m)
                obj.soft.emplace_back(-layout.r_var(k, static_cast<int>(p), m), m);
    for (int c = 0; c < layout.num_rules(); ++c)
        for (int k = 1; k <= layout.K(); ++k)
            for (int t = 1; t <= layout.t_max(c); ++t)
                obj.soft.emplace_back(-layout.use_var(c, k, t), 1);
    for (int c = 0; c < layout.num_rules(); ++c)
        for (int a = 0; a < layout.body_size(c); ++a)
            obj.soft.emplace_back(layout.covered_var(c, a), 1);
    // Rewarding covered literals becomes "penalise uncovered"; the offset
    // restores the negative objective term.
    obj.offset = -static_cast<int64_t>(layout.total_body_literals());
    return obj;
}

int64_t WcnfFormula::top_weight() const {
    int64_t total = 1;
    for (const auto& [lit, w] : soft) total += w;
    return total;
}

WcnfFormula to_wcnf(const ConstraintIR& ir, const Objective& obj, VariableLayout& layout) {
    WcnfFormula f;
    f.hard = ir.hard;
    for (const auto& card : ir.cards)
        lower_pb_card(card.guard, card.lits, card.bound, layout, f.hard);
    f.soft = obj.soft;
    f.offset = obj.offset;
    f.num_vars = layout.num_vars();
    int64_t total = 1;
    for (const auto& [lit, w] : f.soft) {
        if (w < 1) throw std::invalid_argument("soft weights must be positive");
        if (total > std::numeric_limits<int64_t>::max() - w)
            throw std::overflow_error("total soft weight overflows the top weight");
        total += w;
    }
    return f;
}

Encoding encode(const Program& p, int k, const EncodeOptions& opts) {
    VariableLayout layout(p, k, opts);
    ConstraintIR ir = emit_constraints(layout);
    Objective obj = emit_objective(layout);
    WcnfFormula f = to_wcnf(ir, obj, layout);
    return {std::move(layout), std::move(f)};
}

std::string to_dimacs(const WcnfFormula& f, bool fmt2022) {
    std::ostringstream os;
    auto clause = [&](const std::vector<int>& lits) {
        for (int l : lits) os << l << ' ';
        os << "0\n";
    };
    if (fmt2022) {
        for (const auto& h : f.hard) {
            os << "h ";
            clause(h);
        }
        for (const auto& [lit, w] : f.soft) {
            os << w << ' ';
            clause({lit});
        }
    } else {
        int64_t top = f.top_weight();
        os << "p wcnf " << f.num_vars << ' ' << f.hard.size() + f.soft.size() << ' ' << top
           << '\n';
        for (const auto& h : f.hard) {
            os << top << ' ';
            clause(h);
        }
        for (const auto& [lit, w] : f.soft) {
            os << w << ' ';
            clause({lit});
        }
    }
    return os.str();
}

bool model_satisfies_hard(const WcnfFormula& f, const std::vector<int8_t>& model) {
    for (const auto& cl : f.hard) {
        bool sat = false;
        for (int l : cl) {
            int v = std::abs(l);
            if (v < static_cast<int>(model.size()) && (l > 0) == (model[v] > 0)) {
                sat = true;
                break;
            }
        }
        if (!sat) return false;
    }
    return true;
}

int64_t model_cost(const WcnfFormula& f, const std::vector<int8_t>& model) {
    int64_t cost = 0;
    for (const auto& [lit, w] : f.soft) {
        int v = std::abs(lit);
        bool holds = v < static_cast<int>(model.size()) && (lit > 0) == (model[v] > 0);
        if (!holds) cost += w;
    }
    return cost;
}

namespace {

bool is_true(const std::vector<int8_t>& model, int var) {
    return var < static_cast<int>(model.size()) && model[var] > 0;
}

}  // namespace

std::optional<std::string> check_model_semantics(const std::vector<int8_t>& model,
                                                 const VariableLayout& layout) {
    std::ostringstream err;
    int K = layout.K();
    int P = static_cast<int>(layout.preds().size());
    std::vector<std::vector<int>> counts(K + 1, std::vector<int>(P, 0));
    for (int k = 1; k <= K; ++k)
        for (int p = 0; p < P; ++p) {
            int chosen = 0;
            for (int m = 1; m <= layout.m_max(p); ++m)
                if (is_true(model, layout.r_var(k, p, m))) {
                    if (chosen != 0) {
                        err << "r[" << k << "," << layout.preds()[p] << "] has two multiplicities";
                        return err.str();
                    }
                    chosen = m;
                }
            counts[k][p] = chosen;
        }
    for (int c = 0; c < layout.num_rules(); ++c) {
        std::vector<bool> present(P, false);
        for (int a = 0; a < layout.body_size(c); ++a) present[layout.body_pred(c, a)] = true;
        for (int k = 1; k <= K; ++k) {
            for (int t = 2; t <= layout.t_max(c); ++t)
                if (is_true(model, layout.use_var(c, k, t)) &&
                    !is_true(model, layout.use_var(c, k, t - 1))) {
                    err << "use chain broken at rule " << c << " k=" << k << " t=" << t;
                    return err.str();
                }
            for (int t = 1; t <= layout.t_max(c); ++t) {
                if (!is_true(model, layout.use_var(c, k, t))) continue;
                for (int p = 0; p < P; ++p)
                    if (!present[p] && counts[k][p] > 0) {
                        err << "rule " << c << " uses slot " << k
                            << " which mentions absent predicate " << layout.preds()[p];
                        return err.str();
                    }
            }
            for (int t = 1; t <= layout.t_max(c); ++t) {
                std::vector<int> coveredPerPred(P, 0);
                for (int a = 0; a < layout.body_size(c); ++a) {
                    if (!is_true(model, layout.cover_var(c, a, k, t))) continue;
                    int p = layout.body_pred(c, a);
                    if (!is_true(model, layout.use_var(c, k, t))) {
                        err << "cover without use at rule " << c << " lit " << a;
                        return err.str();
                    }
                    if (counts[k][p] == 0) {
                        err << "cover of predicate " << layout.preds()[p]
                            << " without a slot in k=" << k;
                        return err.str();
                    }
                    ++coveredPerPred[p];
                }
                for (int p = 0; p < P; ++p)
                    if (counts[k][p] > 0 && coveredPerPred[p] > counts[k][p]) {
                        err << "instance (" << k << "," << t << ") covers " << coveredPerPred[p]
                            << " literals of " << layout.preds()[p] << " but has multiplicity "
                            << counts[k][p];
                        return err.str();
                    }
            }
        }
    }
    for (int k = 1; k <= K; ++k) {
        bool any = false;
        for (int c = 0; c < layout.num_rules(); ++c)
            for (int t = 1; t <= layout.t_max(c); ++t)
                if (is_true(model, layout.use_var(c, k, t))) any = true;
        if (any != is_true(model, layout.used_var(k))) {
            err << "used[" << k << "] disagrees with the use family";
            return err.str();
        }
    }
    for (int c = 0; c < layout.num_rules(); ++c)
        for (int a = 0; a < layout.body_size(c); ++a) {
            bool any = false;
            for (int k = 1; k <= K; ++k)
                for (int t = 1; t <= layout.t_max(c); ++t)
                    if (is_true(model, layout.cover_var(c, a, k, t))) any = true;
            if (any != is_true(model, layout.covered_var(c, a))) {
                err << "covered[" << c << "," << a << "] disagrees with the cover family";
                return err.str();
            }
        }
    return std::nullopt;
}

int64_t model_objective(const std::vector<int8_t>& model, const VariableLayout& layout) {
    int64_t value = 0;
    for (int k = 1; k <= layout.K(); ++k)
        if (is_true(model, layout.used_var(k))) ++value;
    for (int k = 1; k <= layout.K(); ++k)
        for (size_t p = 0; p < layout.preds().size(); ++p)
            for (int m = 1; m <= layout.m_max(static_cast<int>(p)); ++m)
                if (is_true(model, layout.r_var(k, static_cast<int>(p), m))) value += m;
    for (int c = 0; c < layout.num_rules(); ++c)
        for (int k = 1; k <= layout.K(); ++k)
            for (int t = 1; t <= layout.t_max(c); ++t)
                if (is_true(model, layout.use_var(c, k, t))) ++value;
    for (int c = 0; c < layout.num_rules(); ++c)
        for (int a = 0; a < layout.body_size(c); ++a)
            if (is_true(model, layout.covered_var(c, a))) --value;
    return value;
}

}  // namespace maxref
