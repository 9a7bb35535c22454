#include "maxrefactor/decode.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace maxref {

namespace {

bool is_true(const std::vector<int8_t>& model, int var) {
    return var < static_cast<int>(model.size()) && model[var] > 0;
}

// aux1.. unless the input already owns such a name; then keep prefixing
// underscores until the whole family is fresh.
std::string fresh_aux_prefix(const Program& input, int count) {
    std::string prefix = "aux";
    for (;;) {
        bool clash = false;
        for (int i = 1; i <= count && !clash; ++i)
            if (input.predicate_table.count(prefix + std::to_string(i))) clash = true;
        if (!clash) return prefix;
        prefix += "_";  // aux, aux_, aux__, ...
    }
}

}  // namespace

RefactoringSolution decode(const std::vector<int8_t>& model, const VariableLayout& layout,
                           const Program& input) {
    if (auto violation = check_model_semantics(model, layout))
        throw std::logic_error("model violates hard constraints: " + *violation);

    RefactoringSolution sol;
    sol.input_size = program_size(input);

    // Active invented-rule slots and their body templates.
    std::vector<int> usedSlots;
    std::vector<std::map<std::string, int>> counts(layout.K() + 1);
    for (int k = 1; k <= layout.K(); ++k) {
        for (size_t p = 0; p < layout.preds().size(); ++p)
            for (int m = 1; m <= layout.m_max(static_cast<int>(p)); ++m)
                if (is_true(model, layout.r_var(k, static_cast<int>(p), m)))
                    counts[k][layout.preds()[static_cast<int>(p)]] = m;
        if (is_true(model, layout.used_var(k))) usedSlots.push_back(k);
    }

    std::string prefix = fresh_aux_prefix(input, static_cast<int>(usedSlots.size()));
    std::map<std::string, int> arities = input.predicate_table;
    for (size_t i = 0; i < usedSlots.size(); ++i) {
        LinearAuxRule aux;
        aux.name = prefix + std::to_string(i + 1);
        aux.counts = counts[usedSlots[i]];
        if (aux.counts.empty())
            sol.warnings.push_back("invented rule " + aux.name + " is used with an empty body");
        sol.invented.push_back(std::move(aux));
    }

    Program out;
    out.predicate_table = input.predicate_table;
    for (const auto& aux : sol.invented) {
        Rule r = aux.to_rule(arities);
        out.predicate_table[aux.name] = static_cast<int>(r.head.args.size());
        out.rules.push_back(std::move(r));
    }

    int64_t eq7 = model_objective(model, layout);
    bool collapsed = false;
    sol.coverage.resize(input.rules.size());
    for (size_t c = 0; c < input.rules.size(); ++c) {
        const Rule& rule = input.rules[c];
        std::vector<Literal> auxLits;
        std::vector<AuxInstance> instances;
        for (size_t i = 0; i < usedSlots.size(); ++i) {
            int k = usedSlots[i];
            for (int t = 1; t <= layout.t_max(static_cast<int>(c)); ++t) {
                if (!is_true(model, layout.use_var(static_cast<int>(c), k, t))) break;
                AuxInstance inst;
                inst.aux = static_cast<int>(i + 1);
                std::map<std::string, std::vector<int>> coveredByPred;
                for (int a = 0; a < static_cast<int>(rule.body.size()); ++a)
                    if (is_true(model, layout.cover_var(static_cast<int>(c), a, k, t))) {
                        inst.covered.push_back(a);
                        coveredByPred[rule.body[a].pred].push_back(a);
                    }
                if (inst.covered.empty())
                    sol.warnings.push_back("instance of " + sol.invented[i].name + " in rule " +
                                           std::to_string(c) + " covers nothing");
                // Slot by slot: covered literals in body order, then
                // duplicates of the predicate's first body literal.
                Literal lit;
                lit.pred = sol.invented[i].name;
                for (const auto& [pred, copy] : sol.invented[i].slot_order()) {
                    const Literal* src = nullptr;
                    const auto it = coveredByPred.find(pred);
                    if (it != coveredByPred.end() && copy < static_cast<int>(it->second.size())) {
                        src = &rule.body[it->second[copy]];
                    } else {
                        for (const auto& b : rule.body)
                            if (b.pred == pred) {
                                src = &b;
                                break;
                            }
                    }
                    if (src == nullptr)
                        throw std::logic_error("no literal of predicate " + pred +
                                               " available for duplication in rule " +
                                               std::to_string(c));
                    lit.args.insert(lit.args.end(), src->args.begin(), src->args.end());
                }
                // Two instances with identical arguments collapse under set
                // semantics; merge their coverage.
                auto twin = std::find(auxLits.begin(), auxLits.end(), lit);
                if (twin != auxLits.end()) {
                    collapsed = true;
                    auto& earlier = instances[twin - auxLits.begin()];
                    for (int a : inst.covered)
                        if (std::find(earlier.covered.begin(), earlier.covered.end(), a) ==
                            earlier.covered.end())
                            earlier.covered.push_back(a);
                    std::sort(earlier.covered.begin(), earlier.covered.end());
                    sol.warnings.push_back("two instances in rule " + std::to_string(c) +
                                           " collapsed into one aux literal");
                    continue;
                }
                auxLits.push_back(lit);
                inst.t = 0;  // numbered below
                instances.push_back(std::move(inst));
            }
        }
        std::map<int, int> perAux;
        for (auto& inst : instances) inst.t = ++perAux[inst.aux];
        sol.coverage[c] = std::move(instances);

        std::vector<Literal> body = auxLits;
        for (int a = 0; a < static_cast<int>(rule.body.size()); ++a)
            if (!is_true(model, layout.covered_var(static_cast<int>(c), a)))
                body.push_back(rule.body[a]);
        out.rules.push_back(make_rule(rule.head, std::move(body)));
    }

    sol.refactored = std::move(out);
    sol.output_size = program_size(sol.refactored);
    sol.objective = sol.output_size - sol.input_size;
    if (!collapsed && sol.objective != eq7)
        throw std::logic_error("decoded size disagrees with the model objective (" +
                               std::to_string(sol.objective) + " vs " + std::to_string(eq7) + ")");
    return sol;
}

bool verify_refactoring(const Program& input, const Program& refactored,
                        const std::vector<Rule>& invented, std::string* diagnostic) {
    auto fail = [&](const std::string& msg) {
        if (diagnostic) *diagnostic = msg;
        return false;
    };
    std::set<std::string> auxPreds;
    for (const auto& r : invented) {
        if (input.predicate_table.count(r.head.pred))
            return fail("invented predicate '" + r.head.pred + "' already occurs in the input");
        auxPreds.insert(r.head.pred);
        std::set<int> headVars(r.head.args.begin(), r.head.args.end());
        std::set<int> bodyVars;
        for (const auto& lit : r.body) {
            if (!input.predicate_table.count(lit.pred))
                return fail("invented rule " + to_string(r) +
                            " uses a predicate outside the input program");
            bodyVars.insert(lit.args.begin(), lit.args.end());
        }
        if (headVars != bodyVars)
            return fail("invented rule " + to_string(r) +
                        " must have exactly the body variables in its head");
    }
    Program rest;
    rest.predicate_table = refactored.predicate_table;
    for (const auto& r : refactored.rules)
        if (!auxPreds.count(r.head.pred)) rest.rules.push_back(r);
    if (rest.rules.size() + invented.size() != refactored.rules.size())
        return fail("refactored program does not contain every invented rule exactly once");
    Program unfolded;
    try {
        unfolded = unfold_all(rest, invented);
    } catch (const std::invalid_argument& e) {
        return fail(e.what());
    }
    if (!alpha_equal(unfolded, input)) {
        std::string detail = "unfolded program is not equivalent to the input";
        for (const auto& r : unfolded.rules) {
            bool matched = false;
            for (const auto& s : input.rules)
                if (rules_alpha_equal(r, s)) matched = true;
            if (!matched) {
                detail += "; first mismatching rule: " + to_string(r);
                break;
            }
        }
        return fail(detail);
    }
    return true;
}

bool verify(const Program& input, const RefactoringSolution& sol, std::string* diagnostic) {
    std::map<std::string, int> arities = input.predicate_table;
    std::vector<Rule> invented;
    for (const auto& aux : sol.invented) invented.push_back(aux.to_rule(arities));
    if (!verify_refactoring(input, sol.refactored, invented, diagnostic)) return false;
    if (sol.output_size != program_size(sol.refactored) ||
        sol.output_size != sol.input_size + sol.objective) {
        if (diagnostic)
            *diagnostic = "size bookkeeping mismatch: input " + std::to_string(sol.input_size) +
                          " + objective " + std::to_string(sol.objective) + " != output " +
                          std::to_string(sol.output_size);
        return false;
    }
    return true;
}

double compression_rate(int input_size, int output_size) {
    if (input_size <= 0) throw std::invalid_argument("compression rate needs a non-empty input");
    return static_cast<double>(input_size - output_size) / static_cast<double>(input_size);
}

double normalized_gap(int best_size, int optimal_size, int input_size) {
    if (input_size <= optimal_size)
        throw std::invalid_argument("normalized gap needs input_size > optimal_size");
    return static_cast<double>(best_size - optimal_size) /
           static_cast<double>(input_size - optimal_size);
}

std::string solution_to_text(const RefactoringSolution& sol) {
    std::ostringstream os;
    os << "% objective " << sol.objective << '\n';
    os << "% input_size " << sol.input_size << '\n';
    os << "% output_size " << sol.output_size << '\n';
    os << "% cr " << compression_rate(sol.input_size, sol.output_size) << '\n';
    os << to_string(sol.refactored);
    return os.str();
}

}  // namespace maxref
