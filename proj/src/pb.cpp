#include "maxrefactor/pb.hpp"

#include <cassert>
#include <deque>
#include <map>

namespace maxref {

namespace {

// Node outcome of the threshold BDD: constant or a fresh variable.
struct NodeRef {
    enum Kind { True, False, Var } kind;
    int var = 0;
};

// node(i, budget) is true iff sum of lits[i..] <= budget.
NodeRef build_card_node(const std::vector<int>& lits, int i, int budget, VarAllocator& alloc,
                        std::vector<std::vector<int>>& out,
                        std::map<std::pair<int, int>, NodeRef>& memo) {
    int remaining = static_cast<int>(lits.size()) - i;
    if (budget < 0) return {NodeRef::False};
    if (budget >= remaining) return {NodeRef::True};
    auto key = std::make_pair(i, budget);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;

    NodeRef hi = build_card_node(lits, i + 1, budget - 1, alloc, out, memo);
    NodeRef lo = build_card_node(lits, i + 1, budget, alloc, out, memo);
    NodeRef node{NodeRef::Var, alloc.alloc_aux_var()};
    // node & lit -> hi, node -> lo (monotone in the budget).
    if (hi.kind == NodeRef::False)
        out.push_back({-node.var, -lits[i]});
    else if (hi.kind == NodeRef::Var)
        out.push_back({-node.var, -lits[i], hi.var});
    if (lo.kind == NodeRef::False)
        out.push_back({-node.var});
    else if (lo.kind == NodeRef::Var)
        out.push_back({-node.var, lo.var});
    memo.emplace(key, node);
    return node;
}

}  // namespace

void lower_pb_card(int guard, const std::vector<int>& lits, int bound, VarAllocator& alloc,
                   std::vector<std::vector<int>>& out) {
    assert(bound >= 0);
    int n = static_cast<int>(lits.size());
    if (bound >= n) return;
    if (bound == 0) {
        for (int l : lits) out.push_back({-guard, -l});
        return;
    }
    if (bound == 1) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) out.push_back({-guard, -lits[i], -lits[j]});
        return;
    }
    std::map<std::pair<int, int>, NodeRef> memo;
    NodeRef hi = build_card_node(lits, 1, bound - 1, alloc, out, memo);
    NodeRef lo = build_card_node(lits, 1, bound, alloc, out, memo);
    // The guard plays the role of the root node.
    if (hi.kind == NodeRef::False)
        out.push_back({-guard, -lits[0]});
    else if (hi.kind == NodeRef::Var)
        out.push_back({-guard, -lits[0], hi.var});
    if (lo.kind == NodeRef::False)
        out.push_back({-guard});
    else if (lo.kind == NodeRef::Var)
        out.push_back({-guard, lo.var});
}

namespace {

void full_adder(int a, int b, int c, int sum, int carry, std::vector<std::vector<int>>& out) {
    out.push_back({a, b, c, -sum});
    out.push_back({a, -b, -c, -sum});
    out.push_back({-a, b, -c, -sum});
    out.push_back({-a, -b, c, -sum});
    out.push_back({-a, -b, -c, sum});
    out.push_back({-a, b, c, sum});
    out.push_back({a, -b, c, sum});
    out.push_back({a, b, -c, sum});
    out.push_back({-a, -b, carry});
    out.push_back({-a, -c, carry});
    out.push_back({-b, -c, carry});
    out.push_back({a, b, -carry});
    out.push_back({a, c, -carry});
    out.push_back({b, c, -carry});
}

void half_adder(int a, int b, int sum, int carry, std::vector<std::vector<int>>& out) {
    out.push_back({a, b, -sum});
    out.push_back({-a, -b, -sum});
    out.push_back({-a, b, sum});
    out.push_back({a, -b, sum});
    out.push_back({-a, -b, carry});
    out.push_back({a, -carry});
    out.push_back({b, -carry});
}

}  // namespace

std::vector<int> encode_weighted_sum(const std::vector<std::pair<int, uint64_t>>& terms,
                                     VarAllocator& alloc, std::vector<std::vector<int>>& out) {
    std::vector<std::deque<int>> buckets;
    for (const auto& [lit, weight] : terms) {
        assert(weight > 0);
        for (int b = 0; b < 64; ++b) {
            if ((weight >> b) & 1) {
                if (static_cast<size_t>(b) >= buckets.size()) buckets.resize(b + 1);
                buckets[b].push_back(lit);
            }
        }
    }
    std::vector<int> bits;
    for (size_t b = 0; b < buckets.size(); ++b) {
        while (buckets[b].size() >= 2) {
            if (b + 1 >= buckets.size()) buckets.resize(b + 2);
            int sum = alloc.alloc_aux_var();
            int carry = alloc.alloc_aux_var();
            if (buckets[b].size() >= 3) {
                int x = buckets[b].front();
                buckets[b].pop_front();
                int y = buckets[b].front();
                buckets[b].pop_front();
                int z = buckets[b].front();
                buckets[b].pop_front();
                full_adder(x, y, z, sum, carry, out);
            } else {
                int x = buckets[b].front();
                buckets[b].pop_front();
                int y = buckets[b].front();
                buckets[b].pop_front();
                half_adder(x, y, sum, carry, out);
            }
            buckets[b].push_back(sum);
            buckets[b + 1].push_back(carry);
        }
        bits.push_back(buckets[b].empty() ? 0 : buckets[b].front());
    }
    // Strip a trailing all-zero region.
    while (!bits.empty() && bits.back() == 0) bits.pop_back();
    return bits;
}

void encode_leq_const(const std::vector<int>& bits, uint64_t bound, VarAllocator& alloc,
                      std::vector<std::vector<int>>& out) {
    int w = static_cast<int>(bits.size());
    if (w == 0) return;
    if (w < 64 && bound >= (1ull << w) - 1) return;
    if (bound == 0) {
        for (int bit : bits)
            if (bit != 0) out.push_back({-bit});
        return;
    }
    // Bits above the bound's width must be zero; below, a chain of
    // prefix-equality variables enforces the lexicographic comparison.
    int prev = 0;  // 0 denotes the constant-true prefix
    for (int i = w - 1; i >= 0; --i) {
        int bit = bits[i];
        bool bi = (bound >> i) & 1;
        if (bit == 0) {
            // Constant-zero adder output: strictly below a 1-bit of the
            // bound, so nothing below can push the value over it.
            if (bi) break;
            continue;
        }
        if (!bi) {
            if (prev == 0)
                out.push_back({-bit});
            else
                out.push_back({-prev, -bit});
        }
        if (i == 0) break;
        int e = alloc.alloc_aux_var();
        int match = bi ? bit : -bit;
        out.push_back({-e, match});
        if (prev != 0) {
            out.push_back({-e, prev});
            out.push_back({e, -match, -prev});
        } else {
            out.push_back({e, -match});
        }
        prev = e;
    }
}

}  // namespace maxref
