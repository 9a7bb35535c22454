#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace maxref {

// Source of fresh 1-based variable ids for clause-side encodings.
class VarAllocator {
  public:
    virtual int alloc_aux_var() = 0;
    virtual ~VarAllocator() = default;
};

// Appends clauses equivalent to guard -> (sum of lits <= bound), using a
// BDD over the running count. No clauses are emitted when the bound cannot
// be exceeded; a bound of 1 uses pairwise at-most-one clauses.
void lower_pb_card(int guard, const std::vector<int>& lits, int bound, VarAllocator& alloc,
                   std::vector<std::vector<int>>& out);

// Binary adder network for sum(weight_i * [lit_i true]); returns the output
// bit literals, least significant first. Positive weights only.
std::vector<int> encode_weighted_sum(const std::vector<std::pair<int, uint64_t>>& terms,
                                     VarAllocator& alloc, std::vector<std::vector<int>>& out);

// Appends clauses forcing the binary number given by `bits` (LSB first) to
// be <= bound.
void encode_leq_const(const std::vector<int>& bits, uint64_t bound, VarAllocator& alloc,
                      std::vector<std::vector<int>>& out);

}  // namespace maxref
