#ifndef SPINCM_ROOTDATA_HPP
#define SPINCM_ROOTDATA_HPP

#include <map>
#include <vector>

#include "spincm/common.hpp"

namespace spincm {

// A root as its integer coefficient vector over the simple roots.  Positive
// roots have all-nonnegative entries, negative roots all-nonpositive.
using RootVec = std::vector<int>;

int height(const RootVec& r);
RootVec negate(const RootVec& r);

// Root system of a simple Lie algebra, pure combinatorics.  All simple types
// A-G are supported here; matrix realizations (liealg) cover A-D only.
class RootSystem {
public:
    char type = 'A';
    int rank = 0;
    std::vector<std::vector<int>> cartan;    // cartan[i][j] = <alpha_i, alpha_j^vee>
    std::vector<RootVec> positive_roots;     // sorted by height, then lexicographically

    int positive_count() const { return static_cast<int>(positive_roots.size()); }
    int root_count() const { return 2 * positive_count(); }
    int dim() const { return 2 * positive_count() + rank; }  // dim g = 2|D+| + N

    // the simple roots are the unit coefficient vectors in this basis
    std::vector<RootVec> simple_roots() const {
        std::vector<RootVec> out(rank, RootVec(rank, 0));
        for (int i = 0; i < rank; ++i) out[i][i] = 1;
        return out;
    }

    // index into positive_roots, or -1
    int positive_index(const RootVec& r) const;
    bool is_root(const RootVec& r) const;  // either sign

    // <r, alpha_i^vee> for arbitrary integer vectors r
    int pairing_with_coroot(const RootVec& r, int i) const;

private:
    friend RootSystem build_root_system(char, int);
    std::map<RootVec, int> index_;
};

// Throws std::invalid_argument for an invalid (type, rank) combination.
// Supported: A n>=1, B n>=2, C n>=2, D n>=4, E 6..8, F 4, G 2.
RootSystem build_root_system(char type, int rank);

// Height statistics of a root system: heights, the height-count partition
// b_j, the exponents m_k with multiplicity b_j - b_{j+1}, the degrees
// d_k = m_k + 1 and the Coxeter number h = 1 + max height.
struct ExponentData {
    std::vector<int> heights;    // aligned with positive_roots
    std::vector<int> b;          // b[j-1] = #{alpha > 0 : ht(alpha) = j}
    std::vector<int> exponents;  // ascending
    std::vector<int> degrees;    // exponents + 1
    int coxeter_number = 0;
};

ExponentData exponent_data(const RootSystem& rs);

// Checks sum(m_k) = |D+| = (dim g - N)/2 and reports all three numbers.
struct ExponentSumReport {
    long exponent_sum = 0;
    long positive_count = 0;
    long half_codim = 0;  // (dim g - N)/2
    bool ok = false;
};

ExponentSumReport verify_shephard_todd(const ExponentData& ed, const RootSystem& rs);

// All roots supported on the given subset of simple roots (indices into the
// simple system).  Throws std::invalid_argument on an out-of-range index.
std::vector<RootVec> root_span(const RootSystem& rs, const std::vector<int>& simple_subset);

// True iff the subset is closed under addition (within the root system) and
// under negation.
bool validate_closed_subset(const RootSystem& rs, const std::vector<RootVec>& subset);

}  // namespace spincm

#endif
