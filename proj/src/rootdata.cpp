#include "spincm/rootdata.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace spincm {

int height(const RootVec& r) { return std::accumulate(r.begin(), r.end(), 0); }

RootVec negate(const RootVec& r) {
    RootVec out(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) out[i] = -r[i];
    return out;
}

int RootSystem::positive_index(const RootVec& r) const {
    auto it = index_.find(r);
    return it == index_.end() ? -1 : it->second;
}

bool RootSystem::is_root(const RootVec& r) const {
    return positive_index(r) >= 0 || positive_index(negate(r)) >= 0;
}

int RootSystem::pairing_with_coroot(const RootVec& r, int i) const {
    int s = 0;
    for (int k = 0; k < rank; ++k) s += r[k] * cartan[k][i];
    return s;
}

namespace {

std::vector<std::vector<int>> cartan_matrix(char type, int n) {
    auto bad = [&](const char* constraint) {
        std::ostringstream os;
        os << "invalid simple type " << type << n << ": " << constraint;
        throw std::invalid_argument(os.str());
    };
    std::vector<std::vector<int>> a(n, std::vector<int>(n, 0));
    auto chain = [&]() {
        for (int i = 0; i < n; ++i) {
            a[i][i] = 2;
            if (i + 1 < n) a[i][i + 1] = a[i + 1][i] = -1;
        }
    };
    switch (type) {
        case 'A':
            if (n < 1) bad("A requires rank >= 1");
            chain();
            break;
        case 'B':
            // alpha_n short: <alpha_{n-1}, alpha_n^vee> = -2
            if (n < 2) bad("B requires rank >= 2");
            chain();
            a[n - 2][n - 1] = -2;
            break;
        case 'C':
            // alpha_n long: <alpha_n, alpha_{n-1}^vee> = -2
            if (n < 2) bad("C requires rank >= 2");
            chain();
            a[n - 1][n - 2] = -2;
            break;
        case 'D':
            if (n < 4) bad("D requires rank >= 4");
            chain();
            a[n - 2][n - 1] = a[n - 1][n - 2] = 0;
            a[n - 3][n - 1] = a[n - 1][n - 3] = -1;
            break;
        case 'E':
            // Bourbaki numbering: node 2 attached to node 4 of the chain 1-3-4-5-...
            if (n < 6 || n > 8) bad("E requires rank 6, 7 or 8");
            for (int i = 0; i < n; ++i) a[i][i] = 2;
            a[0][2] = a[2][0] = -1;
            a[1][3] = a[3][1] = -1;
            for (int i = 2; i + 1 < n; ++i) a[i][i + 1] = a[i + 1][i] = -1;
            break;
        case 'F':
            if (n != 4) bad("F requires rank 4");
            chain();
            a[1][2] = -2;
            a[2][1] = -1;
            break;
        case 'G':
            if (n != 2) bad("G requires rank 2");
            a[0][0] = a[1][1] = 2;
            a[0][1] = -3;
            a[1][0] = -1;
            break;
        default:
            bad("type must be one of A,B,C,D,E,F,G");
    }
    return a;
}

}  // namespace

RootSystem build_root_system(char type, int rank) {
    RootSystem rs;
    rs.type = type;
    rs.rank = rank;
    rs.cartan = cartan_matrix(type, rank);

    // Close the simple roots under addition of simple roots, height by height.
    // alpha + alpha_i is a root iff q = p - <alpha, alpha_i^vee> >= 1, where p
    // is the length of the alpha_i-string below alpha.
    std::set<RootVec> found;
    std::vector<RootVec> frontier;
    for (int i = 0; i < rank; ++i) {
        RootVec e(rank, 0);
        e[i] = 1;
        found.insert(e);
        frontier.push_back(e);
    }
    const int height_guard = 4 * rank * rank + 32;  // comfortably above h - 1 for every simple type
    int ht = 1;
    while (!frontier.empty() && ht <= height_guard) {
        std::vector<RootVec> next;
        for (const RootVec& alpha : frontier) {
            for (int i = 0; i < rank; ++i) {
                int p = 0;
                RootVec down = alpha;
                while (true) {
                    down[i] -= 1;
                    bool nonneg = std::all_of(down.begin(), down.end(), [](int c) { return c >= 0; });
                    bool is_zero = std::all_of(down.begin(), down.end(), [](int c) { return c == 0; });
                    if (is_zero || !nonneg || !found.count(down)) break;
                    ++p;
                }
                const int q = p - rs.pairing_with_coroot(alpha, i);
                if (q >= 1) {
                    RootVec up = alpha;
                    up[i] += 1;
                    if (!found.count(up)) {
                        found.insert(up);
                        next.push_back(up);
                    }
                }
            }
        }
        frontier = std::move(next);
        ++ht;
    }
    if (!frontier.empty())
        throw std::logic_error("root enumeration exceeded its height guard");

    rs.positive_roots.assign(found.begin(), found.end());
    std::stable_sort(rs.positive_roots.begin(), rs.positive_roots.end(),
                     [](const RootVec& a, const RootVec& b) { return height(a) < height(b); });
    for (int i = 0; i < rs.positive_count(); ++i) rs.index_[rs.positive_roots[i]] = i;
    return rs;
}

ExponentData exponent_data(const RootSystem& rs) {
    ExponentData ed;
    ed.heights.reserve(rs.positive_roots.size());
    int hmax = 0;
    for (const RootVec& r : rs.positive_roots) {
        ed.heights.push_back(height(r));
        hmax = std::max(hmax, ed.heights.back());
    }
    ed.coxeter_number = hmax + 1;
    ed.b.assign(hmax, 0);
    for (int h : ed.heights) ed.b[h - 1] += 1;
    // multiplicity of j as an exponent is b_j - b_{j+1}
    for (int j = 1; j <= hmax; ++j) {
        const int bj = ed.b[j - 1];
        const int bj1 = j < hmax ? ed.b[j] : 0;
        for (int c = 0; c < bj - bj1; ++c) ed.exponents.push_back(j);
    }
    for (int m : ed.exponents) ed.degrees.push_back(m + 1);
    return ed;
}

ExponentSumReport verify_shephard_todd(const ExponentData& ed, const RootSystem& rs) {
    ExponentSumReport rep;
    rep.exponent_sum = std::accumulate(ed.exponents.begin(), ed.exponents.end(), 0L);
    rep.positive_count = rs.positive_count();
    rep.half_codim = (rs.dim() - rs.rank) / 2;
    rep.ok = rep.exponent_sum == rep.positive_count && rep.positive_count == rep.half_codim;
    return rep;
}

std::vector<RootVec> root_span(const RootSystem& rs, const std::vector<int>& simple_subset) {
    std::vector<bool> in(rs.rank, false);
    for (int i : simple_subset) {
        if (i < 0 || i >= rs.rank)
            throw std::invalid_argument("root_span: index " + std::to_string(i) +
                                        " is not a simple root of rank-" + std::to_string(rs.rank) +
                                        " system");
        in[i] = true;
    }
    std::vector<RootVec> out;
    for (const RootVec& r : rs.positive_roots) {
        bool supported = true;
        for (int k = 0; k < rs.rank; ++k)
            if (r[k] != 0 && !in[k]) supported = false;
        if (supported) {
            out.push_back(r);
            out.push_back(negate(r));
        }
    }
    return out;
}

bool validate_closed_subset(const RootSystem& rs, const std::vector<RootVec>& subset) {
    std::set<RootVec> s(subset.begin(), subset.end());
    for (const RootVec& r : s)
        if (!s.count(negate(r))) return false;
    for (const RootVec& a : s) {
        for (const RootVec& b : s) {
            RootVec sum(rs.rank);
            for (int k = 0; k < rs.rank; ++k) sum[k] = a[k] + b[k];
            if (rs.is_root(sum) && !s.count(sum)) return false;
        }
    }
    return true;
}

}  // namespace spincm
