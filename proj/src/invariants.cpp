#include "spincm/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace spincm {

cplx pfaffian(const Matrix& a) {
    const int n = static_cast<int>(a.rows());
    if (n % 2 != 0) throw std::invalid_argument("pfaffian: odd dimension");
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    // expansion along the first remaining row
    std::function<cplx(std::vector<int>&)> go = [&](std::vector<int>& rows) -> cplx {
        if (rows.empty()) return 1.0;
        const int r0 = rows[0];
        cplx acc = 0;
        double sign = 1.0;
        for (std::size_t j = 1; j < rows.size(); ++j) {
            const cplx aij = a(r0, rows[j]);
            if (aij != 0.0) {
                std::vector<int> rest;
                rest.reserve(rows.size() - 2);
                for (std::size_t k = 1; k < rows.size(); ++k)
                    if (k != j) rest.push_back(rows[k]);
                acc += sign * aij * go(rest);
            }
            sign = -sign;
        }
        return acc;
    };
    return go(idx);
}

cplx PrimitiveInvariant::eval(const Matrix& m) const {
    if (kind == Kind::pfaffian) {
        // the defining matrices satisfy (S m)^T = -S m with S the flip matrix
        const int n = static_cast<int>(m.rows());
        Matrix sm(n, n);
        for (int i = 0; i < n; ++i) sm.row(i) = m.row(n - 1 - i);
        return pfaffian(sm);
    }
    Matrix acc = m;
    for (int k = 1; k < power; ++k) acc = acc * m;
    return acc.trace();
}

std::vector<PrimitiveInvariant> primitive_invariants(const AlgebraRealization& alg) {
    const char type = alg.roots.type;
    const int N = alg.roots.rank;
    std::vector<PrimitiveInvariant> gens;
    if (type == 'A') {
        for (int k = 1; k <= N; ++k)
            gens.push_back({k, k + 1, PrimitiveInvariant::Kind::trace_power, k + 1});
    } else if (type == 'B' || type == 'C') {
        for (int k = 1; k <= N; ++k)
            gens.push_back({k, 2 * k, PrimitiveInvariant::Kind::trace_power, 2 * k});
    } else if (type == 'D') {
        for (int k = 1; k < N; ++k)
            gens.push_back({k, 2 * k, PrimitiveInvariant::Kind::trace_power, 2 * k});
        gens.push_back({N, N, PrimitiveInvariant::Kind::pfaffian, 0});
        std::stable_sort(gens.begin(), gens.end(),
                         [](const auto& a, const auto& b) { return a.degree < b.degree; });
        for (int k = 0; k < N; ++k) gens[k].index = k + 1;
    } else {
        throw CapabilityError("primitive invariants need a matrix realization (types A-D)");
    }
    for (int k = 0; k < N; ++k)
        if (gens[k].degree != alg.exps.degrees[k])
            throw std::logic_error("invariant degrees disagree with the exponent data");
    return gens;
}

int DirectionMultiset::total_degree() const {
    int d = 0;
    for (const auto& [dir, m] : items) d += m;
    return d;
}

PairingResult pairing(const DirectionMultiset& ds, const PrimitiveInvariant& inv) {
    const int d = inv.degree;
    if (ds.total_degree() != d) return {0.0, false};

    const int r = static_cast<int>(ds.items.size());
    std::vector<Matrix> dirs(r);
    std::vector<int> mult(r);
    cplx scale = 1.0;
    for (int t = 0; t < r; ++t) {
        mult[t] = ds.items[t].second;
        Matrix m = ds.items[t].first.matrix();
        const double nrm = m.norm();
        if (nrm == 0.0) return {0.0, true};
        for (int c = 0; c < mult[t]; ++c) scale *= nrm;
        dirs[t] = m / nrm;
    }

    // <prod d_{w_t}^{n_t}, f> = sum over 0 <= j_t <= n_t of
    //   prod C(n_t, j_t) (-1)^{d - sum j_t} f(sum j_t w_t)
    std::vector<int> j(r, 0);
    cplx acc = 0;
    while (true) {
        int jsum = 0;
        double binom = 1.0;
        for (int t = 0; t < r; ++t) {
            jsum += j[t];
            // C(n, j) accumulated incrementally would be cleaner; sizes are tiny
            double c = 1.0;
            for (int q = 0; q < j[t]; ++q) c = c * (mult[t] - q) / (q + 1);
            binom *= c;
        }
        if (jsum > 0) {
            Matrix x = Matrix::Zero(dirs[0].rows(), dirs[0].cols());
            for (int t = 0; t < r; ++t)
                if (j[t] > 0) x += static_cast<double>(j[t]) * dirs[t];
            const double sign = (d - jsum) % 2 == 0 ? 1.0 : -1.0;
            acc += sign * binom * inv.eval(x);
        }
        int t = 0;
        while (t < r && j[t] == mult[t]) j[t++] = 0;
        if (t == r) break;
        ++j[t];
    }
    return {scale * acc, true};
}

DirectionMultiset to_directions(const AlgebraRealization& alg, const WeightedMultiset& wm) {
    DirectionMultiset ds;
    if (wm.cartan_mult > 0) ds.items.push_back({alg.cartan_element(wm.cartan_dir), wm.cartan_mult});
    for (const auto& [r, m] : wm.root_dirs)
        if (m > 0) ds.items.push_back({alg.basis_element(alg.root_coord(r)), m});
    return ds;
}

bool check_weight_selection(const AlgebraRealization& alg, const WeightedMultiset& wm,
                            const PrimitiveInvariant& inv, double tol) {
    RootVec weight(alg.roots.rank, 0);
    for (const auto& [r, m] : wm.root_dirs) {
        const RootVec c = alg.root_coeffs(r);
        for (int i = 0; i < alg.roots.rank; ++i) weight[i] += m * c[i];
    }
    const bool zero_weight = std::all_of(weight.begin(), weight.end(), [](int c) { return c == 0; });
    if (zero_weight) return true;  // rule is vacuous
    // compare on unit-Frobenius directions so the tolerance is absolute
    DirectionMultiset ds = to_directions(alg, wm);
    for (auto& [dir, mult] : ds.items) {
        const double nrm = dir.frobenius();
        if (nrm > 0) dir = dir * (1.0 / nrm);
    }
    const PairingResult pr = pairing(ds, inv);
    return std::abs(pr.value) <= tol;
}

TransferCheck check_transfer_identity(const AlgebraRealization& alg, const AlgebraElement& x,
                                      const AlgebraElement& y, const AlgebraElement& z, int m,
                                      int n, const PrimitiveInvariant& inv, double tol) {
    TransferCheck out;
    DirectionMultiset lhs;
    if (m > 0) lhs.items.push_back({x, m});
    lhs.items.push_back({alg.bracket(x, y), 1});
    if (n > 0) lhs.items.push_back({z, n});
    out.lhs = pairing(lhs, inv).value;
    if (n == 0) {
        out.rhs = 0.0;
    } else {
        DirectionMultiset rhs;
        rhs.items.push_back({x, m + 1});
        rhs.items.push_back({alg.bracket(y, z), 1});
        if (n > 1) rhs.items.push_back({z, n - 1});
        out.rhs = (static_cast<double>(n) / (m + 1)) * pairing(rhs, inv).value;
    }
    const double scale = std::max({std::abs(out.lhs), std::abs(out.rhs), 1.0});
    out.ok = std::abs(out.lhs - out.rhs) <= tol * scale;
    return out;
}

std::vector<cplx> f_coefficients(const AlgebraRealization& alg, const Vector& p_cartan,
                                 const AlgebraElement& xi, const PrimitiveInvariant& inv) {
    const int d = inv.degree;
    const int nn = d + 1;
    const Matrix pm = alg.cartan_element(p_cartan).matrix();
    const Matrix xm = xi.matrix();
    std::vector<cplx> vals(nn);
    for (int t = 0; t < nn; ++t) {
        const cplx u = std::polar(1.0, 2.0 * pi * t / nn);
        vals[t] = inv.eval(pm + u * xm);
    }
    std::vector<cplx> coef(nn);
    for (int j = 0; j < nn; ++j) {
        cplx s = 0;
        for (int t = 0; t < nn; ++t) s += vals[t] * std::polar(1.0, -2.0 * pi * j * t / nn);
        coef[j] = s / static_cast<double>(nn);
    }
    return coef;
}

}  // namespace spincm
