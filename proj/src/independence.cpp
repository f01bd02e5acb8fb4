#include "spincm/independence.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace spincm {

namespace {

constexpr double fd_step = 1e-5;

// family-independent coefficient functions F_kj on (p, xi)
std::vector<std::vector<cplx>> f_table(const AlgebraRealization& alg,
                                       const std::vector<PrimitiveInvariant>& invs,
                                       const Vector& p, const AlgebraElement& xi) {
    std::vector<std::vector<cplx>> out(invs.size());
    for (std::size_t k = 0; k < invs.size(); ++k) out[k] = f_coefficients(alg, p, xi, invs[k]);
    return out;
}

// positive-root indices grouped by height, in the global positive-root order
std::vector<std::vector<int>> height_groups(const AlgebraRealization& alg) {
    const int hmax = alg.exps.coxeter_number - 1;
    std::vector<std::vector<int>> groups(hmax);
    for (int r = 0; r < alg.positive_count(); ++r)
        groups[alg.root_height(r) - 1].push_back(r);
    return groups;
}

}  // namespace

OrderedIndexing ordered_indexing(const AlgebraRealization& alg) {
    OrderedIndexing oi;
    const int N = alg.roots.rank;
    const auto& d = alg.exps.degrees;
    const auto& b = alg.exps.b;
    const int h = alg.exps.coxeter_number;
    for (int k = 1; k <= N; ++k) oi.functions.push_back({k, 0});
    for (int j = 2; j <= h; ++j)
        for (int k = 1; k <= N; ++k)
            if (d[k - 1] >= j) oi.functions.push_back({k, j});
    for (const auto& grp : height_groups(alg))
        for (int r : grp) oi.xi_variables.push_back(r);
    oi.block_sizes.push_back(N);
    for (int s = 1; s < h; ++s) oi.block_sizes.push_back(b[s - 1]);
    return oi;
}

DerivativeBlocks build_derivative_blocks(const AlgebraRealization& alg,
                                         const std::vector<PrimitiveInvariant>& invs,
                                         const Vector& p) {
    const int N = alg.roots.rank, P = alg.positive_count();
    for (int r = 0; r < P; ++r)
        if (std::abs(alg.root_value(r, p)) <= 0.1)
            throw std::invalid_argument("build_derivative_blocks: p is not regular");

    const OrderedIndexing oi = ordered_indexing(alg);
    const AlgebraElement eps = alg.principal_nilpotent_neg();
    const int rows = static_cast<int>(oi.functions.size());
    const int cols = N + P;

    // stencil evaluations: vary one variable at a time around (p, eps)
    auto values_at = [&](const Vector& pp, const AlgebraElement& xx) {
        const auto ft = f_table(alg, invs, pp, xx);
        Vector v(rows);
        for (int e = 0; e < rows; ++e) v[e] = ft[oi.functions[e].first - 1][oi.functions[e].second];
        return v;
    };

    DerivativeBlocks db;
    db.full.resize(rows, cols);
    for (int c = 0; c < cols; ++c) {
        Vector stencil[4];
        const double steps[4] = {2 * fd_step, fd_step, -fd_step, -2 * fd_step};
        for (int s = 0; s < 4; ++s) {
            Vector pp = p;
            AlgebraElement xx = eps;
            if (c < N) {
                pp[c] += steps[s];
            } else {
                Vector xc = eps.coords();
                xc[alg.root_coord(oi.xi_variables[c - N])] += steps[s];
                xx = alg.element(std::move(xc));
            }
            stencil[s] = values_at(pp, xx);
        }
        db.full.col(c) =
            (-stencil[0] + 8.0 * stencil[1] - 8.0 * stencil[2] + stencil[3]) / (12.0 * fd_step);
    }

    // cut the diagonal blocks and measure the above-diagonal mass
    const int nblocks = static_cast<int>(oi.block_sizes.size());
    db.blocks.resize(nblocks);
    int off = 0;
    double diag_scale = 0, above = 0;
    std::vector<int> offsets(nblocks);
    for (int bidx = 0; bidx < nblocks; ++bidx) {
        offsets[bidx] = off;
        off += oi.block_sizes[bidx];
    }
    for (int bidx = 0; bidx < nblocks; ++bidx) {
        const int sz = oi.block_sizes[bidx];
        db.blocks[bidx] = db.full.block(offsets[bidx], offsets[bidx], sz, sz);
        diag_scale = std::max(diag_scale, db.blocks[bidx].cwiseAbs().maxCoeff());
        for (int cb = bidx + 1; cb < nblocks; ++cb)
            above = std::max(above, db.full
                                        .block(offsets[bidx], offsets[cb], sz,
                                               oi.block_sizes[cb])
                                        .cwiseAbs()
                                        .maxCoeff());
    }
    db.off_block_mass = above / std::max(diag_scale, 1e-300);
    return db;
}

bool DetFormulaReport::ok(double tol) const {
    if (!dets_nonzero) return false;
    for (double s : ratio_rel_std)
        if (s > tol) return false;
    for (double s : recursion_rel_std)
        if (s > tol) return false;
    return total_rel_std <= tol;
}

DetFormulaReport verify_det_formula(const AlgebraRealization& alg,
                                    const std::vector<PrimitiveInvariant>& invs,
                                    const std::vector<Vector>& p_samples, double tol) {
    if (p_samples.size() < 3)
        throw std::invalid_argument("verify_det_formula: need at least 3 regular p samples");
    const int h = alg.exps.coxeter_number;
    const auto groups = height_groups(alg);
    const int S = static_cast<int>(p_samples.size());

    std::vector<std::vector<cplx>> ratios(h), recursion(h - 1);
    std::vector<cplx> total;
    DetFormulaReport rep;
    for (const Vector& p : p_samples) {
        const DerivativeBlocks db = build_derivative_blocks(alg, invs, p);
        rep.max_off_block_mass = std::max(rep.max_off_block_mass, db.off_block_mass);
        std::vector<cplx> det(h);
        for (int j = 0; j < h; ++j) {
            det[j] = db.blocks[j].determinant();
            rep.min_abs_det = std::min(rep.min_abs_det, std::abs(det[j]));
            cplx prod = 1.0;
            for (int jj = j + 1; jj < h; ++jj)
                for (int r : groups[jj - 1]) prod *= alg.root_value(r, p);
            ratios[j].push_back(det[j] / prod);
        }
        for (int j = 1; j < h; ++j) {
            cplx prod = 1.0;
            for (int r : groups[j - 1]) prod *= alg.root_value(r, p);
            recursion[j - 1].push_back(det[j] * prod / det[j - 1]);
        }
        cplx tprod = 1.0;
        for (int r = 0; r < alg.positive_count(); ++r)
            tprod *= std::pow(alg.root_value(r, p), alg.root_height(r));
        total.push_back(db.full.determinant() / tprod);
    }

    auto rel_std = [S](const std::vector<cplx>& v) {
        cplx mean = 0;
        for (const cplx& x : v) mean += x;
        mean /= static_cast<double>(S);
        double var = 0;
        for (const cplx& x : v) var += std::norm(x - mean);
        return std::sqrt(var / S) / std::max(std::abs(mean), 1e-300);
    };
    for (int j = 0; j < h; ++j) {
        cplx mean = 0;
        for (const cplx& x : ratios[j]) mean += x;
        rep.ratio_mean.push_back(mean / static_cast<double>(S));
        rep.ratio_rel_std.push_back(rel_std(ratios[j]));
    }
    for (int j = 1; j < h; ++j) rep.recursion_rel_std.push_back(rel_std(recursion[j - 1]));
    rep.total_rel_std = rel_std(total);
    rep.dets_nonzero = rep.min_abs_det > 1e-12;
    (void)tol;
    return rep;
}

Eigen::MatrixXcd lowering_matrix(const AlgebraRealization& alg, int j) {
    const int h = alg.exps.coxeter_number;
    if (j < 2 || j > h - 1)
        throw std::invalid_argument("lowering_matrix: need 2 <= j <= h-1");
    const auto groups = height_groups(alg);
    const auto& hi = groups[j - 1];
    const auto& lo = groups[j - 2];
    const AlgebraElement eps = alg.principal_nilpotent_neg();
    Eigen::MatrixXcd a(lo.size(), hi.size());
    for (std::size_t i = 0; i < hi.size(); ++i) {
        const AlgebraElement br =
            alg.bracket(alg.basis_element(alg.root_coord(hi[i])), eps);
        double outside = 0;
        Vector rest = br.coords();
        for (std::size_t n = 0; n < lo.size(); ++n) {
            a(n, i) = br.root(lo[n]);
            rest[alg.root_coord(lo[n])] = 0;
        }
        outside = rest.lpNorm<Eigen::Infinity>();
        if (outside > 1e-10)
            throw std::logic_error("lowering_matrix: bracket left the height-(j-1) span");
    }
    return a;
}

int lowering_rank(const Eigen::MatrixXcd& a) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] > 1e-10 * sv[0]) ++rank;
    return rank;
}

RankReport jacobian_rank(const LaxFamily& fam, const AlgebraRealization& alg,
                         const std::vector<PrimitiveInvariant>& invs, const PhasePoint& pt,
                         bool include_j1) {
    const int C = phase_coord_count(alg);
    std::vector<std::pair<int, int>> retained;
    int expected = 0;
    for (std::size_t k = 0; k < invs.size(); ++k) {
        for (int j = 0; j <= invs[k].degree; ++j) {
            if (j == 1 && !include_j1) continue;
            if (j == 1 && fam.kind == FamilyKind::elliptic) continue;  // slot absent
            retained.push_back({static_cast<int>(k) + 1, j});
        }
        expected += invs[k].degree;  // j = 0 and j = 2..d_k
    }

    Eigen::MatrixXcd jac(retained.size(), C);
    const double h = 1e-4;
    for (int c = 0; c < C; ++c) {
        const auto t2p = extract_integrals(fam, alg, invs, shift_coord(alg, pt, c, 2 * h));
        const auto t1p = extract_integrals(fam, alg, invs, shift_coord(alg, pt, c, h));
        const auto t1m = extract_integrals(fam, alg, invs, shift_coord(alg, pt, c, -h));
        const auto t2m = extract_integrals(fam, alg, invs, shift_coord(alg, pt, c, -2 * h));
        for (std::size_t e = 0; e < retained.size(); ++e) {
            const auto [k, j] = retained[e];
            jac(e, c) =
                (-t2p.at(k, j) + 8.0 * t1p.at(k, j) - 8.0 * t1m.at(k, j) + t2m.at(k, j)) /
                (12.0 * h);
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(jac);
    const auto& sv = svd.singularValues();
    RankReport rep;
    rep.expected = expected;
    for (int i = 0; i < sv.size(); ++i) rep.singular_values.push_back(sv[i]);
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] > 1e-8 * sv[0]) ++rep.rank;
    if (rep.rank > 0) {
        // sigma_r over the first dropped scale; against the threshold itself
        // when nothing was dropped
        const double next =
            rep.rank < static_cast<int>(sv.size()) ? sv[rep.rank] : 1e-8 * sv[0];
        rep.margin = sv[rep.rank - 1] / std::max(next, 1e-300);
    }
    return rep;
}

LiouvilleReport liouville_count(const AlgebraRealization& alg, FamilyKind kind) {
    LiouvilleReport rep;
    rep.dim_g = alg.dim;
    rep.rank = alg.roots.rank;
    rep.leaf_dim = alg.dim - alg.roots.rank;
    for (int m : alg.exps.exponents) rep.required += m;
    for (int d : alg.exps.degrees) {
        rep.table_entries += kind == FamilyKind::elliptic ? d : d + 1;  // j=1 absent elliptically
        ++rep.casimirs;                                                 // I_{k,d_k} = I_k(xi)
    }
    rep.dependent = kind == FamilyKind::elliptic ? 0 : alg.roots.rank;
    rep.provided = rep.table_entries - rep.casimirs - rep.dependent;
    rep.ok = rep.provided == rep.required && rep.leaf_dim == 2 * rep.required;
    return rep;
}

RemainderDegreeReport remainder_degree_check(const LaxFamily& fam, const AlgebraRealization& alg,
                                             const std::vector<PrimitiveInvariant>& invs,
                                             Rng& rng) {
    const PhasePoint pt = sample_phase_point(fam, alg, rng, /*on_shell=*/true);
    const int dmax = alg.exps.degrees.back();
    const int M = dmax + 2;

    // one table and one F-table per ray node t_s (unit modulus keeps p regular)
    std::vector<IntegralTable> tables(M);
    std::vector<std::vector<std::vector<cplx>>> fts(M);
    std::vector<cplx> nodes(M);
    for (int s = 0; s < M; ++s) {
        nodes[s] = std::polar(1.0, 2.0 * pi * s / M);
        PhasePoint ps = pt;
        ps.p = nodes[s] * pt.p;
        tables[s] = extract_integrals(fam, alg, invs, ps);
        fts[s] = f_table(alg, invs, ps.p, ps.xi);
    }

    auto dft_coeffs = [&](const std::vector<cplx>& vals) {
        std::vector<cplx> coef(M);
        for (int m = 0; m < M; ++m) {
            cplx acc = 0;
            for (int s = 0; s < M; ++s) acc += vals[s] * std::polar(1.0, -2.0 * pi * m * s / M);
            coef[m] = acc / static_cast<double>(M);
        }
        return coef;
    };

    RemainderDegreeReport rep;
    for (std::size_t k = 0; k < invs.size(); ++k) {
        const int d = invs[k].degree;
        // scale against the whole k-th row so identically-zero remainders are
        // not measured noise-against-noise
        double row_scale = 1e-12;
        for (int s = 0; s < M; ++s)
            for (int j = 0; j <= d; ++j) {
                row_scale = std::max(row_scale, std::abs(tables[s].at(static_cast<int>(k) + 1, j)));
                row_scale = std::max(row_scale, std::abs(fts[s][k][j]));
            }
        for (int j = 0; j <= d; ++j) {
            if (fam.kind == FamilyKind::elliptic && j == 1) continue;
            std::vector<cplx> vals(M);
            for (int s = 0; s < M; ++s)
                vals[s] = tables[s].at(static_cast<int>(k) + 1, j) - fts[s][k][j];
            if (fam.kind == FamilyKind::elliptic && j == 0) {
                // project out the even j' >= 4 integrals the identity is
                // defined modulo
                std::vector<int> feats;
                for (int jp = 4; jp <= d; jp += 2) feats.push_back(jp);
                if (!feats.empty()) {
                    Matrix F(M, feats.size());
                    Vector v(M);
                    for (int s = 0; s < M; ++s) {
                        v[s] = vals[s];
                        for (std::size_t q = 0; q < feats.size(); ++q)
                            F(s, q) = tables[s].at(static_cast<int>(k) + 1, feats[q]);
                    }
                    const Vector c = F.colPivHouseholderQr().solve(v);
                    for (int s = 0; s < M; ++s) {
                        cplx fit = 0;
                        for (std::size_t q = 0; q < feats.size(); ++q) fit += F(s, q) * c[q];
                        vals[s] -= fit;
                    }
                }
            }
            const auto coef = dft_coeffs(vals);
            const int bound = d - j - 1;
            double excess = 0;
            for (int m = 0; m < M; ++m)
                if (m > bound) excess = std::max(excess, std::abs(coef[m]) / row_scale);
            rep.entries.push_back({static_cast<int>(k) + 1, j, bound, excess});
            rep.max_excess = std::max(rep.max_excess, excess);
        }
    }
    return rep;
}

}  // namespace spincm
