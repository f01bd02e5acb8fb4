#include "spincm/lax.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace spincm {

namespace {

constexpr double pole_tol = 1e-8;
const cplx iu(0.0, 1.0);

cplx cot(cplx z) { return std::cos(z) / std::sin(z); }

double factorial(int n) {
    double f = 1.0;
    for (int q = 2; q <= n; ++q) f *= q;
    return f;
}

}  // namespace

std::string family_name(FamilyKind k) {
    switch (k) {
        case FamilyKind::rational: return "rational";
        case FamilyKind::trigonometric: return "trigonometric";
        default: return "elliptic";
    }
}

std::string LaxFamily::describe() const {
    std::ostringstream os;
    os << family_name(kind);
    if (kind == FamilyKind::rational) {
        int count = 0;
        for (char c : member) count += c;
        os << "(|Delta'|=" << count << ")";
    } else if (kind == FamilyKind::trigonometric) {
        os << "(pi'={";
        for (std::size_t i = 0; i < pi_prime.size(); ++i) os << (i ? "," : "") << pi_prime[i] + 1;
        os << "})";
    }
    return os.str();
}

LaxFamily rational_family(const AlgebraRealization& alg, const std::vector<RootVec>& delta_prime) {
    if (!validate_closed_subset(alg.roots, delta_prime))
        throw std::invalid_argument(
            "rational family: subset is not closed under addition and negation");
    LaxFamily fam;
    fam.kind = FamilyKind::rational;
    fam.member.assign(2 * alg.positive_count(), 0);
    for (const RootVec& r : delta_prime) {
        const int idx = alg.root_index(r);
        if (idx < 0) throw std::invalid_argument("rational family: vector is not a root");
        fam.member[idx] = 1;
    }
    return fam;
}

LaxFamily rational_family_full(const AlgebraRealization& alg) {
    LaxFamily fam;
    fam.kind = FamilyKind::rational;
    fam.member.assign(2 * alg.positive_count(), 1);
    return fam;
}

LaxFamily rational_family_span(const AlgebraRealization& alg,
                               const std::vector<int>& simple_subset) {
    return rational_family(alg, root_span(alg.roots, simple_subset));
}

LaxFamily trigonometric_family(const AlgebraRealization& alg, const std::vector<int>& pi_prime) {
    LaxFamily fam;
    fam.kind = FamilyKind::trigonometric;
    fam.pi_prime = pi_prime;
    fam.member.assign(2 * alg.positive_count(), 0);
    for (const RootVec& r : root_span(alg.roots, pi_prime)) fam.member[alg.root_index(r)] = 1;
    return fam;
}

LaxFamily trigonometric_family_full(const AlgebraRealization& alg) {
    std::vector<int> all(alg.roots.rank);
    for (int i = 0; i < alg.roots.rank; ++i) all[i] = i;
    return trigonometric_family(alg, all);
}

LaxFamily elliptic_family(const AlgebraRealization& alg, const Lattice& lattice) {
    LaxFamily fam;
    fam.kind = FamilyKind::elliptic;
    fam.member.assign(2 * alg.positive_count(), 1);
    fam.lattice = std::make_shared<Lattice>(lattice);
    return fam;
}

bool PhasePoint::on_shell(double tol) const {
    return xi.cartan_part().lpNorm<Eigen::Infinity>() < tol;
}

double denominator_margin(const LaxFamily& fam, const AlgebraRealization& alg, const Vector& q) {
    double margin = 1e300;
    for (int r = 0; r < 2 * alg.positive_count(); ++r) {
        const cplx aq = alg.root_value(r, q);
        switch (fam.kind) {
            case FamilyKind::rational:
                if (fam.in_subset(r)) margin = std::min(margin, std::abs(aq));
                break;
            case FamilyKind::trigonometric:
                margin = std::min(margin, std::abs(std::sin(aq)));
                break;
            case FamilyKind::elliptic:
                margin = std::min(margin, fam.lattice->lattice_distance(aq));
                break;
        }
    }
    return margin;
}

AlgebraElement lax_matrix(const LaxFamily& fam, const AlgebraRealization& alg,
                          const PhasePoint& pt, cplx z) {
    const int N = alg.roots.rank, P = alg.positive_count();
    Vector c = Vector::Zero(alg.dim);
    c.head(N) = pt.p;
    switch (fam.kind) {
        case FamilyKind::rational: {
            if (std::abs(z) < pole_tol)
                throw PoleProximityError("lax_matrix: rational spectral parameter z near 0");
            for (int r = 0; r < 2 * P; ++r) {
                if (!fam.in_subset(r)) continue;
                const cplx aq = alg.root_value(r, pt.q);
                if (std::abs(aq) < pole_tol)
                    throw PoleProximityError("lax_matrix: alpha(q) near 0 for a root of Delta'");
                c[alg.root_coord(r)] += pt.xi.root(r) / aq;
            }
            c += pt.xi.coords() / z;
            break;
        }
        case FamilyKind::trigonometric: {
            if (std::abs(std::sin(z)) < pole_tol)
                throw PoleProximityError("lax_matrix: trigonometric spectral parameter near a pole");
            const cplx u = cot(z);
            c += u * pt.xi.coords();
            for (int r = 0; r < 2 * P; ++r) {
                cplx psi;
                if (fam.in_subset(r)) {
                    const cplx aq = alg.root_value(r, pt.q);
                    if (std::abs(std::sin(aq)) < pole_tol)
                        throw PoleProximityError("lax_matrix: sin(alpha(q)) near 0 on the span");
                    psi = cot(aq);
                } else {
                    psi = alg.is_positive(r) ? -iu : iu;
                }
                c[alg.root_coord(r)] += psi * pt.xi.root(r);
            }
            break;
        }
        case FamilyKind::elliptic: {
            const Lattice& lat = *fam.lattice;
            if (lat.lattice_distance(z) < pole_tol)
                throw PoleProximityError("lax_matrix: elliptic spectral parameter near the lattice");
            const cplx sz = weier_sigma(lat, z);
            c.head(N) += weier_zeta(lat, z) * pt.xi.cartan_part();
            for (int r = 0; r < 2 * P; ++r) {
                const cplx w = alg.root_value(r, pt.q);
                if (lat.lattice_distance(w) < pole_tol)
                    throw PoleProximityError("lax_matrix: alpha(q) near the period lattice");
                const cplx l = -weier_sigma(lat, w + z) / (weier_sigma(lat, w) * sz);
                c[alg.root_coord(r)] -= l * pt.xi.root(r);
            }
            break;
        }
    }
    return alg.element(std::move(c));
}

AlgebraElement r_contraction(const LaxFamily& fam, const AlgebraRealization& alg, const Vector& q,
                             const AlgebraElement& xi, cplx z) {
    const int N = alg.roots.rank, P = alg.positive_count();
    const Matrix xm = xi.matrix();
    // Killing pairings through the trace form: (x_i, xi) and (e_{-alpha}, xi)
    Vector cartan_pair(N);
    for (int i = 0; i < N; ++i) cartan_pair[i] = alg.killing_via_trace(alg.basis_matrix(i), xm);
    Vector root_pair(2 * P);  // (e_{-alpha}, xi), indexed by alpha
    for (int r = 0; r < 2 * P; ++r)
        root_pair[r] =
            alg.killing_via_trace(alg.basis_matrix(alg.root_coord(alg.negate_root(r))), xm);

    Vector c = Vector::Zero(alg.dim);
    switch (fam.kind) {
        case FamilyKind::rational: {
            if (std::abs(z) < pole_tol)
                throw PoleProximityError("r_contraction: rational spectral parameter z near 0");
            // Casimir term Omega/z contracted against xi in the second slot
            for (const auto& [a, b] : alg.casimir_pairs())
                c[a] += alg.killing_via_trace(alg.basis_matrix(b), xm) / z;
            for (int r = 0; r < 2 * P; ++r) {
                if (!fam.in_subset(r)) continue;
                const cplx aq = alg.root_value(r, q);
                if (std::abs(aq) < pole_tol)
                    throw PoleProximityError("r_contraction: alpha(q) near 0 for a root of Delta'");
                c[alg.root_coord(r)] += root_pair[r] / aq;
            }
            break;
        }
        case FamilyKind::trigonometric: {
            if (std::abs(std::sin(z)) < pole_tol)
                throw PoleProximityError("r_contraction: spectral parameter near a pole");
            c.head(N) += cot(z) * cartan_pair;
            for (int r = 0; r < 2 * P; ++r) {
                cplx phi;
                if (fam.in_subset(r)) {
                    const cplx aq = alg.root_value(r, q);
                    if (std::abs(std::sin(aq)) < pole_tol)
                        throw PoleProximityError("r_contraction: sin(alpha(q)) near 0 on the span");
                    phi = -std::sin(aq + z) / (std::sin(aq) * std::sin(z));
                } else if (alg.is_positive(r)) {
                    phi = -std::exp(-iu * z) / std::sin(z);
                } else {
                    phi = -std::exp(iu * z) / std::sin(z);
                }
                c[alg.root_coord(r)] -= phi * root_pair[r];
            }
            break;
        }
        case FamilyKind::elliptic: {
            const Lattice& lat = *fam.lattice;
            if (lat.lattice_distance(z) < pole_tol)
                throw PoleProximityError("r_contraction: spectral parameter near the lattice");
            const cplx sz = weier_sigma(lat, z);
            c.head(N) += weier_zeta(lat, z) * cartan_pair;
            for (int r = 0; r < 2 * P; ++r) {
                const cplx w = alg.root_value(r, q);
                if (lat.lattice_distance(w) < pole_tol)
                    throw PoleProximityError("r_contraction: alpha(q) near the period lattice");
                const cplx l = -weier_sigma(lat, w + z) / (weier_sigma(lat, w) * sz);
                c[alg.root_coord(r)] -= l * root_pair[r];
            }
            break;
        }
    }
    return alg.element(std::move(c));
}

cplx hamiltonian(const LaxFamily& fam, const AlgebraRealization& alg, const PhasePoint& pt) {
    const int N = alg.roots.rank, P = alg.positive_count();
    cplx h = 0;
    for (int i = 0; i < N; ++i) h += 0.5 * pt.p[i] * pt.p[i];
    switch (fam.kind) {
        case FamilyKind::rational: {
            for (int r = 0; r < 2 * P; ++r) {
                if (!fam.in_subset(r)) continue;
                const cplx aq = alg.root_value(r, pt.q);
                if (std::abs(aq) < pole_tol)
                    throw PoleProximityError("hamiltonian: alpha(q) near 0 for a root of Delta'");
                h -= 0.5 * pt.xi.root(r) * pt.xi.root(alg.negate_root(r)) / (aq * aq);
            }
            break;
        }
        case FamilyKind::trigonometric: {
            for (int r = 0; r < 2 * P; ++r) {
                const cplx prod = pt.xi.root(r) * pt.xi.root(alg.negate_root(r));
                if (fam.in_subset(r)) {
                    const cplx s = std::sin(alg.root_value(r, pt.q));
                    if (std::abs(s) < pole_tol)
                        throw PoleProximityError("hamiltonian: sin(alpha(q)) near 0 on the span");
                    h -= 0.5 * (1.0 / (s * s) - 1.0 / 3.0) * prod;
                } else {
                    h -= 5.0 / 6.0 * prod;
                }
            }
            for (int i = 0; i < N; ++i) h -= pt.xi.cartan(i) * pt.xi.cartan(i) / 3.0;
            break;
        }
        case FamilyKind::elliptic: {
            const Lattice& lat = *fam.lattice;
            for (int r = 0; r < 2 * P; ++r) {
                const cplx w = alg.root_value(r, pt.q);
                h -= 0.5 * wp(lat, w) * pt.xi.root(r) * pt.xi.root(alg.negate_root(r));
            }
            break;
        }
    }
    return h;
}

IntegralTable extract_integrals(const LaxFamily& fam, const AlgebraRealization& alg,
                                const std::vector<PrimitiveInvariant>& invs,
                                const PhasePoint& pt) {
    IntegralTable table;
    table.entries.resize(invs.size());

    if (fam.kind == FamilyKind::rational || fam.kind == FamilyKind::trigonometric) {
        // Both families are polynomial in their expansion variable: L = B + u X
        // with u = 1/z or u = cot z.  Evaluate at the (d+1)-st roots of unity
        // and invert the DFT, which is an exact interpolation.
        table.basis = fam.kind == FamilyKind::rational ? "z^-j" : "cot^j";
        const int N = alg.roots.rank, P = alg.positive_count();
        Vector c = Vector::Zero(alg.dim);
        c.head(N) = pt.p;
        for (int r = 0; r < 2 * P; ++r) {
            cplx coeff = 0;
            if (fam.kind == FamilyKind::rational) {
                if (fam.in_subset(r)) {
                    const cplx aq = alg.root_value(r, pt.q);
                    if (std::abs(aq) < pole_tol)
                        throw PoleProximityError("extract_integrals: alpha(q) near 0");
                    coeff = pt.xi.root(r) / aq;
                }
            } else {
                if (fam.in_subset(r)) {
                    const cplx aq = alg.root_value(r, pt.q);
                    if (std::abs(std::sin(aq)) < pole_tol)
                        throw PoleProximityError("extract_integrals: sin(alpha(q)) near 0");
                    coeff = cot(aq) * pt.xi.root(r);
                } else {
                    coeff = (alg.is_positive(r) ? -iu : iu) * pt.xi.root(r);
                }
            }
            c[alg.root_coord(r)] = coeff;
        }
        const Matrix bm = alg.element(std::move(c)).matrix();
        const Matrix xm = pt.xi.matrix();
        for (std::size_t k = 0; k < invs.size(); ++k) {
            const int d = invs[k].degree;
            const int nn = d + 1;
            std::vector<cplx> vals(nn);
            for (int t = 0; t < nn; ++t) {
                const cplx u = std::polar(1.0, 2.0 * pi * t / nn);
                vals[t] = invs[k].eval(bm + u * xm);
            }
            table.entries[k].assign(nn, 0.0);
            for (int j = 0; j < nn; ++j) {
                cplx s = 0;
                for (int t = 0; t < nn; ++t)
                    s += vals[t] * std::polar(1.0, -2.0 * pi * j * t / nn);
                table.entries[k][j] = s / static_cast<double>(nn);
            }
        }
        return table;
    }

    // Elliptic: least-squares fit of I_k(L(z)) against {1} together with
    // (-1)^j/(j-1)! wp^{(j-2)}(z) for j = 2..d_k, at 2(d_k+1) nodes on a
    // circle inside the fundamental cell.  The j = 1 slot does not exist in
    // this basis and stays zero.
    table.basis = "weierstrass";
    const Lattice& lat = *fam.lattice;
    const double radius = 0.31 * std::abs(2.0 * lat.omega1);
    for (std::size_t k = 0; k < invs.size(); ++k) {
        const int d = invs[k].degree;
        const int rows = 2 * (d + 1), cols = d;  // unknowns I_k0; I_kj, j = 2..d
        Matrix A(rows, cols);
        Vector rhs(rows);
        for (int s = 0; s < rows; ++s) {
            const cplx z = std::polar(radius, 2.0 * pi * (s + 0.5) / rows);
            rhs[s] = invs[k].eval(lax_matrix(fam, alg, pt, z).matrix());
            A(s, 0) = 1.0;
            for (int j = 2; j <= d; ++j) {
                const double w = (j % 2 == 0 ? 1.0 : -1.0) / factorial(j - 1);
                A(s, j - 1) = w * wp(lat, z, j - 2);
            }
        }
        Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const double cond =
            svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);
        if (cond > 1e10)
            throw ResampleError("extract_integrals: elliptic node system condition " +
                                std::to_string(cond) + " exceeds 1e10; pick new nodes");
        const Vector sol = svd.solve(rhs);
        table.elliptic_condition = std::max(table.elliptic_condition, cond);
        table.elliptic_residual = std::max(
            table.elliptic_residual, (A * sol - rhs).norm() / std::max(1e-300, rhs.norm()));
        table.entries[k].assign(d + 1, 0.0);
        table.entries[k][0] = sol[0];
        for (int j = 2; j <= d; ++j) table.entries[k][j] = sol[j - 1];
    }
    return table;
}

PhasePoint sample_phase_point(const LaxFamily& fam, const AlgebraRealization& alg, Rng& rng,
                              bool on_shell, bool slice) {
    const int N = alg.roots.rank, P = alg.positive_count();
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Vector q(N), p(N);
        for (int i = 0; i < N; ++i) q[i] = rng.annulus(0.5, 1.5);
        for (int i = 0; i < N; ++i) p[i] = rng.annulus(0.5, 1.5);
        if (denominator_margin(fam, alg, q) <= 0.1) continue;
        bool p_regular = true;
        for (int r = 0; r < P; ++r)
            if (std::abs(alg.root_value(r, p)) <= 0.1) p_regular = false;
        if (!p_regular) continue;

        Vector xi = Vector::Zero(alg.dim);
        if (slice) {
            for (int i = 0; i < N; ++i) xi[alg.root_coord(alg.simple_positions()[i] + P)] = 1.0;
            for (int r = 0; r < P; ++r) xi[alg.root_coord(r)] = rng.annulus(0.5, 1.5);
        } else {
            for (int r = 0; r < 2 * P; ++r) xi[alg.root_coord(r)] = rng.annulus(0.5, 1.5);
            if (!on_shell)
                for (int i = 0; i < N; ++i) xi[i] = rng.annulus(0.5, 1.5);
        }
        return PhasePoint{std::move(q), std::move(p), alg.element(std::move(xi))};
    }
    throw SamplingError("sample_phase_point: rejection budget of 1000 draws exhausted");
}

}  // namespace spincm
