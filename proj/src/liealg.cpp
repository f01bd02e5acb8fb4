#include "spincm/liealg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace spincm {

namespace {

// Defining-representation data assembled before Killing normalization.
struct ProtoBasis {
    char type;
    int N, n, P, dim;
    std::vector<std::vector<int>> eps;  // signed roots as epsilon-coordinate vectors
    std::vector<Matrix> mats;           // T_1..T_N, e_alpha (alpha>0), e_{-alpha}
    std::vector<int> anchor_row, anchor_col;  // per signed root
};

Matrix unit(int n, int r, int c) {
    Matrix m = Matrix::Zero(n, n);
    m(r, c) = 1.0;
    return m;
}

std::vector<int> simple_eps(char type, int N, int i) {
    const int slots = type == 'A' ? N + 1 : N;
    std::vector<int> v(slots, 0);
    if (type == 'A') {
        v[i] = 1;
        v[i + 1] = -1;
    } else if (i < N - 1) {
        v[i] = 1;
        v[i + 1] = -1;
    } else if (type == 'B') {
        v[N - 1] = 1;
    } else if (type == 'C') {
        v[N - 1] = 2;
    } else {  // D
        v[N - 2] = 1;
        v[N - 1] = 1;
    }
    return v;
}

// Matrix form and anchor entry of the root vector with epsilon-vector a.
// The anchor is an entry unique to this root across the whole basis, always
// carrying coefficient +1, so coordinates can be read off directly.
void root_matrix(char type, int n, int N, const std::vector<int>& a, Matrix& M, int& ar, int& ac) {
    auto prime = [n](int i) { return n - 1 - i; };
    if (type == 'A') {
        int ip = -1, im = -1;
        for (int k = 0; k <= N; ++k) {
            if (a[k] == 1) ip = k;
            if (a[k] == -1) im = k;
        }
        M = unit(n, ip, im);
        ar = ip;
        ac = im;
        return;
    }
    const int mid = N;  // only used for B
    std::vector<int> nz;
    for (int k = 0; k < N; ++k)
        if (a[k] != 0) nz.push_back(k);
    if (nz.size() == 2 && a[nz[0]] * a[nz[1]] < 0) {
        const int ip = a[nz[0]] > 0 ? nz[0] : nz[1];
        const int im = a[nz[0]] > 0 ? nz[1] : nz[0];
        M = unit(n, ip, im) - unit(n, prime(im), prime(ip));
        ar = ip;
        ac = im;
    } else if (nz.size() == 2 && a[nz[0]] > 0) {
        const int i = nz[0], j = nz[1];
        const double sgn = type == 'C' ? 1.0 : -1.0;
        M = unit(n, i, prime(j)) + sgn * unit(n, j, prime(i));
        ar = i;
        ac = prime(j);
    } else if (nz.size() == 2) {
        const int i = nz[0], j = nz[1];
        const double sgn = type == 'C' ? 1.0 : -1.0;
        M = unit(n, prime(j), i) + sgn * unit(n, prime(i), j);
        ar = prime(j);
        ac = i;
    } else if (nz.size() == 1 && a[nz[0]] == 1) {
        const int i = nz[0];
        M = unit(n, i, mid) - unit(n, mid, prime(i));
        ar = i;
        ac = mid;
    } else if (nz.size() == 1 && a[nz[0]] == -1) {
        const int i = nz[0];
        M = unit(n, mid, i) - unit(n, prime(i), mid);
        ar = mid;
        ac = i;
    } else if (nz.size() == 1 && a[nz[0]] == 2) {
        const int i = nz[0];
        M = unit(n, i, prime(i));
        ar = i;
        ac = prime(i);
    } else if (nz.size() == 1 && a[nz[0]] == -2) {
        const int i = nz[0];
        M = unit(n, prime(i), i);
        ar = prime(i);
        ac = i;
    } else {
        throw std::logic_error("unclassifiable root epsilon-vector");
    }
}

ProtoBasis build_proto(const RootSystem& rs) {
    ProtoBasis pb;
    pb.type = rs.type;
    pb.N = rs.rank;
    pb.P = rs.positive_count();
    pb.dim = rs.dim();
    switch (rs.type) {
        case 'A': pb.n = pb.N + 1; break;
        case 'B': pb.n = 2 * pb.N + 1; break;
        case 'C': pb.n = 2 * pb.N; break;
        case 'D': pb.n = 2 * pb.N; break;
        default:
            throw CapabilityError(std::string("matrix realization unavailable for type ") +
                                  rs.type + "; only root combinatorics is supported for E/F/G");
    }
    const int slots = rs.type == 'A' ? pb.N + 1 : pb.N;
    pb.eps.assign(2 * pb.P, std::vector<int>(slots, 0));
    for (int r = 0; r < pb.P; ++r) {
        const RootVec& c = rs.positive_roots[r];
        for (int i = 0; i < pb.N; ++i) {
            const std::vector<int> se = simple_eps(rs.type, pb.N, i);
            for (int s = 0; s < slots; ++s) pb.eps[r][s] += c[i] * se[s];
        }
        for (int s = 0; s < slots; ++s) pb.eps[r + pb.P][s] = -pb.eps[r][s];
    }

    pb.mats.resize(pb.dim);
    pb.anchor_row.resize(2 * pb.P);
    pb.anchor_col.resize(2 * pb.P);
    auto prime = [&](int i) { return pb.n - 1 - i; };
    for (int i = 0; i < pb.N; ++i) {
        if (rs.type == 'A')
            pb.mats[i] = unit(pb.n, i, i) - unit(pb.n, i + 1, i + 1);
        else
            pb.mats[i] = unit(pb.n, i, i) - unit(pb.n, prime(i), prime(i));
    }
    for (int r = 0; r < 2 * pb.P; ++r)
        root_matrix(rs.type, pb.n, pb.N, pb.eps[r], pb.mats[pb.N + r], pb.anchor_row[r],
                    pb.anchor_col[r]);
    return pb;
}

// alpha(T_j) for the provisional Cartan basis
double eps_on_T(char type, const std::vector<int>& a, int j) {
    if (type == 'A') return a[j] - a[j + 1];
    return a[j];
}

// Expansion of a matrix known to lie in the algebra over the provisional basis.
Vector expand_proto(const ProtoBasis& pb, const Matrix& X) {
    Vector c = Vector::Zero(pb.dim);
    if (pb.type == 'A') {
        cplx acc = 0;
        for (int i = 0; i < pb.N; ++i) {
            acc += X(i, i);
            c[i] = acc;
        }
    } else {
        for (int i = 0; i < pb.N; ++i) c[i] = X(i, i);
    }
    for (int r = 0; r < 2 * pb.P; ++r) c[pb.N + r] = X(pb.anchor_row[r], pb.anchor_col[r]);
    return c;
}

double rel_err(const Matrix& a, const Matrix& b) {
    const double scale = std::max(1e-300, std::max(a.norm(), b.norm()));
    return (a - b).norm() / scale;
}

}  // namespace

AlgebraRealization realize(const RootSystem& rs) {
    ProtoBasis pb = build_proto(rs);
    const int N = pb.N, P = pb.P, dim = pb.dim;

    // Structure constants over the provisional basis, then the Killing form
    // as trace(ad . ad).
    std::vector<Matrix> ad0(dim, Matrix::Zero(dim, dim));
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            if (i == j) continue;
            const Matrix c = pb.mats[i] * pb.mats[j] - pb.mats[j] * pb.mats[i];
            const Vector v = expand_proto(pb, c);
            Matrix rec = Matrix::Zero(pb.n, pb.n);
            for (int k = 0; k < dim; ++k) rec += v[k] * pb.mats[k];
            if (rel_err(rec, c) > 1e-10)
                throw std::logic_error("bracket left the provisional basis span");
            ad0[i].col(j) = v;
        }
    Eigen::MatrixXd gram0(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) {
            const cplx t = ad0[i].transpose().cwiseProduct(ad0[j]).sum();
            gram0(i, j) = gram0(j, i) = t.real();
        }

    // Rescale e_{-alpha} so that kappa(e_alpha, e_{-alpha}) = 1.
    std::vector<double> dual_scale(P);
    for (int r = 0; r < P; ++r) {
        const double c = gram0(N + r, N + P + r);
        if (std::abs(c) < 1e-12) throw std::logic_error("degenerate root-vector pairing");
        dual_scale[r] = c;
    }

    // Orthonormalize the Cartan part.
    const Eigen::MatrixXd gc = gram0.topLeftCorner(N, N);
    Eigen::LLT<Eigen::MatrixXd> llt(gc);
    if (llt.info() != Eigen::Success)
        throw std::logic_error("Cartan Killing Gram matrix is not positive definite");
    const Eigen::MatrixXd L = llt.matrixL();
    const Eigen::MatrixXd Linvt =
        L.transpose().triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(N, N));

    AlgebraRealization alg;
    alg.roots = rs;
    alg.exps = exponent_data(rs);
    alg.matrix_dim = pb.n;
    alg.dim = dim;
    alg.basis_.resize(dim);
    for (int i = 0; i < N; ++i) {
        Matrix x = Matrix::Zero(pb.n, pb.n);
        for (int j = 0; j < N; ++j) x += Linvt(j, i) * pb.mats[j];
        alg.basis_[i] = x;
    }
    for (int r = 0; r < P; ++r) {
        alg.basis_[N + r] = pb.mats[N + r];
        alg.basis_[N + P + r] = pb.mats[N + P + r] / dual_scale[r];
    }

    // Root functionals on the orthonormal Cartan basis.
    alg.root_on_x_.assign(2 * P, std::vector<double>(N, 0.0));
    for (int r = 0; r < 2 * P; ++r)
        for (int i = 0; i < N; ++i) {
            double v = 0;
            for (int j = 0; j < N; ++j) v += Linvt(j, i) * eps_on_T(pb.type, pb.eps[r], j);
            alg.root_on_x_[r][i] = v;
        }

    // Final structure constants: expand commutators over the final basis.
    auto expand_final = [&](const Matrix& X) {
        Vector c0 = expand_proto(pb, X);
        Vector c = Vector::Zero(dim);
        c.head(N) = (L.transpose() * c0.head(N).eval()).eval();
        for (int r = 0; r < P; ++r) {
            c[N + r] = c0[N + r];
            c[N + P + r] = c0[N + P + r] * dual_scale[r];
        }
        return c;
    };
    alg.bracket_table_.assign(dim, {});
    for (int i = 0; i < dim; ++i) alg.bracket_table_[i].assign(dim, {});
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j) {
            const Matrix c = alg.basis_[i] * alg.basis_[j] - alg.basis_[j] * alg.basis_[i];
            const Vector v = expand_final(c);
            for (int k = 0; k < dim; ++k)
                if (std::abs(v[k]) > 1e-13) alg.bracket_table_[i][j].push_back({k, v[k]});
        }

    // Killing form over the final basis, as a construction-time validation
    // and to measure the trace-form ratio.
    std::vector<Matrix> ad1(dim, Matrix::Zero(dim, dim));
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            if (i == j) continue;
            const int a = std::min(i, j), b = std::max(i, j);
            const double s = i < j ? 1.0 : -1.0;
            for (const auto& [k, c] : alg.bracket_table_[a][b]) ad1[i](k, j) += s * c;
        }
    double ratio_sum = 0, ratio_min = 1e300, ratio_max = -1e300;
    int ratio_n = 0;
    double gram_err = 0;
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) {
            const cplx kij = ad1[i].transpose().cwiseProduct(ad1[j]).sum();
            double expect = 0;
            if (i < N && i == j) expect = 1.0;
            if (i >= N && j >= N) {
                const int ri = i - N, rj = j - N;
                if (ri < P ? rj == ri + P : rj == ri - P) expect = 1.0;
            }
            gram_err = std::max(gram_err, std::abs(kij - expect));
            const cplx tij = (alg.basis_[i] * alg.basis_[j]).trace();
            if (std::abs(tij) > 1e-6) {
                const double r = (kij / tij).real();
                ratio_sum += r;
                ratio_min = std::min(ratio_min, r);
                ratio_max = std::max(ratio_max, r);
                ++ratio_n;
            }
        }
    if (gram_err > 1e-9) throw std::logic_error("Killing normalization failed");
    alg.trace_ratio_ = ratio_sum / ratio_n;
    alg.trace_ratio_spread_ = (ratio_max - ratio_min) / std::abs(alg.trace_ratio_);
    if (alg.trace_ratio_spread_ > 1e-9)
        throw std::logic_error("Killing form is not a constant multiple of the trace form");

    // Grading element: alpha_i(x_0) = 1 for all simple roots.
    alg.simple_positions_.resize(N);
    for (int i = 0; i < N; ++i) {
        RootVec e(N, 0);
        e[i] = 1;
        alg.simple_positions_[i] = rs.positive_index(e);
    }
    Eigen::MatrixXd M(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) M(i, j) = alg.root_on_x_[alg.simple_positions_[i]][j];
    const Eigen::VectorXd x0 = M.partialPivLu().solve(Eigen::VectorXd::Ones(N));
    alg.grading_coords_ = Vector::Zero(dim);
    for (int i = 0; i < N; ++i) alg.grading_coords_[i] = x0[i];

    // Spot validations: duality bracket and grading eigenvalues.
    for (int r = 0; r < P; ++r) {
        const Matrix h = alg.basis_[N + r] * alg.basis_[N + P + r] -
                         alg.basis_[N + P + r] * alg.basis_[N + r];
        Matrix h_expect = Matrix::Zero(pb.n, pb.n);
        for (int i = 0; i < N; ++i) h_expect += alg.root_on_x_[r][i] * alg.basis_[i];
        if (rel_err(h, h_expect) > 1e-9)
            throw std::logic_error("[e_a, e_{-a}] != H_a after normalization");
        Matrix x0m = Matrix::Zero(pb.n, pb.n);
        for (int i = 0; i < N; ++i) x0m += alg.grading_coords_[i] * alg.basis_[i];
        const Matrix g = x0m * alg.basis_[N + r] - alg.basis_[N + r] * x0m;
        if (rel_err(g, static_cast<cplx>(height(rs.positive_roots[r])) * alg.basis_[N + r]) > 1e-9)
            throw std::logic_error("grading element eigenvalue mismatch");
    }
    return alg;
}

int AlgebraRealization::root_height(int r) const {
    const int P = positive_count();
    return r < P ? height(roots.positive_roots[r]) : -height(roots.positive_roots[r - P]);
}

RootVec AlgebraRealization::root_coeffs(int r) const {
    const int P = positive_count();
    return r < P ? roots.positive_roots[r] : negate(roots.positive_roots[r - P]);
}

int AlgebraRealization::root_index(const RootVec& r) const {
    int idx = roots.positive_index(r);
    if (idx >= 0) return idx;
    idx = roots.positive_index(negate(r));
    return idx >= 0 ? idx + positive_count() : -1;
}

cplx AlgebraRealization::root_value(int r, const Vector& cartan_coords) const {
    cplx v = 0;
    for (int i = 0; i < roots.rank; ++i) v += root_on_x_[r][i] * cartan_coords[i];
    return v;
}

cplx AlgebraRealization::killing(const AlgebraElement& a, const AlgebraElement& b) const {
    const int N = roots.rank, P = positive_count();
    cplx s = 0;
    for (int i = 0; i < N; ++i) s += a.coords()[i] * b.coords()[i];
    for (int r = 0; r < P; ++r)
        s += a.coords()[N + r] * b.coords()[N + P + r] + a.coords()[N + P + r] * b.coords()[N + r];
    return s;
}

cplx AlgebraRealization::killing_via_trace(const Matrix& a, const Matrix& b) const {
    return trace_ratio_ * (a * b).trace();
}

AlgebraElement AlgebraRealization::element(Vector coords) const {
    return AlgebraElement(this, std::move(coords));
}

AlgebraElement AlgebraRealization::zero() const { return element(Vector::Zero(dim)); }

AlgebraElement AlgebraRealization::cartan_element(const Vector& cartan_coords) const {
    Vector c = Vector::Zero(dim);
    c.head(roots.rank) = cartan_coords;
    return element(std::move(c));
}

AlgebraElement AlgebraRealization::basis_element(int idx) const {
    Vector c = Vector::Zero(dim);
    c[idx] = 1.0;
    return element(std::move(c));
}

AlgebraElement AlgebraRealization::coroot(int r) const {
    Vector c = Vector::Zero(dim);
    for (int i = 0; i < roots.rank; ++i) c[i] = root_on_x_[r][i];
    return element(std::move(c));
}

AlgebraElement AlgebraRealization::grading_element() const { return element(grading_coords_); }

AlgebraElement AlgebraRealization::principal_nilpotent_neg() const {
    Vector c = Vector::Zero(dim);
    const int P = positive_count();
    for (int i = 0; i < roots.rank; ++i) c[root_coord(simple_positions_[i] + P)] = 1.0;
    return element(std::move(c));
}

std::vector<std::pair<int, int>> AlgebraRealization::casimir_pairs() const {
    std::vector<std::pair<int, int>> pairs;
    const int P = positive_count();
    for (int i = 0; i < roots.rank; ++i) pairs.push_back({i, i});
    for (int r = 0; r < 2 * P; ++r)
        pairs.push_back({root_coord(r), root_coord(negate_root(r))});
    return pairs;
}

AlgebraElement AlgebraRealization::bracket(const AlgebraElement& a, const AlgebraElement& b) const {
    if (&a.algebra() != this || &b.algebra() != this)
        throw std::invalid_argument("bracket: elements from different realizations");
    Vector out = Vector::Zero(dim);
    for (int i = 0; i < dim; ++i) {
        const cplx ai = a.coords()[i];
        if (ai == 0.0) continue;
        for (int j = 0; j < dim; ++j) {
            if (i == j) continue;
            const cplx bj = b.coords()[j];
            if (bj == 0.0) continue;
            const cplx w = ai * bj;
            if (i < j) {
                for (const auto& [k, c] : bracket_table_[i][j]) out[k] += w * c;
            } else {
                for (const auto& [k, c] : bracket_table_[j][i]) out[k] -= w * c;
            }
        }
    }
    return element(std::move(out));
}

Vector AlgebraRealization::coords_of(const Matrix& m) const {
    // Project onto the basis via the Killing form; kappa is orthonormal on the
    // Cartan and pairs e_alpha with e_{-alpha}.
    const int N = roots.rank, P = positive_count();
    Vector c = Vector::Zero(dim);
    for (int i = 0; i < N; ++i) c[i] = killing_via_trace(m, basis_[i]);
    for (int r = 0; r < P; ++r) {
        c[N + r] = killing_via_trace(m, basis_[N + P + r]);
        c[N + P + r] = killing_via_trace(m, basis_[N + r]);
    }
    return c;
}

AlgebraElement AlgebraRealization::torus_adjoint(const Vector& h_cartan,
                                                 const AlgebraElement& x) const {
    Vector c = x.coords();
    const int P = positive_count();
    for (int r = 0; r < 2 * P; ++r) c[root_coord(r)] *= std::exp(root_value(r, h_cartan));
    return element(std::move(c));
}

Matrix AlgebraRealization::torus_matrix(const Vector& h_cartan) const {
    Matrix h = Matrix::Zero(matrix_dim, matrix_dim);
    for (int i = 0; i < roots.rank; ++i) h += h_cartan[i] * basis_[i];
    Matrix e = Matrix::Zero(matrix_dim, matrix_dim);
    for (int i = 0; i < matrix_dim; ++i) e(i, i) = std::exp(h(i, i));
    return e;
}

std::pair<Vector, AlgebraElement> AlgebraRealization::slice_normalize(
    const AlgebraElement& xi) const {
    const int N = roots.rank, P = positive_count();
    Vector rhs(N);
    for (int i = 0; i < N; ++i) {
        const cplx c = xi.root(simple_positions_[i] + P);
        if (std::abs(c) < 1e-13)
            throw std::domain_error("slice_normalize: not in U_cal (xi_{-alpha_" +
                                    std::to_string(i + 1) + "} = 0)");
        rhs[i] = -std::log(c);  // principal branch
    }
    Matrix M(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) M(i, j) = root_on_x_[simple_positions_[i]][j];
    const Vector hstar = M.partialPivLu().solve(rhs);
    return {hstar, torus_adjoint(-hstar, xi)};
}

Matrix AlgebraElement::matrix() const {
    Matrix m = Matrix::Zero(alg_->matrix_dim, alg_->matrix_dim);
    for (int k = 0; k < alg_->dim; ++k)
        if (coords_[k] != 0.0) m += coords_[k] * alg_->basis_matrix(k);
    return m;
}

double AlgebraElement::frobenius() const { return matrix().norm(); }

}  // namespace spincm
