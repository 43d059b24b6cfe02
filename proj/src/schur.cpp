#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <string>

#include <Eigen/Householder>

#include "hyplqr/care.hpp"
#include "hyplqr/errors.hpp"

namespace hyplqr {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double sign(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

// Standardizes the 2x2 block [a b; c d]: on return the block equals
// R^T [a b; c d]_in R with R = [cs -sn; sn cs], and is either upper triangular
// (real eigenvalues) or has a == d and b c < 0 (complex pair).
void standardize_2x2(double& a, double& b, double& c, double& d, double& cs, double& sn) {
    constexpr double multpl = 4.0;
    if (c == 0.0) {
        cs = 1.0;
        sn = 0.0;
        return;
    }
    if (b == 0.0) {
        cs = 0.0;
        sn = 1.0;
        std::swap(a, d);
        b = -c;
        c = 0.0;
        return;
    }
    if (a - d == 0.0 && (b > 0.0) != (c > 0.0)) {
        cs = 1.0;
        sn = 0.0;
        return;
    }
    const double temp = a - d;
    double p = 0.5 * temp;
    const double bcmax = std::max(std::abs(b), std::abs(c));
    const double bcmis = std::min(std::abs(b), std::abs(c)) * sign(1.0, b) * sign(1.0, c);
    const double scale = std::max(std::abs(p), bcmax);
    double z = p / scale * p + bcmax / scale * bcmis;
    if (z >= multpl * kEps) {
        // real eigenvalues
        z = p + sign(std::sqrt(scale) * std::sqrt(z), p);
        a = d + z;
        d = d - bcmax / z * bcmis;
        const double tau = std::hypot(c, z);
        cs = z / tau;
        sn = c / tau;
        b = b - c;
        c = 0.0;
        return;
    }
    // complex or nearly equal real eigenvalues: equalize the diagonal
    const double sigma = b + c;
    const double tau = std::hypot(sigma, temp);
    cs = std::sqrt(0.5 * (1.0 + std::abs(sigma) / tau));
    sn = -(p / (tau * cs)) * sign(1.0, sigma);
    const double aa = a * cs + b * sn;
    const double bb = -a * sn + b * cs;
    const double cc = c * cs + d * sn;
    const double dd = -c * sn + d * cs;
    a = aa * cs + cc * sn;
    b = bb * cs + dd * sn;
    c = -aa * sn + cc * cs;
    d = -bb * sn + dd * cs;
    const double mid = 0.5 * (a + d);
    a = mid;
    d = mid;
    if (c != 0.0) {
        if (b != 0.0) {
            if ((b > 0.0) == (c > 0.0)) {
                // real eigenvalues after all: triangularize
                const double sab = std::sqrt(std::abs(b));
                const double sac = std::sqrt(std::abs(c));
                p = sign(sab * sac, c);
                const double t = 1.0 / std::sqrt(std::abs(b + c));
                a = mid + p;
                d = mid - p;
                b = b - c;
                c = 0.0;
                const double cs1 = sab * t;
                const double sn1 = sac * t;
                const double ncs = cs * cs1 - sn * sn1;
                sn = cs * sn1 + sn * cs1;
                cs = ncs;
            }
        } else {
            b = -c;
            c = 0.0;
            const double t = cs;
            cs = -sn;
            sn = t;
        }
    }
}

// T <- W^T T W and Q <- Q W for an orthogonal W acting on indices j..j+k-1.
void apply_similarity(DenseMatrix& T, DenseMatrix& Q, Eigen::Index j, const DenseMatrix& W) {
    const auto k = W.rows();
    T.middleRows(j, k) = (W.transpose() * T.middleRows(j, k)).eval();
    T.middleCols(j, k) = (T.middleCols(j, k) * W).eval();
    Q.middleCols(j, k) = (Q.middleCols(j, k) * W).eval();
}

// Standardizes the 2x2 diagonal block starting at p; returns true if it split.
bool standardize_block(DenseMatrix& T, DenseMatrix& Q, Eigen::Index p) {
    double a = T(p, p), b = T(p, p + 1), c = T(p + 1, p), d = T(p + 1, p + 1);
    double cs = 1.0, sn = 0.0;
    standardize_2x2(a, b, c, d, cs, sn);
    DenseMatrix W(2, 2);
    W << cs, -sn, sn, cs;
    apply_similarity(T, Q, p, W);
    T(p, p) = a;
    T(p, p + 1) = b;
    T(p + 1, p) = c;
    T(p + 1, p + 1) = d;
    return c == 0.0;
}

void hessenberg(DenseMatrix& T, DenseMatrix& Q) {
    const Eigen::Index n = T.rows();
    Eigen::VectorXd work(n);
    for (Eigen::Index k = 0; k + 2 < n; ++k) {
        const Eigen::Index len = n - k - 1;
        Eigen::VectorXd essential(len - 1);
        double tau = 0.0, beta = 0.0;
        T.col(k).tail(len).makeHouseholder(essential, tau, beta);
        if (tau == 0.0) continue;
        T.block(k + 1, k, len, n - k).applyHouseholderOnTheLeft(essential, tau, work.data());
        T.block(0, k + 1, n, len).applyHouseholderOnTheRight(essential, tau, work.data());
        Q.block(0, k + 1, n, len).applyHouseholderOnTheRight(essential, tau, work.data());
        T(k + 1, k) = beta;
        T.col(k).tail(len - 1).setZero();
    }
}

// One implicit double-shift sweep on the active window [il, iu].
void francis_step(DenseMatrix& T, DenseMatrix& Q, Eigen::Index il, Eigen::Index iu, double s, double t) {
    const Eigen::Index n = T.rows();
    Eigen::VectorXd buffer(n);
    double* work = buffer.data();
    double x = T(il, il) * T(il, il) + T(il, il + 1) * T(il + 1, il) - s * T(il, il) + t;
    double y = T(il + 1, il) * (T(il, il) + T(il + 1, il + 1) - s);
    double z = T(il + 1, il) * T(il + 2, il + 1);
    for (Eigen::Index k = il; k + 2 <= iu; ++k) {
        Eigen::Vector3d v(x, y, z);
        Eigen::Vector2d essential;
        double tau = 0.0, beta = 0.0;
        v.makeHouseholder(essential, tau, beta);
        if (tau != 0.0) {
            const Eigen::Index c0 = k == il ? il : k - 1;
            T.block(k, c0, 3, n - c0).applyHouseholderOnTheLeft(essential, tau, work);
            const Eigen::Index r1 = std::min(k + 3, iu);
            T.block(0, k, r1 + 1, 3).applyHouseholderOnTheRight(essential, tau, work);
            Q.block(0, k, n, 3).applyHouseholderOnTheRight(essential, tau, work);
        }
        if (k > il) {
            T(k, k - 1) = tau != 0.0 ? beta : T(k, k - 1);
            T(k + 1, k - 1) = 0.0;
            T(k + 2, k - 1) = 0.0;
        }
        x = T(k + 1, k);
        y = T(k + 2, k);
        if (k + 3 <= iu) z = T(k + 3, k);
    }
    // closing 2x2 reflector on rows iu-1, iu
    Eigen::Vector2d v(x, y);
    Eigen::Matrix<double, 1, 1> essential;
    double tau = 0.0, beta = 0.0;
    v.makeHouseholder(essential, tau, beta);
    if (tau != 0.0) {
        const Eigen::Index k = iu - 1;
        T.block(k, k - 1, 2, n - k + 1).applyHouseholderOnTheLeft(essential, tau, work);
        T.block(0, k, iu + 1, 2).applyHouseholderOnTheRight(essential, tau, work);
        Q.block(0, k, n, 2).applyHouseholderOnTheRight(essential, tau, work);
        T(k, k - 1) = beta;
        T(k + 1, k - 1) = 0.0;
    }
}

// vec-operator of X -> A X - X B for A q x q, B p x p: I_p (x) A - B^T (x) I_q.
DenseMatrix sylvester_operator(const DenseMatrix& A, const DenseMatrix& B) {
    const Eigen::Index q = A.rows(), p = B.rows();
    DenseMatrix M = DenseMatrix::Zero(p * q, p * q);
    for (Eigen::Index c = 0; c < p; ++c) M.block(c * q, c * q, q, q) = A;
    for (Eigen::Index r = 0; r < p; ++r)
        for (Eigen::Index c = 0; c < p; ++c) M.block(c * q, r * q, q, q).diagonal().array() -= B(r, c);
    return M;
}

Eigen::Index block_size(const DenseMatrix& T, Eigen::Index k) {
    return (k + 1 < T.rows() && T(k + 1, k) != 0.0) ? 2 : 1;
}

// Swaps the adjacent diagonal blocks at j (sizes n1, n2) by an orthogonal similarity.
void swap_blocks(DenseMatrix& T, DenseMatrix& Q, Eigen::Index j, Eigen::Index n1, Eigen::Index n2) {
    const Eigen::Index nn = n1 + n2;
    const DenseMatrix T11 = T.block(j, j, n1, n1);
    const DenseMatrix T22 = T.block(j + n1, j + n1, n2, n2);
    const DenseMatrix T12 = T.block(j, j + n1, n1, n2);
    // T11 X - X T22 = T12
    const DenseMatrix M = sylvester_operator(T11, T22);
    Eigen::FullPivLU<DenseMatrix> lu(M);
    if (!lu.isInvertible()) throw NumericalError("cannot swap Schur blocks with equal eigenvalues");
    const Eigen::VectorXd x = lu.solve(Eigen::Map<const Eigen::VectorXd>(T12.data(), n1 * n2));
    const Eigen::Map<const DenseMatrix> X(x.data(), n1, n2);
    DenseMatrix basis(nn, n2);
    basis.topRows(n1) = -X;
    basis.bottomRows(n2).setIdentity();
    const DenseMatrix W = Eigen::HouseholderQR<DenseMatrix>(basis).householderQ();
    apply_similarity(T, Q, j, W);
    T.block(j + n2, j, n1, n2).setZero();
    if (n2 == 2) standardize_block(T, Q, j);
    if (n1 == 2) standardize_block(T, Q, j + n2);
}

}  // namespace

SchurDecomposition real_schur(const DenseMatrix& A) {
    if (A.rows() != A.cols()) throw InvalidArgument("real_schur needs a square matrix");
    if (!A.allFinite()) throw InvalidArgument("real_schur needs finite entries");
    const Eigen::Index n = A.rows();
    SchurDecomposition s{DenseMatrix::Identity(n, n), A};
    DenseMatrix& T = s.T;
    DenseMatrix& Q = s.Q;
    if (n == 0) return s;
    hessenberg(T, Q);

    const double norm = std::max(T.cwiseAbs().sum(), std::numeric_limits<double>::min());
    const Eigen::Index max_iter = 30 * n;
    Eigen::Index total = 0;
    int iter = 0;
    Eigen::Index iu = n - 1;
    while (iu >= 0) {
        Eigen::Index il = iu;
        while (il > 0) {
            double sc = std::abs(T(il - 1, il - 1)) + std::abs(T(il, il));
            if (sc == 0.0) sc = norm;
            if (std::abs(T(il, il - 1)) < kEps * sc) {
                T(il, il - 1) = 0.0;
                break;
            }
            --il;
        }
        if (il == iu) {
            --iu;
            iter = 0;
        } else if (il == iu - 1) {
            standardize_block(T, Q, iu - 1);
            iu -= 2;
            iter = 0;
        } else {
            if (++total > max_iter)
                throw NumericalError("real Schur QR iteration did not converge after " +
                                     std::to_string(max_iter) + " sweeps");
            ++iter;
            double s_sum = 0.0, s_prod = 0.0;
            if (iter % 10 == 0) {
                // exceptional shift
                const double w = std::abs(T(iu, iu - 1)) + std::abs(T(iu - 1, iu - 2));
                const double h11 = 0.75 * w + T(iu, iu);
                s_sum = 2.0 * h11;
                s_prod = h11 * h11 + 0.4375 * w * w;
            } else {
                s_sum = T(iu - 1, iu - 1) + T(iu, iu);
                s_prod = T(iu - 1, iu - 1) * T(iu, iu) - T(iu - 1, iu) * T(iu, iu - 1);
            }
            francis_step(T, Q, il, iu, s_sum, s_prod);
        }
    }
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = j + 2; i < n; ++i) T(i, j) = 0.0;
    return s;
}

std::vector<std::complex<double>> schur_eigenvalues(const DenseMatrix& T) {
    std::vector<std::complex<double>> ev;
    ev.reserve(static_cast<std::size_t>(T.rows()));
    for (Eigen::Index k = 0; k < T.rows();) {
        if (block_size(T, k) == 1) {
            ev.emplace_back(T(k, k), 0.0);
            ++k;
            continue;
        }
        const double a = T(k, k), b = T(k, k + 1), c = T(k + 1, k), d = T(k + 1, k + 1);
        const double mid = 0.5 * (a + d);
        const double disc = 0.25 * (a - d) * (a - d) + b * c;
        if (disc >= 0.0) {
            const double r = std::sqrt(disc);
            ev.emplace_back(mid + r, 0.0);
            ev.emplace_back(mid - r, 0.0);
        } else {
            const double im = std::sqrt(-disc);
            ev.emplace_back(mid, im);
            ev.emplace_back(mid, -im);
        }
        k += 2;
    }
    return ev;
}

int reorder_schur(SchurDecomposition& s, const std::function<bool(std::complex<double>)>& select) {
    DenseMatrix& T = s.T;
    const Eigen::Index n = T.rows();
    Eigen::Index ks = 0;
    for (Eigen::Index k = 0; k < n;) {
        const Eigen::Index sz = block_size(T, k);
        const auto ev = schur_eigenvalues(T.block(k, k, sz, sz));
        if (!select(ev.front())) {
            k += sz;
            continue;
        }
        Eigen::Index pos = k;
        while (pos > ks) {
            const Eigen::Index prev = (pos >= 2 && T(pos - 1, pos - 2) != 0.0) ? pos - 2 : pos - 1;
            swap_blocks(T, s.Q, prev, pos - prev, sz);
            pos = prev;
        }
        ks += sz;
        k += sz;
    }
    return static_cast<int>(ks);
}

Eigen::VectorXd balance(DenseMatrix& A) {
    constexpr double radix = 2.0;
    constexpr double sqrdx = radix * radix;
    const Eigen::Index n = A.rows();
    Eigen::VectorXd d = Eigen::VectorXd::Ones(n);
    bool done = false;
    while (!done) {
        done = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double c = A.col(i).cwiseAbs().sum() - std::abs(A(i, i));
            const double r = A.row(i).cwiseAbs().sum() - std::abs(A(i, i));
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix;
            double f = 1.0;
            double cc = c;
            const double total = c + r;
            while (cc < g) {
                f *= radix;
                cc *= sqrdx;
            }
            g = r * radix;
            while (cc > g) {
                f /= radix;
                cc /= sqrdx;
            }
            if ((cc + r) / f < 0.95 * total) {
                done = false;
                d(i) *= f;
                A.row(i) /= f;
                A.col(i) *= f;
            }
        }
    }
    return d;
}

double Spectrum::abscissa() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& v : values) m = std::max(m, v.real());
    return m;
}

Spectrum eigenvalues(const DenseMatrix& A) {
    if (A.rows() != A.cols()) throw InvalidArgument("eigenvalues needs a square matrix");
    // Permutation stage of balancing: a row (column) with no off-diagonal
    // entries inside the active set can be permuted to the bottom (top) and its
    // diagonal entry is an eigenvalue. Triangular parts come out exactly.
    std::vector<Eigen::Index> active(static_cast<std::size_t>(A.rows()));
    std::iota(active.begin(), active.end(), Eigen::Index{0});
    Spectrum sp;
    for (bool found = true; found && !active.empty();) {
        found = false;
        for (std::size_t a = 0; a < active.size(); ++a) {
            const Eigen::Index i = active[a];
            bool row_free = true, col_free = true;
            for (const Eigen::Index j : active) {
                if (j == i) continue;
                row_free = row_free && A(i, j) == 0.0;
                col_free = col_free && A(j, i) == 0.0;
                if (!row_free && !col_free) break;
            }
            if (row_free || col_free) {
                sp.values.emplace_back(A(i, i), 0.0);
                active.erase(active.begin() + static_cast<std::ptrdiff_t>(a));
                found = true;
                break;
            }
        }
    }
    if (!active.empty()) {
        const auto idx = Eigen::Map<const Eigen::Matrix<Eigen::Index, Eigen::Dynamic, 1>>(
            active.data(), static_cast<Eigen::Index>(active.size()));
        DenseMatrix B = A(idx, idx);
        balance(B);
        const auto rest = schur_eigenvalues(real_schur(B).T);
        sp.values.insert(sp.values.end(), rest.begin(), rest.end());
    }
    std::sort(sp.values.begin(), sp.values.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return sp;
}

}  // namespace hyplqr
