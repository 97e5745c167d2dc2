#include "dcm/factorization.hpp"

#include "dcm/error.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>

namespace dcm {

namespace {

constexpr int kMaxSweeps = 100;

double column_dot(const Matrix& a, std::size_t i, const Matrix& b, std::size_t j) {
    double s = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r) s += a(r, i) * b(r, j);
    return s;
}

double column_norm(const Matrix& a, std::size_t j) { return std::sqrt(column_dot(a, j, a, j)); }

void scale_column(Matrix& a, std::size_t j, double f) {
    for (std::size_t r = 0; r < a.rows(); ++r) a(r, j) *= f;
}

// Removes the components along columns [0, upto) from column j (twice, for
// numerical orthogonality) and returns the remaining norm.
double orthogonalize(Matrix& q, std::size_t j, std::size_t upto) {
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t k = 0; k < upto; ++k) {
            const double d = column_dot(q, k, q, j);
            for (std::size_t r = 0; r < q.rows(); ++r) q(r, j) -= d * q(r, k);
        }
    }
    return column_norm(q, j);
}

// Makes columns [0, keep) orthonormal in place and fills columns [keep, cols)
// by completing the basis with orthogonalized unit vectors.
void orthonormalize_and_complete(Matrix& q, std::size_t keep) {
    for (std::size_t j = 0; j < keep; ++j) {
        const double norm = orthogonalize(q, j, j);
        if (norm > 0.0) scale_column(q, j, 1.0 / norm);
    }
    std::size_t next_basis = 0;
    for (std::size_t j = keep; j < q.cols(); ++j) {
        while (true) {
            if (next_basis >= q.rows()) throw Error("basis completion ran out of candidate vectors");
            for (std::size_t r = 0; r < q.rows(); ++r) q(r, j) = r == next_basis ? 1.0 : 0.0;
            ++next_basis;
            const double norm = orthogonalize(q, j, j);
            if (norm > 0.5) {
                scale_column(q, j, 1.0 / norm);
                break;
            }
        }
    }
}

} // namespace

Matrix FactoredMatrix::reconstruct() const {
    Matrix us = u;
    for (std::size_t r = 0; r < us.rows(); ++r) {
        for (std::size_t j = 0; j < sigma.size(); ++j) us(r, j) *= sigma[j];
    }
    return us * vt;
}

SymmetricEigen jacobi_eigen(Matrix a) {
    const auto n = a.rows();
    if (a.cols() != n) throw Error("jacobi_eigen needs a square matrix");
    Matrix v = Matrix::identity(n);

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double app = a(p, p);
                const double aqq = a(q, q);
                if (std::fabs(apq) <= DBL_EPSILON * std::sqrt(std::fabs(app) * std::fabs(aqq))) {
                    a(p, q) = a(q, p) = 0.0;
                    continue;
                }
                rotated = true;
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = a(r, p);
                    const double arq = a(r, q);
                    a(r, p) = a(p, r) = c * arp - s * arq;
                    a(r, q) = a(q, r) = s * arp + c * arq;
                }
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = a(q, p) = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    const double vrp = v(r, p);
                    const double vrq = v(r, q);
                    v(r, p) = c * vrp - s * vrq;
                    v(r, q) = s * vrp + c * vrq;
                }
            }
        }
        if (!rotated) break;
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
    SymmetricEigen out{std::vector<double>(n), Matrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
    }
    return out;
}

FactoredMatrix svd(const Matrix& x) {
    const auto m = x.rows();
    const auto n = x.cols();
    if (m == 0 || n == 0) throw Error("cannot factorize an empty matrix");
    if (std::any_of(x.data().begin(), x.data().end(), [](double v) { return !std::isfinite(v); })) {
        throw Error("cannot factorize a matrix with non-finite entries");
    }

    // Work on the side with the smaller Gram matrix: `a` is tall (rows >= cols).
    const bool transposed = m < n;
    const Matrix a = transposed ? x.transpose() : x;
    const auto r = a.cols();

    const auto eig = jacobi_eigen(gram(a));
    Matrix right = eig.vectors;  // r x r, orthonormal
    Matrix left = a * right;     // columns are sigma_i * u_i

    std::vector<double> sigma(r);
    for (std::size_t j = 0; j < r; ++j) sigma[j] = column_norm(left, j);

    // Reorder by the column norms, which are more accurate than sqrt(eigenvalue).
    std::vector<std::size_t> order(r);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });
    {
        Matrix l2(left.rows(), r), r2(r, r);
        std::vector<double> s2(r);
        for (std::size_t k = 0; k < r; ++k) {
            s2[k] = sigma[order[k]];
            for (std::size_t i = 0; i < left.rows(); ++i) l2(i, k) = left(i, order[k]);
            for (std::size_t i = 0; i < r; ++i) r2(i, k) = right(i, order[k]);
        }
        left = std::move(l2);
        right = std::move(r2);
        sigma = std::move(s2);
    }

    const double cutoff = kRankCutoff * sigma[0];
    std::size_t rank = 0;
    while (rank < r && sigma[rank] > cutoff && sigma[rank] > 0.0) ++rank;
    for (std::size_t j = 0; j < rank; ++j) scale_column(left, j, 1.0 / sigma[j]);
    for (std::size_t j = rank; j < r; ++j) sigma[j] = 0.0;
    orthonormalize_and_complete(left, rank);

    // Largest-magnitude entry of each U column is positive.
    Matrix& u_side = transposed ? right : left;
    Matrix& v_side = transposed ? left : right;
    for (std::size_t j = 0; j < r; ++j) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < u_side.rows(); ++i) {
            if (std::fabs(u_side(i, j)) > std::fabs(u_side(best, j))) best = i;
        }
        if (u_side(best, j) < 0) {
            scale_column(u_side, j, -1.0);
            scale_column(v_side, j, -1.0);
        }
    }

    FactoredMatrix f;
    f.u = u_side;
    f.sigma = std::move(sigma);
    f.vt = v_side.transpose();
    f.numerical_rank = rank;
    return f;
}

FactoredMatrix truncate(const FactoredMatrix& f, std::size_t r_keep) {
    if (r_keep < 1 || r_keep > f.rank()) {
        throw Error("cannot truncate rank-" + std::to_string(f.rank()) + " factors to " + std::to_string(r_keep));
    }
    FactoredMatrix out;
    out.u = Matrix(f.u.rows(), r_keep);
    for (std::size_t i = 0; i < f.u.rows(); ++i) {
        for (std::size_t j = 0; j < r_keep; ++j) out.u(i, j) = f.u(i, j);
    }
    out.sigma.assign(f.sigma.begin(), f.sigma.begin() + static_cast<std::ptrdiff_t>(r_keep));
    out.vt = Matrix(r_keep, f.vt.cols());
    for (std::size_t i = 0; i < r_keep; ++i) {
        for (std::size_t j = 0; j < f.vt.cols(); ++j) out.vt(i, j) = f.vt(i, j);
    }
    out.feature_order = f.feature_order;
    out.numerical_rank = std::min(f.numerical_rank, r_keep);
    return out;
}

Matrix to_dense(const CountMatrix& m, bool center_rows) {
    Matrix x(m.size(), static_cast<std::size_t>(m.days()));
    std::size_t i = 0;
    for (const auto& [id, row] : m.rows()) {
        auto dst = x.row(i++);
        for (const auto& [day, c] : row.entries) dst[static_cast<std::size_t>(day)] = static_cast<double>(c);
        if (center_rows) {
            const double mean = std::accumulate(dst.begin(), dst.end(), 0.0) / static_cast<double>(dst.size());
            for (auto& v : dst) v -= mean;
        }
    }
    return x;
}

FactoredMatrix factorize(const CountMatrix& m, bool center_rows) {
    auto f = svd(to_dense(m, center_rows));
    f.feature_order.reserve(m.size());
    for (const auto& [id, row] : m.rows()) f.feature_order.push_back(id);
    return f;
}

} // namespace dcm
