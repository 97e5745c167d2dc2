#pragma once

#include "dcm/count_matrix.hpp"
#include "dcm/feature_id.hpp"
#include "dcm/matrix.hpp"

#include <cstddef>
#include <vector>

namespace dcm {

// Thin SVD X = U diag(sigma) Vt with r = min(m, n).
struct FactoredMatrix {
    Matrix u;                  // m x r, orthonormal columns
    std::vector<double> sigma; // non-increasing, >= 0
    Matrix vt;                 // r x n, orthonormal rows
    std::vector<FeatureId> feature_order;  // aligns U rows with matrix rows (may be empty)
    // Singular values past this index fell below the relative cutoff; they are
    // zero and their U/V vectors come from Gram-Schmidt completion.
    std::size_t numerical_rank = 0;

    std::size_t rank() const { return sigma.size(); }
    Matrix reconstruct() const;
};

// Singular values below this fraction of the largest are treated as zero.
inline constexpr double kRankCutoff = 1e-10;

struct SymmetricEigen {
    std::vector<double> values;  // descending
    Matrix vectors;              // column i pairs with values[i]
};

// Cyclic Jacobi eigensolver for a symmetric matrix.
SymmetricEigen jacobi_eigen(Matrix a);

// Thin SVD through the eigendecomposition of the smaller Gram matrix. Each
// U column is sign-normalized so its largest-magnitude entry is positive.
// Throws dcm::Error on empty input or non-finite entries.
FactoredMatrix svd(const Matrix& x);

// Keeps the leading r_keep singular triples.
FactoredMatrix truncate(const FactoredMatrix& f, std::size_t r_keep);

// Dense copy of the rows in FeatureId order, optionally mean-centered per row.
Matrix to_dense(const CountMatrix& m, bool center_rows = false);

FactoredMatrix factorize(const CountMatrix& m, bool center_rows = false);

} // namespace dcm
