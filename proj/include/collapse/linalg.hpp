#pragma once

#include "collapse/dataset.hpp"
#include "collapse/rng.hpp"

namespace collapse {

/// Factor F with F·Fᵀ equal to the (symmetrized) input.
///
/// F is the lower-triangular Cholesky factor whenever the input is
/// numerically positive definite. Otherwise the eigenvalues are clamped at 0,
/// F = V·sqrt(Λ) and `degenerate` is set.
struct CovarianceFactor {
    Matrix factor;
    bool degenerate = false;
};

/// Relative symmetry check: max|A − Aᵀ| ≤ tol · max(1, max|A|).
bool is_symmetric(const Matrix& a, double relative_tol = 1e-10);

/// Throws NonSymmetric when the input fails `is_symmetric`.
CovarianceFactor cholesky(const Matrix& a);

/// V·max(Λ, floor)·Vᵀ after symmetrizing the input.
Matrix eigen_clamp(const Matrix& a, double floor);

/// Principal square root of a symmetric PSD matrix, negative eigenvalues
/// clamped at 0.
Matrix psd_sqrt(const Matrix& a);

/// `count` rows of i.i.d. standard normals, all tagged `origin`.
Dataset sample_standard_normal(RngStream& rng, std::size_t count, std::size_t dim,
                               Origin origin = Origin::real());

/// Fills a count×dim row-major block with standard normals (row by row).
RowMatrix standard_normal_block(RngStream& rng, std::size_t count, std::size_t dim);

}  // namespace collapse
