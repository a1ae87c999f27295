#include "collapse/linalg.hpp"

#include "collapse/error.hpp"

#include <algorithm>
#include <string>

namespace collapse {

bool is_symmetric(const Matrix& a, double relative_tol) {
    if (a.rows() != a.cols()) return false;
    if (a.size() == 0) return true;
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    return (a - a.transpose()).cwiseAbs().maxCoeff() <= relative_tol * scale;
}

CovarianceFactor cholesky(const Matrix& a) {
    if (!is_symmetric(a))
        throw Error(ErrorCode::NonSymmetric,
                    "matrix of size " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    const Matrix sym = 0.5 * (a + a.transpose());
    Eigen::LLT<Matrix> llt(sym);
    if (llt.info() == Eigen::Success) return {llt.matrixL(), false};
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
    const Vector roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return {eig.eigenvectors() * roots.asDiagonal(), true};
}

Matrix eigen_clamp(const Matrix& a, double floor) {
    const Matrix sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
    const Vector values = eig.eigenvalues();
    if (values.minCoeff() >= floor) return sym;
    const Matrix& v = eig.eigenvectors();
    Matrix out = v * values.cwiseMax(floor).asDiagonal() * v.transpose();
    return 0.5 * (out + out.transpose());
}

Matrix psd_sqrt(const Matrix& a) {
    const Matrix sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
    const Matrix& v = eig.eigenvectors();
    Matrix out = v * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() * v.transpose();
    return 0.5 * (out + out.transpose());
}

RowMatrix standard_normal_block(RngStream& rng, std::size_t count, std::size_t dim) {
    RowMatrix z(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dim));
    double* p = z.data();
    for (Eigen::Index i = 0; i < z.size(); ++i) p[i] = rng.normal();
    return z;
}

Dataset sample_standard_normal(RngStream& rng, std::size_t count, std::size_t dim, Origin origin) {
    if (count == 0 || dim == 0)
        throw Error(ErrorCode::InvalidArgument, "count and dim must be positive");
    return Dataset(standard_normal_block(rng, count, dim), origin);
}

}  // namespace collapse
