#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace collapse {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Provenance of a row: real data, or synthetic output of model `generation`.
struct Origin {
    bool synthetic = false;
    std::uint32_t generation = 0;

    static constexpr Origin real() noexcept { return {}; }
    static constexpr Origin synthetic_from(std::uint32_t generation) noexcept {
        return {true, generation};
    }
    friend bool operator==(const Origin&, const Origin&) = default;
};

/// Row-major table of `dim`-dimensional samples with one origin tag per row.
class Dataset {
public:
    explicit Dataset(std::size_t dim);
    Dataset(std::size_t dim, std::vector<double> values, std::vector<Origin> origins);
    /// Every row gets `origin`.
    Dataset(const RowMatrix& rows, Origin origin);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return origins_.size(); }
    bool empty() const noexcept { return origins_.empty(); }

    std::span<const double> row(std::size_t i) const noexcept {
        return {values_.data() + i * dim_, dim_};
    }
    Origin origin(std::size_t i) const noexcept { return origins_[i]; }
    std::span<const Origin> origins() const noexcept { return origins_; }
    std::span<const double> values() const noexcept { return values_; }

    Eigen::Map<const RowMatrix> matrix() const noexcept {
        return {values_.data(), static_cast<Eigen::Index>(size()), static_cast<Eigen::Index>(dim_)};
    }

    std::size_t count_real() const noexcept;

    void reserve(std::size_t rows) {
        values_.reserve(rows * dim_);
        origins_.reserve(rows);
    }
    void push_back(std::span<const double> row, Origin origin);
    void tag_all(Origin origin) { origins_.assign(origins_.size(), origin); }
    void append(const Dataset& other);

    /// Copy of the rows at `indices`, in order.
    Dataset select(std::span<const std::size_t> indices) const;
    /// Copy of rows [first, last).
    Dataset slice(std::size_t first, std::size_t last) const;

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    std::size_t dim_;
    std::vector<double> values_;
    std::vector<Origin> origins_;
};

}  // namespace collapse
