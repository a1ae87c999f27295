#include "collapse/dataset.hpp"

#include "collapse/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace collapse {

namespace {

void check_finite(std::span<const double> values) {
    if (!std::ranges::all_of(values, [](double v) { return std::isfinite(v); }))
        throw Error(ErrorCode::InvalidArgument, "dataset entries must be finite");
}

}  // namespace

Dataset::Dataset(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw Error(ErrorCode::InvalidArgument, "dataset dimension must be positive");
}

Dataset::Dataset(std::size_t dim, std::vector<double> values, std::vector<Origin> origins)
    : dim_(dim), values_(std::move(values)), origins_(std::move(origins)) {
    if (dim == 0) throw Error(ErrorCode::InvalidArgument, "dataset dimension must be positive");
    if (values_.size() != origins_.size() * dim_)
        throw Error(ErrorCode::DimensionMismatch,
                    std::to_string(values_.size()) + " values for " +
                        std::to_string(origins_.size()) + " rows of dim " + std::to_string(dim_));
    check_finite(values_);
}

Dataset::Dataset(const RowMatrix& rows, Origin origin) : Dataset(static_cast<std::size_t>(rows.cols())) {
    values_.assign(rows.data(), rows.data() + rows.size());
    origins_.assign(static_cast<std::size_t>(rows.rows()), origin);
    check_finite(values_);
}

std::size_t Dataset::count_real() const noexcept {
    return static_cast<std::size_t>(
        std::ranges::count_if(origins_, [](const Origin& o) { return !o.synthetic; }));
}

void Dataset::push_back(std::span<const double> row, Origin origin) {
    if (row.size() != dim_)
        throw Error(ErrorCode::DimensionMismatch,
                    "row of length " + std::to_string(row.size()) + " into dim " + std::to_string(dim_));
    check_finite(row);
    values_.insert(values_.end(), row.begin(), row.end());
    origins_.push_back(origin);
}

void Dataset::append(const Dataset& other) {
    if (other.dim_ != dim_)
        throw Error(ErrorCode::DimensionMismatch, "cannot append datasets of different dimension");
    values_.insert(values_.end(), other.values_.begin(), other.values_.end());
    origins_.insert(origins_.end(), other.origins_.begin(), other.origins_.end());
}

Dataset Dataset::select(std::span<const std::size_t> indices) const {
    Dataset out(dim_);
    out.reserve(indices.size());
    for (std::size_t i : indices) {
        const auto r = row(i);
        out.values_.insert(out.values_.end(), r.begin(), r.end());
        out.origins_.push_back(origins_[i]);
    }
    return out;
}

Dataset Dataset::slice(std::size_t first, std::size_t last) const {
    Dataset out(dim_);
    out.values_.assign(values_.begin() + static_cast<std::ptrdiff_t>(first * dim_),
                       values_.begin() + static_cast<std::ptrdiff_t>(last * dim_));
    out.origins_.assign(origins_.begin() + static_cast<std::ptrdiff_t>(first),
                        origins_.begin() + static_cast<std::ptrdiff_t>(last));
    return out;
}

}  // namespace collapse
