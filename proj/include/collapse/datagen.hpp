#pragma once

#include "collapse/dataset.hpp"
#include "collapse/linreg_task.hpp"
#include "collapse/rng.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace collapse {

enum class ToyDataset { Blobs, Circles, Moons, SwissRoll };

std::string_view to_string(ToyDataset name) noexcept;
/// Throws UnknownDataset.
ToyDataset parse_toy_dataset(std::string_view name);

struct BlobsOptions {
    std::size_t n_features = 2;
    std::size_t centers = 3;
};

struct CirclesOptions {
    double factor = 0.8;
};

/// For blobs `noise` is the cluster standard deviation; for the other
/// datasets it is the std-dev of isotropic noise added after generation.
struct ToyDatasetSpec {
    ToyDataset name = ToyDataset::Blobs;
    std::size_t n = 0;
    double noise = 0.0;
    std::variant<std::monostate, BlobsOptions, CirclesOptions> extra;

    /// Spec with the dataset's default options (blobs noise 1, circles factor 0.8).
    static ToyDatasetSpec defaults(ToyDataset name, std::size_t n);

    std::size_t dim() const;
    void validate() const;
};

/// Centers for a blobs dataset, uniform in [-10, 10]^n_features.
RowMatrix blob_centers(const ToyDatasetSpec& spec, RngStream& rng);

/// Draws `spec.n` points tagged real. Blobs draws its centers from `rng` first.
Dataset generate_toy(const ToyDatasetSpec& spec, RngStream& rng);

/// Blobs variant with fixed centers (lets train and test share the mixture).
Dataset generate_toy(const ToyDatasetSpec& spec, const RowMatrix& centers, RngStream& rng);

struct TrainTest {
    Dataset train;
    Dataset test;
};

/// Training set of spec.n points and an independent test set of `n_test`
/// points from the same distribution (shared blob centers).
TrainTest generate_toy_train_test(const ToyDatasetSpec& spec, std::size_t n_test, RngStream& rng);

/// n rows from N(mu0, sigma0_sq·I). Throws TooFewSamples for n < 2.
Dataset generate_gaussian_real(const Vector& mu0, double sigma0_sq, std::size_t n, RngStream& rng);

struct RegressionData {
    Dataset covariates;
    Vector labels;
};

/// x ~ N(0, I_d), y = xᵀw* + N(0, σ²).
RegressionData generate_linreg_data(const LinRegTask& task, std::size_t n, RngStream& rng);

}  // namespace collapse
