#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "indexlab/dataset.hpp"

namespace indexlab::fixtures {

inline constexpr int kPropertyRuns = 120;

inline std::vector<double> normal_sample(std::mt19937_64& rng, std::size_t n, double mu = 0.0, double sigma = 1.0) {
    std::normal_distribution<double> d(mu, sigma);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

inline Series series(std::string name, std::vector<double> v) { return Series{std::move(name), std::move(v)}; }

inline std::vector<std::string> labels(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back("r" + std::to_string(i));
    return out;
}

// Random dataset with values kept inside [0, 100].
inline Dataset random_dataset(std::mt19937_64& rng, std::size_t n, std::vector<std::string> cols) {
    std::uniform_real_distribution<double> u(5.0, 95.0);
    std::vector<CountryRecord> recs;
    for (std::size_t i = 0; i < n; ++i) {
        CountryRecord r{"c" + std::to_string(i), {}};
        for (std::size_t j = 0; j < cols.size(); ++j) r.values.push_back(u(rng));
        recs.push_back(std::move(r));
    }
    return Dataset(std::move(cols), std::move(recs));
}

}  // namespace indexlab::fixtures
