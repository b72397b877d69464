#pragma once

// Shared fixtures for the unit and acceptance tests.

#include "genflow/dataset.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace testing_support {

inline std::filesystem::path data_dir() { return GENFLOW_TEST_DATA_DIR; }

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("genflow_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::filesystem::path write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream(path, std::ios::binary) << text;
    return path;
}

/// Gaussian blobs: class c centred at `separation * c` on every axis.
inline genflow::Dataset blobs(const std::vector<int>& per_class, int d, double separation,
                              std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    int n = 0;
    for (int k : per_class) n += k;
    genflow::Matrix x(n, d);
    std::vector<int> y;
    int row = 0;
    for (std::size_t c = 0; c < per_class.size(); ++c) {
        for (int i = 0; i < per_class[c]; ++i, ++row) {
            for (int j = 0; j < d; ++j) x(row, j) = separation * static_cast<double>(c) + noise(gen);
            y.push_back(static_cast<int>(c));
        }
    }
    std::vector<std::string> names, classes;
    for (int j = 0; j < d; ++j) names.push_back("f" + std::to_string(j));
    for (std::size_t c = 0; c < per_class.size(); ++c) classes.push_back("c" + std::to_string(c));
    return genflow::make_dataset(std::move(x), std::move(y), names, classes, "blobs");
}

/// Two classes split by the circle |x| = 1.2 in the plane plus `extra` noise axes.
inline genflow::Dataset rings(int n, int extra, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    genflow::Matrix x(n, 2 + extra);
    std::vector<int> y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < 2 + extra; ++j) x(i, j) = u(gen);
        y[static_cast<std::size_t>(i)] = x(i, 0) * x(i, 0) + x(i, 1) * x(i, 1) < 1.44 ? 1 : 0;
    }
    std::vector<std::string> names;
    for (int j = 0; j < 2 + extra; ++j) names.push_back("r" + std::to_string(j));
    return genflow::make_dataset(std::move(x), std::move(y), names, {"out", "in"}, "rings");
}

}  // namespace testing_support
