#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "tnt/container.hpp"

namespace tnt {

// Synthetic models with Gaussian-initialized weights (std sqrt(2 / fan_in)),
// used for conversion tests and demos. Layer names follow "<layer>.weight" /
// "<layer>.bias".
struct FixtureModel {
  ModelManifest manifest;
  std::vector<WeightTensor> tensors;
};

// 32C5 - 64C5 - FC512 - FC10 on 28x28 inputs with same padding:
// 1,663,370 parameters including biases.
FixtureModel lenet5_fixture(std::uint64_t seed);

// Thirteen 3x3 conv layers and three dense layers in the VGG-16 arrangement,
// every width divided by `width_divisor` (1 gives the CIFAR-style layout with
// 512-wide dense layers).
FixtureModel vgg16_fixture(std::size_t width_divisor, std::uint64_t seed);

// One f32 dense layer "dense.weight" of shape [rows, cols].
FixtureModel dense_fixture(std::size_t rows, std::size_t cols, std::uint64_t seed);

void write_fixture(const std::filesystem::path& path, const FixtureModel& model);

}  // namespace tnt
