#include "tnt/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tnt/rng.hpp"

namespace tnt {

namespace {

void add_layer(FixtureModel& model, const std::string& name, std::vector<std::size_t> dims,
               std::uint64_t seed) {
  WeightTensor t;
  t.shape = TensorShape(std::move(dims));
  t.layer_name = name;
  t.layer_index = static_cast<int>(model.tensors.size());
  const std::size_t count = t.shape.element_count();
  const std::size_t fan_in = t.shape.rank() > 1 ? count / t.shape[0] : count;
  const double std_dev = std::sqrt(2.0 / static_cast<double>(fan_in));
  Stream stream(derive_seed(seed, static_cast<std::uint64_t>(t.layer_index), 0));
  t.values.resize(count);
  for (auto& v : t.values) {
    // rounded through f32 so in-memory tensors equal what the container stores
    v = static_cast<float>(std_dev * stream.standard_normal());
  }
  model.manifest.layers.push_back({name, t.shape, Dtype::F32, role_for_shape(t.shape)});
  model.tensors.push_back(std::move(t));
}

void add_conv(FixtureModel& m, const std::string& name, std::size_t out, std::size_t in,
              std::size_t k, std::uint64_t seed) {
  add_layer(m, name + ".weight", {out, in, k, k}, seed);
  add_layer(m, name + ".bias", {out}, seed);
}

void add_dense(FixtureModel& m, const std::string& name, std::size_t out, std::size_t in,
               std::uint64_t seed) {
  add_layer(m, name + ".weight", {out, in}, seed);
  add_layer(m, name + ".bias", {out}, seed);
}

}  // namespace

FixtureModel lenet5_fixture(std::uint64_t seed) {
  FixtureModel m;
  add_conv(m, "conv1", 32, 1, 5, seed);
  add_conv(m, "conv2", 64, 32, 5, seed);
  add_dense(m, "fc1", 512, 7 * 7 * 64, seed);
  add_dense(m, "fc2", 10, 512, seed);
  return m;
}

FixtureModel vgg16_fixture(std::size_t width_divisor, std::uint64_t seed) {
  const std::size_t d = width_divisor == 0 ? 1 : width_divisor;
  auto w = [d](std::size_t c) { return std::max<std::size_t>(c / d, 1); };
  FixtureModel m;
  const std::size_t blocks[5][2] = {{2, 64}, {2, 128}, {3, 256}, {3, 512}, {3, 512}};
  std::size_t in = 3;
  for (std::size_t b = 0; b < 5; ++b) {
    for (std::size_t i = 0; i < blocks[b][0]; ++i) {
      const std::size_t out = w(blocks[b][1]);
      add_conv(m, "conv" + std::to_string(b + 1) + "_" + std::to_string(i + 1), out, in, 3, seed);
      in = out;
    }
  }
  add_dense(m, "fc6", w(512), in, seed);
  add_dense(m, "fc7", w(512), w(512), seed);
  add_dense(m, "fc8", 10, w(512), seed);
  return m;
}

FixtureModel dense_fixture(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  FixtureModel m;
  add_layer(m, "dense.weight", {rows, cols}, seed);
  return m;
}

void write_fixture(const std::filesystem::path& path, const FixtureModel& model) {
  write_npz(path, model.tensors, Dtype::F32);
}

}  // namespace tnt
