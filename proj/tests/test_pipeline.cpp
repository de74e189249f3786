#include <chrono>
#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "tnt/container.hpp"
#include "tnt/error.hpp"
#include "tnt/fixtures.hpp"
#include "tnt/pipeline.hpp"

using namespace tnt;
namespace fs = std::filesystem;

namespace {

ModelManifest manifest_for(const std::vector<WeightTensor>& ts) {
  ModelManifest m;
  for (const auto& t : ts) m.layers.push_back({t.layer_name, t.shape, Dtype::F32, role_for_shape(t.shape)});
  return m;
}

WeightTensor tensor(const std::string& name, std::vector<std::size_t> dims, std::vector<double> v) {
  return WeightTensor{TensorShape(std::move(dims)), std::move(v), name, 0};
}

}  // namespace

TEST_CASE("LeNet-5 fixture converts in full") {
  const auto fx = lenet5_fixture(1);
  const auto start = std::chrono::steady_clock::now();
  const auto [model, report] = quantize_model(fx.manifest, fx.tensors, QuantizeConfig{});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(secs < 60.0);
  CHECK(report.total_parameters == 1663370);
  REQUIRE(model.layers.size() == 8);
  std::size_t quantized = 0;
  for (const auto& l : model.layers) {
    CAPTURE(l.entry.name);
    if (l.entry.role == LayerRole::Bias) {
      CHECK_FALSE(l.quantized);
      CHECK(l.skip_reason == "bias");
      continue;
    }
    ++quantized;
    CHECK(l.quantized);
    CHECK(l.stats.mean_cosine >= 0.85);
  }
  CHECK(quantized == 4);
  CHECK(model.layers[0].vector_count == 32);
  CHECK(model.layers[0].vector_length == 25);
  CHECK(model.layers[4].strategy == DecomposeStrategy::RowWise);
  CHECK(model.layers[4].vector_count == 512);
  CHECK(report.warnings == 0);
}

TEST_CASE("skipped layers pass through byte for byte") {
  const auto fx = vgg16_fixture(8, 3);
  const auto path = fs::temp_directory_path() / "tnt_test_vgg.npz";
  write_fixture(path, fx);
  const auto c = TensorContainer::open(path);
  QuantizeConfig cfg;
  cfg.skip_layers = {"conv1_1.weight", "fc8.weight"};
  const auto [model, report] = quantize_model(c, cfg);
  for (const auto& name : cfg.skip_layers) {
    const auto idx = *c.manifest().index_of(name);
    CHECK_FALSE(model.layers[idx].quantized);
    CHECK(model.layers[idx].skip_reason == "config");
    CHECK(model.layers[idx].raw == c.read_raw(idx));
    CHECK(report.layers[idx].code_ratio == 1.0);
  }
  CHECK(model.layers[*c.manifest().index_of("conv1_2.weight")].quantized);
  CHECK(model.source_digest == sha256_hex(path));

  cfg.skip_layers = {"nope"};
  try {
    (void)quantize_model(c, cfg);
    FAIL("expected InvalidConfig");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidConfig);
    CHECK(std::string(e.what()).find("fc7.weight") != std::string::npos);
  }
  fs::remove(path);
}

TEST_CASE("all-zero layer is flagged, not fatal") {
  std::vector<WeightTensor> ts = {tensor("zero.weight", {3, 4}, std::vector<double>(12, 0.0)),
                                  tensor("mixed.weight", {2, 3}, {0, 0, 0, 1, -1, 0.25})};
  const auto [model, report] = quantize_model(manifest_for(ts), ts, QuantizeConfig{});
  CHECK(model.layers[0].degenerate == std::vector<std::uint32_t>{0, 1, 2});
  CHECK(model.layers[1].degenerate == std::vector<std::uint32_t>{0});
  CHECK(report.warnings == 4);
  CHECK(report.layers[0].degenerate_vectors == 3);
  CHECK(model.layers[0].stats.mean_cosine == 0.0);
  CHECK(model.layers[1].stats.mean_cosine > 0.9);
  const auto back = dequantize_layer(model.layers[0], ScalarKind::Single);
  CHECK(back.values == std::vector<double>(12, 0.0));
}

TEST_CASE("output does not depend on the thread count") {
  const auto fx = vgg16_fixture(16, 5);
  QuantizeConfig cfg;
  cfg.scalars = ScalarKind::Dual;
  const auto serial = quantize_model(fx.manifest, fx.tensors, cfg).first;
  for (int jobs : {2, 4, 8}) {
    cfg.jobs = jobs;
    CHECK(quantize_model(fx.manifest, fx.tensors, cfg).first == serial);
  }
}

TEST_CASE("dequantize then re-quantize is a fixed point") {
  const auto fx = vgg16_fixture(16, 9);
  for (auto mode : {QuantMode::Ternary, QuantMode::Binary}) {
    for (auto kind : {ScalarKind::Single, ScalarKind::Dual}) {
      QuantizeConfig cfg;
      cfg.mode = mode;
      cfg.scalars = kind;
      const auto first = quantize_model(fx.manifest, fx.tensors, cfg).first;
      std::vector<WeightTensor> back;
      for (const auto& l : first.layers) back.push_back(dequantize_layer(l, kind));
      ModelManifest m = fx.manifest;
      for (auto& e : m.layers) e.dtype = Dtype::F64;
      const auto second = quantize_model(m, back, cfg).first;
      for (std::size_t i = 0; i < first.layers.size(); ++i) {
        if (!first.layers[i].quantized) continue;
        CAPTURE(first.layers[i].entry.name);
        CHECK(second.layers[i].codes == first.layers[i].codes);
        CHECK(second.layers[i].scalars == first.layers[i].scalars);
      }
    }
  }
}

TEST_CASE("reported cosines match a direct recomputation") {
  const auto fx = lenet5_fixture(2);
  const auto [model, report] = quantize_model(fx.manifest, fx.tensors, QuantizeConfig{});
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const auto& l = model.layers[i];
    if (!l.quantized) continue;
    const auto codes = layer_codes(l);
    const auto vectors = decompose(fx.tensors[i], l.strategy);
    double sum = 0.0;
    for (std::size_t k = 0; k < vectors.size(); ++k) {
      const auto first = codes.begin() + static_cast<std::ptrdiff_t>(k * l.vector_length);
      const TernaryVector t(std::vector<std::int8_t>(
          first, first + static_cast<std::ptrdiff_t>(l.vector_length)));
      sum += cosine(vectors[k].values, t);
    }
    CHECK(std::abs(sum / static_cast<double>(vectors.size()) - report.layers[i].stats.mean_cosine) <
          1e-9);
  }
}

TEST_CASE("dual scalars fall back on one-signed vectors") {
  std::vector<WeightTensor> ts = {
      tensor("w", {3, 4}, {1, 2, 3, 4, -1, 2, -3, 4, -1, -0.5, -2, -0.1})};
  QuantizeConfig cfg;
  cfg.scalars = ScalarKind::Dual;
  const auto model = quantize_model(manifest_for(ts), ts, cfg).first;
  const auto& l = model.layers[0];
  CHECK(l.dual_fallback == std::vector<std::uint32_t>{0, 2});
  CHECK(l.scalars.size() == 4);
  const auto s = layer_scalars(l, ScalarKind::Dual);
  CHECK(s[0].kind == ScalarKind::Single);
  CHECK(s[1].kind == ScalarKind::Dual);
  CHECK(s[2].kind == ScalarKind::Single);
}

TEST_CASE("compression check") {
  SUBCASE("a million f32 weights give sixteen to one") {
    const auto fx = dense_fixture(1000, 1000, 4);
    const auto report = quantize_model(fx.manifest, fx.tensors, QuantizeConfig{}).second;
    CHECK(report.layers[0].code_bytes == 250000);
    CHECK(report.layers[0].code_ratio == 16.0);
    const auto check = verify_compression(report);
    CHECK(check.passed);
    REQUIRE(check.layers.size() == 1);
    CHECK(check.layers[0].checked);
  }
  SUBCASE("tiny layers are reported but not asserted") {
    std::vector<WeightTensor> ts = {tensor("small", {5, 5}, std::vector<double>(25, 0.5)),
                                    tensor("big", {64, 64}, std::vector<double>(4096, -0.5)),
                                    tensor("kept", {8, 8}, std::vector<double>(64, 1.0))};
    QuantizeConfig cfg;
    cfg.skip_layers = {"kept"};
    const auto report = quantize_model(manifest_for(ts), ts, cfg).second;
    CHECK(report.layers[0].code_bytes == 7);
    CHECK(std::abs(report.layers[0].code_ratio - 100.0 / 7.0) < 1e-12);
    CHECK(report.layers[2].code_ratio == 1.0);
    const auto check = verify_compression(report);
    CHECK(check.passed);
    CHECK_FALSE(check.layers[0].checked);
    CHECK(check.layers[1].checked);
    CHECK_FALSE(check.layers[2].checked);
  }
  SUBCASE("nothing large enough to check fails") {
    std::vector<WeightTensor> ts = {tensor("small", {5, 5}, std::vector<double>(25, 0.5))};
    const auto report = quantize_model(manifest_for(ts), ts, QuantizeConfig{}).second;
    CHECK_FALSE(verify_compression(report).passed);
  }
}

TEST_CASE("strategy resolution") {
  CHECK(resolve_strategy(DecomposeStrategy::ChannelWise, TensorShape({4, 5})) ==
        DecomposeStrategy::RowWise);
  CHECK(resolve_strategy(DecomposeStrategy::RowWise, TensorShape({2, 3, 4, 4})) ==
        DecomposeStrategy::ChannelWise);
  CHECK(resolve_strategy(DecomposeStrategy::Flat, TensorShape({2, 3, 4, 4})) ==
        DecomposeStrategy::Flat);
  CHECK(resolve_strategy(DecomposeStrategy::ChannelWise, TensorShape({7})) ==
        DecomposeStrategy::Flat);
}
