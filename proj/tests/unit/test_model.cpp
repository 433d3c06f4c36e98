#include <bit>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "glitchguard/error.hpp"
#include "glitchguard/model/autoencoder.hpp"
#include "glitchguard/model/checkpoint.hpp"
#include "glitchguard/model/config.hpp"
#include "glitchguard/model/train.hpp"
#include "glitchguard/numerics/convlstm.hpp"
#include "support.hpp"

using namespace glitchguard;
using testing_support::random_tensor;

namespace {

AutoencoderConfig micro_config(std::uint64_t seed = 0) {
  AutoencoderConfig c;
  c.frame_height = 8;
  c.frame_width = 8;
  c.window = 3;
  c.encoder = {{2, 4, 2, 1}, {2, 4, 2, 1}};
  c.lstm_hidden = {2, 2, 2};
  c.lstm_kernel = 3;
  c.seed = seed;
  return c;
}

AutoencoderConfig small_config(std::uint64_t seed = 0) {
  AutoencoderConfig c;
  c.frame_height = 32;
  c.frame_width = 32;
  c.window = 10;
  c.encoder = {{8, 4, 2, 1}, {16, 4, 2, 1}};
  c.lstm_hidden = {8, 4, 8};
  c.seed = seed;
  return c;
}

Tensor random_clip(const AutoencoderConfig& c, std::uint64_t seed) {
  Rng rng(seed);
  return testing_support::random_tensor_f(rng, {c.window, 1, c.frame_height, c.frame_width}, 0.0, 1.0);
}

std::vector<TensorD> to_double(const ModelCheckpoint& ck) {
  std::vector<TensorD> out;
  for (const auto& p : ck.params) out.push_back(p.value.cast<double>());
  return out;
}

}  // namespace

TEST_CASE("config validation names the failing layer") {
  AutoencoderConfig c = small_config();
  CHECK_NOTHROW(c.validate());
  c.encoder.push_back({4, 4, 2, 1});
  c.encoder.push_back({4, 4, 2, 1});
  c.encoder.push_back({4, 4, 2, 1});
  c.encoder.push_back({4, 4, 2, 1});
  try {
    c.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("enc") != std::string::npos);
  }
  CHECK_THROWS_AS(init_params(c), ConfigError);

  AutoencoderConfig bad_window = small_config();
  bad_window.window = 0;
  CHECK_THROWS_AS(bad_window.validate(), ConfigError);

  // 227 with the default encoder does not mirror back exactly; the decoder check catches it.
  AutoencoderConfig odd = small_config();
  odd.frame_height = 33;
  CHECK_THROWS_AS(odd.validate(), ConfigError);
}

TEST_CASE("config text roundtrip and layer strings") {
  const AutoencoderConfig c = small_config(42);
  CHECK(AutoencoderConfig::from_text(c.to_text()) == c);
  CHECK_THROWS_AS(AutoencoderConfig::from_text(c.to_text() + "bogus=1\n"), ConfigError);
  CHECK(encoder_from_string("8:4:2:1,16:4:2:1") == c.encoder);
  CHECK(encoder_to_string(c.encoder) == "8:4:2:1,16:4:2:1");
  CHECK(sizes_from_string("8,4,8") == c.lstm_hidden);
  CHECK_THROWS_AS(encoder_from_string("8:4:2"), ConfigError);
  CHECK_THROWS_AS(sizes_from_string("8,x"), ConfigError);

  TrainingHyper h;
  CHECK_NOTHROW(h.validate());
  h.learning_rate = 0.0;
  CHECK_THROWS_AS(h.validate(), ConfigError);
  h = TrainingHyper{};
  h.batch_size = 0;
  CHECK_THROWS_AS(h.validate(), ConfigError);
}

TEST_CASE("decoder mirrors the encoder back to the input shape") {
  for (const auto& c : {micro_config(), small_config()}) {
    const auto dec = decoder_specs(c);
    const auto enc = encoder_specs(c);
    REQUIRE(dec.size() == enc.size());
    CHECK(dec.back().out_channels == 1);
    std::size_t h = c.frame_height;
    for (const auto& s : enc) h = conv_output_size(h, s);
    for (const auto& s : dec) h = deconv_output_size(h, s);
    CHECK(h == c.frame_height);
  }
}

TEST_CASE("init_params: determinism, seeds and bias values") {
  const auto a = init_params(small_config(3));
  const auto b = init_params(small_config(3));
  CHECK(a == b);
  CHECK(serialize_checkpoint(a) == serialize_checkpoint(b));
  const auto other = init_params(small_config(4));
  CHECK_FALSE(a.params == other.params);

  const auto layout = parameter_layout(a.config);
  REQUIRE(layout.size() == a.params.size());
  for (std::size_t i = 0; i < layout.size(); ++i) {
    CHECK(layout[i].name == a.params[i].name);
    CHECK(layout[i].shape == a.params[i].value.shape());
  }

  for (const auto& p : a.params) {
    const std::string& n = p.name;
    if (n.ends_with(".bias") && n.starts_with("lstm")) {
      const std::size_t hidden = p.value.size() / 4;
      for (std::size_t i = 0; i < p.value.size(); ++i) {
        const bool forget = i / hidden == static_cast<std::size_t>(Gate::kForget);
        CHECK(p.value[i] == (forget ? 1.0f : 0.0f));
      }
    } else if (n.ends_with(".bias")) {
      for (float v : p.value.values()) CHECK(v == 0.0f);
    } else {
      // Glorot bound: sqrt(6 / (fan_in + fan_out)) with fan = channels * k * k.
      const auto& s = p.value.shape();
      const double receptive = static_cast<double>(s[2] * s[3]);
      const double bound = std::sqrt(6.0 / (receptive * static_cast<double>(s[0] + s[1])));
      float lo = 0, hi = 0;
      for (float v : p.value.values()) {
        CHECK(std::abs(v) <= bound);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      CHECK(lo < 0.0f);
      CHECK(hi > 0.0f);
    }
  }
}

TEST_CASE("forward: shape, range and determinism") {
  const auto ck = init_params(small_config(1));
  const Tensor clip = random_clip(ck.config, 5);
  const Tensor out = forward(ck, clip);
  CHECK(out.shape() == clip.shape());
  for (float v : out.values()) {
    CHECK(v >= 0.0f);
    CHECK(v <= 1.0f);
  }
  CHECK(forward(ck, clip) == out);
  CHECK_THROWS_AS(forward(ck, Tensor(Shape{9, 1, 32, 32})), ShapeError);
  CHECK_THROWS_AS(forward(ck, Tensor(Shape{10, 1, 32, 16})), ShapeError);

  // saturating inputs still stay in range
  const Tensor extreme(clip.shape(), 1.0f);
  for (float v : forward(ck, extreme).values()) {
    CHECK(v >= 0.0f);
    CHECK(v <= 1.0f);
  }
}

TEST_CASE("full-model gradient matches finite differences on the micro config") {
  double worst = 0.0;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const auto cfg = micro_config(trial);
    const auto ck = init_params(cfg);
    std::vector<TensorD> params = to_double(ck);
    Rng rng(1000 + trial);
    // random biases too, so no block sits at a special point
    for (auto& p : params)
      for (auto& v : p.values()) v += rng.uniform(-0.1, 0.1);
    const TensorD clip = random_tensor(rng, {cfg.window, 1, cfg.frame_height, cfg.frame_width}, 0.0, 1.0);
    const auto r = testing_support::check_tensors(
        [&](const std::vector<TensorD>& p, std::vector<TensorD>* g) {
          std::vector<TensorD> grads;
          for (const auto& t : p) grads.emplace_back(t.shape());
          const double loss = reconstruction_loss<double>(cfg, p, clip, grads);
          if (g) *g = std::move(grads);
          return loss;
        },
        params, 1e-5, 1e-6);
    worst = std::max(worst, r.max_relative_error);
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("reconstruction_loss agrees with reconstruct and scales gradients") {
  const auto cfg = micro_config(2);
  const auto params = to_double(init_params(cfg));
  Rng rng(8);
  const TensorD clip = random_tensor(rng, {cfg.window, 1, cfg.frame_height, cfg.frame_width}, 0.0, 1.0);
  const TensorD rec = reconstruct<double>(cfg, params, clip);
  double mse = 0.0;
  for (std::size_t i = 0; i < rec.size(); ++i) mse += (rec[i] - clip[i]) * (rec[i] - clip[i]);
  mse /= static_cast<double>(rec.size());

  std::vector<TensorD> g1, g2;
  for (const auto& p : params) {
    g1.emplace_back(p.shape());
    g2.emplace_back(p.shape());
  }
  CHECK(reconstruction_loss<double>(cfg, params, clip, g1) == doctest::Approx(mse).epsilon(1e-12));
  reconstruction_loss<double>(cfg, params, clip, g2, 0.25);
  for (std::size_t b = 0; b < g1.size(); ++b)
    for (std::size_t i = 0; i < g1[b].size(); ++i) CHECK(g2[b][i] == doctest::Approx(0.25 * g1[b][i]));
}

TEST_CASE("train: zero steps leaves the checkpoint unchanged") {
  const auto ck = init_params(micro_config());
  std::vector<Tensor> clips{random_clip(ck.config, 1)};
  TrainingHyper h;
  h.max_steps = 0;
  const auto r = train(ck, clips, h);
  CHECK(r.checkpoint.params == ck.params);
  CHECK(r.loss_history.empty());
}

TEST_CASE("train: input validation") {
  const auto ck = init_params(micro_config());
  TrainingHyper h;
  h.max_steps = 2;
  CHECK_THROWS_AS(train(ck, std::vector<Tensor>{}, h), Error);
  std::vector<Tensor> wrong{Tensor(Shape{3, 1, 8, 4})};
  CHECK_THROWS_AS(train(ck, wrong, h), ShapeError);

  std::vector<Tensor> nan_clip{random_clip(ck.config, 1)};
  nan_clip[0][0] = std::nanf("");
  try {
    train(ck, nan_clip, h);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("step 0") != std::string::npos);
  }
}

TEST_CASE("train: tiny model halves the loss on constant scenes, deterministically") {
  AutoencoderConfig cfg;
  cfg.frame_height = 16;
  cfg.frame_width = 16;
  cfg.window = 10;
  cfg.encoder = {{8, 4, 2, 1}, {16, 4, 2, 1}};
  cfg.lstm_hidden = {8, 4, 8};
  cfg.seed = 11;
  const auto ck = init_params(cfg);

  // Each clip repeats one static frame: a soft diagonal gradient with a bright block.
  std::vector<Tensor> clips;
  for (int n = 0; n < 50; ++n) {
    Tensor clip(Shape{cfg.window, 1, 16, 16});
    for (std::size_t t = 0; t < cfg.window; ++t)
      for (std::size_t y = 0; y < 16; ++y)
        for (std::size_t x = 0; x < 16; ++x) {
          const bool block = y >= 4 && y < 9 && x >= 6 && x < 11;
          clip[(t * 16 + y) * 16 + x] = block ? 0.9f : 0.2f + 0.02f * static_cast<float>(x + y) / 2.0f;
        }
    clips.push_back(std::move(clip));
  }
  TrainingHyper h;
  h.max_steps = 200;
  h.batch_size = 4;
  const auto r = train(ck, clips, h);
  REQUIRE(r.loss_history.size() == 200);
  CHECK(r.loss_history.back() <= 0.5 * r.loss_history.front());
  CHECK(r.checkpoint.metadata.steps == 200);
  CHECK(r.checkpoint.metadata.final_loss == r.loss_history.back());

  const auto again = train(ck, clips, h);
  CHECK(again.checkpoint == r.checkpoint);
  CHECK(again.loss_history == r.loss_history);
}

TEST_CASE("train: thread count does not change the result") {
  const auto ck = init_params(micro_config(6));
  std::vector<Tensor> clips;
  for (std::uint64_t i = 0; i < 7; ++i) clips.push_back(random_clip(ck.config, i));
  TrainingHyper h;
  h.max_steps = 5;
  h.batch_size = 3;
  const auto one = train(ck, clips, h);
  h.threads = 3;
  const auto three = train(ck, clips, h);
  CHECK(one.checkpoint == three.checkpoint);
  CHECK(one.loss_history == three.loss_history);
}

TEST_CASE("checkpoint save/load roundtrip and distinct errors") {
  testing_support::TempDir dir("model");
  auto ck = init_params(small_config(9));
  ck.metadata = TrainingMetadata{17, 0.0123456789, 9};
  const auto path = dir.path() / "model.gbld";
  save_checkpoint(ck, path);
  CHECK(load_checkpoint(path) == ck);

  const std::string bytes = serialize_checkpoint(ck);
  CHECK(bytes.substr(0, 4) == "GBLD");
  CHECK(static_cast<unsigned char>(bytes[4]) == ModelCheckpoint::kFormatVersion);
  CHECK(bytes[5] == 0);

  std::string bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(deserialize_checkpoint(bad), BadMagicError);

  std::string version = bytes;
  version[4] = 7;
  CHECK_THROWS_AS(deserialize_checkpoint(version), VersionMismatchError);

  CHECK_THROWS_AS(deserialize_checkpoint(bytes.substr(0, bytes.size() - 10)), TruncatedCheckpointError);
  CHECK_THROWS_AS(deserialize_checkpoint(bytes.substr(0, bytes.size() / 2)), TruncatedCheckpointError);
  CHECK_THROWS_AS(deserialize_checkpoint(bytes.substr(0, 6)), TruncatedCheckpointError);
  CHECK_THROWS_AS(deserialize_checkpoint(bytes + "x"), CheckpointError);

  {
    std::ofstream out(dir.path() / "cut.gbld", std::ios::binary);
    out << bytes.substr(0, bytes.size() - 3);
  }
  CHECK_THROWS_AS(load_checkpoint(dir.path() / "cut.gbld"), TruncatedCheckpointError);
  CHECK_THROWS_AS(load_checkpoint(dir.path() / "missing.gbld"), IoError);
}

TEST_CASE("checkpoint bytes are fixed little-endian floats in layout order") {
  const auto ck = init_params(micro_config(1));
  const std::string bytes = serialize_checkpoint(ck);
  // The last parameter block is the final decoder bias; its floats end the file.
  const Tensor& last = ck.params.back().value;
  const std::size_t n = last.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t off = bytes.size() - 4 * (n - i);
    std::uint32_t word = 0;
    for (int b = 3; b >= 0; --b) word = (word << 8) | static_cast<unsigned char>(bytes[off + static_cast<std::size_t>(b)]);
    CHECK(std::bit_cast<float>(word) == last[i]);
  }
}
