#include "glitchguard/model/autoencoder.hpp"

#include <cmath>

#include "glitchguard/error.hpp"
#include "glitchguard/numerics/convlstm.hpp"
#include "glitchguard/numerics/layers.hpp"
#include "glitchguard/numerics/random.hpp"

namespace glitchguard {

std::vector<Tensor> ModelCheckpoint::tensors() const {
  std::vector<Tensor> out;
  out.reserve(params.size());
  for (const auto& p : params) out.push_back(p.value);
  return out;
}

std::vector<std::string> ModelCheckpoint::names() const {
  std::vector<std::string> out;
  out.reserve(params.size());
  for (const auto& p : params) out.push_back(p.name);
  return out;
}

std::vector<ParamSlot> parameter_layout(const AutoencoderConfig& config) {
  config.validate();
  std::vector<ParamSlot> slots;
  const auto enc = encoder_specs(config);
  for (std::size_t i = 0; i < enc.size(); ++i) {
    const std::string prefix = "enc" + std::to_string(i + 1);
    const auto& s = enc[i];
    slots.push_back({prefix + ".weight", {s.out_channels, s.in_channels, s.kernel_size, s.kernel_size}});
    slots.push_back({prefix + ".bias", {s.out_channels}});
  }
  std::size_t in_channels = enc.back().out_channels;
  const std::size_t k = config.lstm_kernel;
  for (std::size_t l = 0; l < config.lstm_hidden.size(); ++l) {
    const std::string prefix = "lstm" + std::to_string(l + 1);
    const std::size_t hidden = config.lstm_hidden[l];
    slots.push_back({prefix + ".w_input", {kGateCount * hidden, in_channels, k, k}});
    slots.push_back({prefix + ".w_hidden", {kGateCount * hidden, hidden, k, k}});
    slots.push_back({prefix + ".bias", {kGateCount * hidden}});
    in_channels = hidden;
  }
  const auto dec = decoder_specs(config);
  for (std::size_t j = 0; j < dec.size(); ++j) {
    const std::string prefix = "dec" + std::to_string(j + 1);
    const auto& s = dec[j];
    slots.push_back({prefix + ".weight", {s.in_channels, s.out_channels, s.kernel_size, s.kernel_size}});
    slots.push_back({prefix + ".bias", {s.out_channels}});
  }
  return slots;
}

ModelCheckpoint init_params(const AutoencoderConfig& config) {
  ModelCheckpoint checkpoint;
  checkpoint.config = config;
  checkpoint.metadata.seed = config.seed;
  Rng rng(config.seed);
  for (auto& slot : parameter_layout(config)) {
    Tensor value(slot.shape);
    if (slot.shape.size() == 4) {
      const double receptive = static_cast<double>(slot.shape[2] * slot.shape[3]);
      const double fan_in = static_cast<double>(slot.shape[1]) * receptive;
      const double fan_out = static_cast<double>(slot.shape[0]) * receptive;
      const double limit = std::sqrt(6.0 / (fan_in + fan_out));
      for (auto& v : value.values()) v = static_cast<float>(rng.uniform(-limit, limit));
    } else if (slot.name.starts_with("lstm")) {
      const std::size_t hidden = slot.shape[0] / kGateCount;
      const std::size_t forget = static_cast<std::size_t>(Gate::kForget) * hidden;
      for (std::size_t c = forget; c < forget + hidden; ++c) value[c] = 1.0f;
    }
    checkpoint.params.push_back({std::move(slot.name), std::move(value)});
  }
  return checkpoint;
}

void check_clip_shape(const AutoencoderConfig& config, const Shape& clip_shape) {
  require_same_shape(Shape{config.window, 1, config.frame_height, config.frame_width}, clip_shape,
                     "clip");
}

namespace {

// Indices into the flat parameter list.
struct Layout {
  std::size_t encoders, lstms, decoders;
  std::size_t enc(std::size_t i) const { return 2 * i; }
  std::size_t lstm(std::size_t l) const { return 2 * encoders + 3 * l; }
  std::size_t dec(std::size_t j) const { return 2 * encoders + 3 * lstms + 2 * j; }
  std::size_t total() const { return 2 * encoders + 3 * lstms + 2 * decoders; }
};

template <typename T>
struct FrameTrace {
  std::vector<BasicTensor<T>> enc_in;   // input of each encoder conv
  std::vector<BasicTensor<T>> enc_out;  // tanh output of each encoder conv
  std::vector<ConvLstmCache<T>> lstm;
  std::vector<BasicTensor<T>> dec_in;
  std::vector<BasicTensor<T>> dec_out;  // tanh, or sigmoid for the last layer
};

template <typename T>
class Network {
 public:
  Network(const AutoencoderConfig& config, std::span<const BasicTensor<T>> params)
      : config_(config),
        params_(params),
        enc_(encoder_specs(config)),
        dec_(decoder_specs(config)),
        layout_{enc_.size(), config.lstm_hidden.size(), dec_.size()} {
    if (params.size() != layout_.total()) {
      throw ShapeError("model expects " + std::to_string(layout_.total()) +
                       " parameter blocks, got " + std::to_string(params.size()));
    }
    for (std::size_t l = 0; l < layout_.lstms; ++l) {
      const std::size_t b = layout_.lstm(l);
      lstm_.push_back(ConvLstmParams<T>{params[b], params[b + 1], params[b + 2]});
      lstm_.back().validate();
    }
  }

  // Runs the whole window. Traces are kept only when `traces` is non-null.
  BasicTensor<T> run(const BasicTensor<T>& clip, std::vector<FrameTrace<T>>* traces) const {
    check_clip_shape(config_, clip.shape());
    const std::size_t frames = config_.window;
    const std::size_t plane = config_.frame_height * config_.frame_width;
    BasicTensor<T> out(clip.shape());

    std::vector<BasicTensor<T>> h, c;
    std::size_t state_h = config_.frame_height, state_w = config_.frame_width;
    for (const auto& s : enc_) {
      state_h = conv_output_size(state_h, s);
      state_w = conv_output_size(state_w, s);
    }
    for (std::size_t hidden : config_.lstm_hidden) {
      h.emplace_back(Shape{hidden, state_h, state_w});
      c.emplace_back(Shape{hidden, state_h, state_w});
    }
    if (traces) traces->assign(frames, FrameTrace<T>{});

    for (std::size_t t = 0; t < frames; ++t) {
      FrameTrace<T>* trace = traces ? &(*traces)[t] : nullptr;
      BasicTensor<T> x(Shape{1, config_.frame_height, config_.frame_width},
                       std::vector<T>(clip.data() + t * plane, clip.data() + (t + 1) * plane));
      for (std::size_t i = 0; i < enc_.size(); ++i) {
        BasicTensor<T> z = conv2d_forward(x, enc_[i], params_[layout_.enc(i)], params_[layout_.enc(i) + 1]);
        BasicTensor<T> a = tanh_forward(z);
        if (trace) {
          trace->enc_in.push_back(std::move(x));
          trace->enc_out.push_back(a);
        }
        x = std::move(a);
      }
      for (std::size_t l = 0; l < lstm_.size(); ++l) {
        ConvLstmStep<T> step = convlstm_cell_step(x, h[l], c[l], lstm_[l]);
        h[l] = step.h;
        c[l] = std::move(step.c);
        x = std::move(step.h);
        if (trace) trace->lstm.push_back(std::move(step.cache));
      }
      for (std::size_t j = 0; j < dec_.size(); ++j) {
        BasicTensor<T> z = deconv2d_forward(x, dec_[j], params_[layout_.dec(j)], params_[layout_.dec(j) + 1]);
        BasicTensor<T> a = j + 1 == dec_.size() ? sigmoid_forward(z) : tanh_forward(z);
        if (trace) {
          trace->dec_in.push_back(std::move(x));
          trace->dec_out.push_back(a);
        }
        x = std::move(a);
      }
      std::copy(x.data(), x.data() + plane, out.data() + t * plane);
    }
    return out;
  }

  T loss(const BasicTensor<T>& clip, std::span<BasicTensor<T>> grads, T scale) const {
    if (grads.size() != layout_.total()) {
      throw ShapeError("gradient buffer has " + std::to_string(grads.size()) + " blocks, expected " +
                       std::to_string(layout_.total()));
    }
    for (std::size_t b = 0; b < grads.size(); ++b) {
      require_same_shape(params_[b].shape(), grads[b].shape(), "gradient block " + std::to_string(b));
    }
    std::vector<FrameTrace<T>> traces;
    const BasicTensor<T> recon = run(clip, &traces);
    LossResult<T> loss = mse_loss(recon, clip);
    for (auto& g : loss.grad.values()) g *= scale;

    const std::size_t frames = config_.window;
    const std::size_t plane = config_.frame_height * config_.frame_width;
    std::vector<BasicTensor<T>> dh, dc;
    for (std::size_t l = 0; l < lstm_.size(); ++l) {
      dh.emplace_back(traces[0].lstm[l].c.shape());
      dc.emplace_back(traces[0].lstm[l].c.shape());
    }

    for (std::size_t t = frames; t-- > 0;) {
      const FrameTrace<T>& trace = traces[t];
      BasicTensor<T> g(Shape{1, config_.frame_height, config_.frame_width},
                       std::vector<T>(loss.grad.data() + t * plane, loss.grad.data() + (t + 1) * plane));
      for (std::size_t j = dec_.size(); j-- > 0;) {
        g = j + 1 == dec_.size() ? sigmoid_backward(g, trace.dec_out[j])
                                 : tanh_backward(g, trace.dec_out[j]);
        ConvGrads<T> cg = deconv2d_backward(g, trace.dec_in[j], dec_[j], params_[layout_.dec(j)]);
        accumulate(grads[layout_.dec(j)], cg.weights);
        accumulate(grads[layout_.dec(j) + 1], cg.bias);
        g = std::move(cg.input);
      }
      for (std::size_t l = lstm_.size(); l-- > 0;) {
        accumulate(g, dh[l]);
        ConvLstmGrads<T> lg = convlstm_cell_backward(g, dc[l], trace.lstm[l], lstm_[l]);
        const std::size_t b = layout_.lstm(l);
        accumulate(grads[b], lg.w_input);
        accumulate(grads[b + 1], lg.w_hidden);
        accumulate(grads[b + 2], lg.bias);
        dh[l] = std::move(lg.h_prev);
        dc[l] = std::move(lg.c_prev);
        g = std::move(lg.x);
      }
      for (std::size_t i = enc_.size(); i-- > 0;) {
        g = tanh_backward(g, trace.enc_out[i]);
        ConvGrads<T> cg = conv2d_backward(g, trace.enc_in[i], enc_[i], params_[layout_.enc(i)]);
        accumulate(grads[layout_.enc(i)], cg.weights);
        accumulate(grads[layout_.enc(i) + 1], cg.bias);
        if (i > 0) g = std::move(cg.input);
      }
    }
    return loss.value;
  }

 private:
  const AutoencoderConfig& config_;
  std::span<const BasicTensor<T>> params_;
  std::vector<ConvSpec> enc_, dec_;
  Layout layout_;
  std::vector<ConvLstmParams<T>> lstm_;
};

}  // namespace

template <typename T>
BasicTensor<T> reconstruct(const AutoencoderConfig& config, std::span<const BasicTensor<T>> params,
                           const BasicTensor<T>& clip) {
  return Network<T>(config, params).run(clip, nullptr);
}

template <typename T>
T reconstruction_loss(const AutoencoderConfig& config, std::span<const BasicTensor<T>> params,
                      const BasicTensor<T>& clip, std::span<BasicTensor<T>> grads, T scale) {
  return Network<T>(config, params).loss(clip, grads, scale);
}

Tensor forward(const ModelCheckpoint& checkpoint, const Tensor& clip) {
  const std::vector<Tensor> params = checkpoint.tensors();
  return reconstruct<float>(checkpoint.config, params, clip);
}

template Tensor reconstruct(const AutoencoderConfig&, std::span<const Tensor>, const Tensor&);
template TensorD reconstruct(const AutoencoderConfig&, std::span<const TensorD>, const TensorD&);
template float reconstruction_loss(const AutoencoderConfig&, std::span<const Tensor>, const Tensor&,
                                   std::span<Tensor>, float);
template double reconstruction_loss(const AutoencoderConfig&, std::span<const TensorD>,
                                    const TensorD&, std::span<TensorD>, double);

}  // namespace glitchguard
