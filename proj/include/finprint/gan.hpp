#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "finprint/mat.hpp"
#include "finprint/pools.hpp"
#include "finprint/rng.hpp"

// Small convolutional GAN over 96x96 fingerprints, written directly on
// flat double buffers.  Everything below (init, noise, batch order) draws
// from one seeded generator, so a (pool, config) pair fixes the whole run
// bit for bit.  No threads inside a run; independent runs parallelize.

namespace finprint {

struct TrainConfig {
    int epochs = 1600;
    int noise_dim = 64;
    int batch_size = 0; // 0 means full pool
    double learning_rate = 2e-4;
    double momentum_decay_1 = 0.5;
    std::uint64_t seed = 0;
    int snapshot_window = 400;
    int snapshot_stride = 20;

    void validate() const {
        if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
        if (noise_dim < 1) throw std::invalid_argument("TrainConfig: noise_dim must be >= 1");
        if (snapshot_window < 1 || snapshot_stride < 1 ||
            snapshot_window % snapshot_stride != 0)
            throw std::invalid_argument(
                "TrainConfig: snapshot_window must be a positive multiple of snapshot_stride");
        if (!(learning_rate > 0.0))
            throw std::invalid_argument("TrainConfig: learning_rate must be positive");
        if (!(momentum_decay_1 >= 0.0 && momentum_decay_1 < 1.0))
            throw std::invalid_argument("TrainConfig: momentum_decay_1 must be in [0,1)");
    }
};

struct TrainTrace {
    std::vector<double> generator_loss;
    std::vector<double> discriminator_loss;
};

struct FakeImageSet {
    std::vector<Mat> images; // fingerprint units
    std::vector<int> source_epochs;
    std::uint64_t seed = 0;
};

struct TrainingDivergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// layers
// ---------------------------------------------------------------------------

namespace nn {

using Vec = std::vector<double>;

inline double softplus(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

struct ParamBlock {
    Vec* value;
    Vec* grad;
};

struct Dense {
    int in = 0, out = 0;
    Vec w, b, gw, gb; // w is out x in

    Dense(int in_, int out_) : in(in_), out(out_) {
        w.assign(static_cast<std::size_t>(in) * out, 0.0);
        b.assign(static_cast<std::size_t>(out), 0.0);
        gw.assign(w.size(), 0.0);
        gb.assign(b.size(), 0.0);
    }

    void forward(const Vec& x, Vec& y) const {
        y.assign(static_cast<std::size_t>(out), 0.0);
        for (int o = 0; o < out; ++o) {
            const double* wr = &w[static_cast<std::size_t>(o) * in];
            double acc = b[static_cast<std::size_t>(o)];
            for (int i = 0; i < in; ++i) acc += wr[i] * x[static_cast<std::size_t>(i)];
            y[static_cast<std::size_t>(o)] = acc;
        }
    }

    void backward(const Vec& x, const Vec& dy, Vec& dx) {
        dx.assign(static_cast<std::size_t>(in), 0.0);
        for (int o = 0; o < out; ++o) {
            const double g = dy[static_cast<std::size_t>(o)];
            if (g == 0.0) continue;
            const double* wr = &w[static_cast<std::size_t>(o) * in];
            double* gr = &gw[static_cast<std::size_t>(o) * in];
            for (int i = 0; i < in; ++i) {
                gr[i] += g * x[static_cast<std::size_t>(i)];
                dx[static_cast<std::size_t>(i)] += g * wr[i];
            }
            gb[static_cast<std::size_t>(o)] += g;
        }
    }
};

// 4x4 kernel, stride 2, pad 1: halves each spatial dimension.
struct Conv {
    static constexpr int K = 4, S = 2, P = 1;
    int cin = 0, cout = 0, h = 0, w_in = 0; // input geometry
    Vec w, b, gw, gb;                       // w is cout x cin x K x K

    Conv(int cin_, int cout_, int hw) : cin(cin_), cout(cout_), h(hw), w_in(hw) {
        w.assign(static_cast<std::size_t>(cout) * cin * K * K, 0.0);
        b.assign(static_cast<std::size_t>(cout), 0.0);
        gw.assign(w.size(), 0.0);
        gb.assign(b.size(), 0.0);
    }

    int out_hw() const { return h / S; }

    void forward(const Vec& x, Vec& y) const {
        const int oh = out_hw();
        y.assign(static_cast<std::size_t>(cout) * oh * oh, 0.0);
        for (int co = 0; co < cout; ++co) {
            double* yp = &y[static_cast<std::size_t>(co) * oh * oh];
            for (int oy = 0; oy < oh; ++oy)
                for (int ox = 0; ox < oh; ++ox) yp[oy * oh + ox] = b[static_cast<std::size_t>(co)];
            for (int ci = 0; ci < cin; ++ci) {
                const double* xp = &x[static_cast<std::size_t>(ci) * h * w_in];
                const double* wp = &w[((static_cast<std::size_t>(co) * cin) + ci) * K * K];
                for (int oy = 0; oy < oh; ++oy) {
                    for (int ky = 0; ky < K; ++ky) {
                        const int iy = oy * S - P + ky;
                        if (iy < 0 || iy >= h) continue;
                        for (int ox = 0; ox < oh; ++ox) {
                            double acc = 0.0;
                            const int ix0 = ox * S - P;
                            for (int kx = 0; kx < K; ++kx) {
                                const int ix = ix0 + kx;
                                if (ix < 0 || ix >= w_in) continue;
                                acc += xp[iy * w_in + ix] * wp[ky * K + kx];
                            }
                            yp[oy * oh + ox] += acc;
                        }
                    }
                }
            }
        }
    }

    void backward(const Vec& x, const Vec& dy, Vec& dx) {
        const int oh = out_hw();
        dx.assign(static_cast<std::size_t>(cin) * h * w_in, 0.0);
        for (int co = 0; co < cout; ++co) {
            const double* dyp = &dy[static_cast<std::size_t>(co) * oh * oh];
            for (int oy = 0; oy < oh; ++oy)
                for (int ox = 0; ox < oh; ++ox)
                    gb[static_cast<std::size_t>(co)] += dyp[oy * oh + ox];
            for (int ci = 0; ci < cin; ++ci) {
                const double* xp = &x[static_cast<std::size_t>(ci) * h * w_in];
                double* dxp = &dx[static_cast<std::size_t>(ci) * h * w_in];
                const std::size_t wbase = ((static_cast<std::size_t>(co) * cin) + ci) * K * K;
                const double* wp = &w[wbase];
                double* gwp = &gw[wbase];
                for (int oy = 0; oy < oh; ++oy) {
                    for (int ky = 0; ky < K; ++ky) {
                        const int iy = oy * S - P + ky;
                        if (iy < 0 || iy >= h) continue;
                        for (int ox = 0; ox < oh; ++ox) {
                            const double g = dyp[oy * oh + ox];
                            if (g == 0.0) continue;
                            const int ix0 = ox * S - P;
                            for (int kx = 0; kx < K; ++kx) {
                                const int ix = ix0 + kx;
                                if (ix < 0 || ix >= w_in) continue;
                                gwp[ky * K + kx] += g * xp[iy * w_in + ix];
                                dxp[iy * w_in + ix] += g * wp[ky * K + kx];
                            }
                        }
                    }
                }
            }
        }
    }
};

// 4x4 kernel, stride 2, pad 1 transposed convolution: doubles each spatial
// dimension.  Forward scatters; backward is the matching gather.
struct ConvT {
    static constexpr int K = 4, S = 2, P = 1;
    int cin = 0, cout = 0, h = 0, w_in = 0; // input geometry
    Vec w, b, gw, gb;                       // w is cin x cout x K x K

    ConvT(int cin_, int cout_, int hw) : cin(cin_), cout(cout_), h(hw), w_in(hw) {
        w.assign(static_cast<std::size_t>(cin) * cout * K * K, 0.0);
        b.assign(static_cast<std::size_t>(cout), 0.0);
        gw.assign(w.size(), 0.0);
        gb.assign(b.size(), 0.0);
    }

    int out_hw() const { return h * S; }

    void forward(const Vec& x, Vec& y) const {
        const int oh = out_hw();
        y.assign(static_cast<std::size_t>(cout) * oh * oh, 0.0);
        for (int co = 0; co < cout; ++co) {
            double* yp = &y[static_cast<std::size_t>(co) * oh * oh];
            const double bias = b[static_cast<std::size_t>(co)];
            for (int i = 0; i < oh * oh; ++i) yp[i] = bias;
        }
        for (int ci = 0; ci < cin; ++ci) {
            const double* xp = &x[static_cast<std::size_t>(ci) * h * w_in];
            for (int co = 0; co < cout; ++co) {
                double* yp = &y[static_cast<std::size_t>(co) * oh * oh];
                const double* wp = &w[((static_cast<std::size_t>(ci) * cout) + co) * K * K];
                for (int iy = 0; iy < h; ++iy) {
                    for (int ky = 0; ky < K; ++ky) {
                        const int oy = iy * S - P + ky;
                        if (oy < 0 || oy >= oh) continue;
                        for (int ix = 0; ix < w_in; ++ix) {
                            const double xv = xp[iy * w_in + ix];
                            if (xv == 0.0) continue;
                            const int ox0 = ix * S - P;
                            for (int kx = 0; kx < K; ++kx) {
                                const int ox = ox0 + kx;
                                if (ox < 0 || ox >= oh) continue;
                                yp[oy * oh + ox] += xv * wp[ky * K + kx];
                            }
                        }
                    }
                }
            }
        }
    }

    void backward(const Vec& x, const Vec& dy, Vec& dx) {
        const int oh = out_hw();
        dx.assign(static_cast<std::size_t>(cin) * h * w_in, 0.0);
        for (int co = 0; co < cout; ++co) {
            const double* dyp = &dy[static_cast<std::size_t>(co) * oh * oh];
            for (int i = 0; i < oh * oh; ++i) gb[static_cast<std::size_t>(co)] += dyp[i];
        }
        for (int ci = 0; ci < cin; ++ci) {
            const double* xp = &x[static_cast<std::size_t>(ci) * h * w_in];
            double* dxp = &dx[static_cast<std::size_t>(ci) * h * w_in];
            for (int co = 0; co < cout; ++co) {
                const double* dyp = &dy[static_cast<std::size_t>(co) * oh * oh];
                const std::size_t wbase = ((static_cast<std::size_t>(ci) * cout) + co) * K * K;
                const double* wp = &w[wbase];
                double* gwp = &gw[wbase];
                for (int iy = 0; iy < h; ++iy) {
                    for (int ky = 0; ky < K; ++ky) {
                        const int oy = iy * S - P + ky;
                        if (oy < 0 || oy >= oh) continue;
                        for (int ix = 0; ix < w_in; ++ix) {
                            double acc = 0.0;
                            const int ox0 = ix * S - P;
                            const double xv = xp[iy * w_in + ix];
                            for (int kx = 0; kx < K; ++kx) {
                                const int ox = ox0 + kx;
                                if (ox < 0 || ox >= oh) continue;
                                const double g = dyp[oy * oh + ox];
                                acc += g * wp[ky * K + kx];
                                gwp[ky * K + kx] += g * xv;
                            }
                            dxp[iy * w_in + ix] += acc;
                        }
                    }
                }
            }
        }
    }
};

inline void relu_inplace(Vec& v) {
    for (double& x : v)
        if (x < 0.0) x = 0.0;
}

inline void lrelu_inplace(Vec& v, double alpha = 0.2) {
    for (double& x : v)
        if (x < 0.0) x *= alpha;
}

inline void tanh_inplace(Vec& v) {
    for (double& x : v) x = std::tanh(x);
}

// gradients through the activations, from stored outputs
inline void relu_mask(const Vec& out, Vec& grad) {
    for (std::size_t i = 0; i < out.size(); ++i)
        if (out[i] <= 0.0) grad[i] = 0.0;
}

inline void lrelu_mask(const Vec& out, Vec& grad, double alpha = 0.2) {
    for (std::size_t i = 0; i < out.size(); ++i)
        if (out[i] < 0.0) grad[i] *= alpha;
}

inline void tanh_mask(const Vec& out, Vec& grad) {
    for (std::size_t i = 0; i < out.size(); ++i) grad[i] *= 1.0 - out[i] * out[i];
}

} // namespace nn

// ---------------------------------------------------------------------------
// networks
// ---------------------------------------------------------------------------

// noise -> dense -> base_hw^2 x channels[0] -> stride-2 transposed
// convolutions through `channels` -> tanh image in [-1, 1].
// channels.back() must be 1.  Output side = base_hw * 2^(stages).
class GeneratorNet {
public:
    GeneratorNet(int noise_dim, int base_hw, std::vector<int> channels)
        : noise_dim_(noise_dim), base_hw_(base_hw), channels_(std::move(channels)),
          dense_(noise_dim, base_hw * base_hw * channels_.front()) {
        int hw = base_hw_;
        for (std::size_t s = 0; s + 1 < channels_.size(); ++s) {
            deconvs_.emplace_back(channels_[s], channels_[s + 1], hw);
            hw *= 2;
        }
        out_hw_ = hw;
    }

    int noise_dim() const { return noise_dim_; }
    int output_hw() const { return out_hw_; }

    struct Cache {
        std::vector<nn::Vec> act; // act[0] = z, act[i] = stage output
    };

    const nn::Vec& forward(const nn::Vec& z, Cache& cache) const {
        cache.act.resize(deconvs_.size() + 2);
        cache.act[0] = z;
        dense_.forward(z, cache.act[1]);
        nn::relu_inplace(cache.act[1]);
        for (std::size_t s = 0; s < deconvs_.size(); ++s) {
            deconvs_[s].forward(cache.act[s + 1], cache.act[s + 2]);
            if (s + 1 < deconvs_.size())
                nn::relu_inplace(cache.act[s + 2]);
            else
                nn::tanh_inplace(cache.act[s + 2]);
        }
        return cache.act.back();
    }

    void backward(Cache& cache, nn::Vec d_out) {
        nn::tanh_mask(cache.act.back(), d_out);
        nn::Vec d_prev;
        for (std::size_t s = deconvs_.size(); s-- > 0;) {
            deconvs_[s].backward(cache.act[s + 1], d_out, d_prev);
            if (s > 0) nn::relu_mask(cache.act[s + 1], d_prev);
            d_out = std::move(d_prev);
        }
        nn::relu_mask(cache.act[1], d_out);
        nn::Vec dz;
        dense_.backward(cache.act[0], d_out, dz);
    }

    std::vector<nn::ParamBlock> params() {
        std::vector<nn::ParamBlock> p{{&dense_.w, &dense_.gw}, {&dense_.b, &dense_.gb}};
        for (auto& d : deconvs_) {
            p.push_back({&d.w, &d.gw});
            p.push_back({&d.b, &d.gb});
        }
        return p;
    }

    void zero_grads() {
        for (auto& blk : params()) std::fill(blk.grad->begin(), blk.grad->end(), 0.0);
    }

    // N(0, 0.02) weights, zero biases
    void init_weights(SplitMix64& rng, double stddev = 0.02) {
        for (double& x : dense_.w) x = stddev * rng.next_gaussian();
        for (auto& d : deconvs_)
            for (double& x : d.w) x = stddev * rng.next_gaussian();
    }

private:
    int noise_dim_;
    int base_hw_;
    int out_hw_ = 0;
    std::vector<int> channels_;
    nn::Dense dense_;
    std::vector<nn::ConvT> deconvs_;
};

// image -> stride-2 convolutions through `channels` (channels[0] must be 1)
// -> dense -> scalar logit.
class DiscriminatorNet {
public:
    DiscriminatorNet(std::vector<int> channels, int input_hw)
        : channels_(std::move(channels)), input_hw_(input_hw),
          dense_(final_flat_size(channels_, input_hw), 1) {
        int hw = input_hw_;
        for (std::size_t s = 0; s + 1 < channels_.size(); ++s) {
            convs_.emplace_back(channels_[s], channels_[s + 1], hw);
            hw /= 2;
        }
    }

    int input_hw() const { return input_hw_; }

    struct Cache {
        std::vector<nn::Vec> act;
    };

    double forward(const nn::Vec& image, Cache& cache) const {
        cache.act.resize(convs_.size() + 1);
        cache.act[0] = image;
        for (std::size_t s = 0; s < convs_.size(); ++s) {
            convs_[s].forward(cache.act[s], cache.act[s + 1]);
            nn::lrelu_inplace(cache.act[s + 1]);
        }
        nn::Vec logit;
        dense_.forward(cache.act.back(), logit);
        return logit[0];
    }

    // returns gradient with respect to the input image
    nn::Vec backward(Cache& cache, double d_logit) {
        nn::Vec d_out;
        dense_.backward(cache.act.back(), nn::Vec{d_logit}, d_out);
        nn::lrelu_mask(cache.act.back(), d_out);
        nn::Vec d_prev;
        for (std::size_t s = convs_.size(); s-- > 0;) {
            convs_[s].backward(cache.act[s], d_out, d_prev);
            if (s > 0) nn::lrelu_mask(cache.act[s], d_prev);
            d_out = std::move(d_prev);
        }
        return d_out;
    }

    std::vector<nn::ParamBlock> params() {
        std::vector<nn::ParamBlock> p;
        for (auto& c : convs_) {
            p.push_back({&c.w, &c.gw});
            p.push_back({&c.b, &c.gb});
        }
        p.push_back({&dense_.w, &dense_.gw});
        p.push_back({&dense_.b, &dense_.gb});
        return p;
    }

    void zero_grads() {
        for (auto& blk : params()) std::fill(blk.grad->begin(), blk.grad->end(), 0.0);
    }

    void init_weights(SplitMix64& rng, double stddev = 0.02) {
        for (auto& c : convs_)
            for (double& x : c.w) x = stddev * rng.next_gaussian();
        for (double& x : dense_.w) x = stddev * rng.next_gaussian();
    }

private:
    static int final_flat_size(const std::vector<int>& channels, int input_hw) {
        int hw = input_hw;
        for (std::size_t s = 0; s + 1 < channels.size(); ++s) hw /= 2;
        return channels.back() * hw * hw;
    }

    std::vector<int> channels_;
    int input_hw_;
    std::vector<nn::Conv> convs_;
    nn::Dense dense_;
};

// ---------------------------------------------------------------------------
// optimizer
// ---------------------------------------------------------------------------

namespace nn {

// Adam with bias correction; beta2/eps fixed at the customary values.
class Adam {
public:
    Adam(double lr, double beta1) : lr_(lr), beta1_(beta1) {}

    void step(std::vector<ParamBlock> blocks) {
        if (m_.empty()) {
            for (const auto& blk : blocks) {
                m_.emplace_back(blk.value->size(), 0.0);
                v_.emplace_back(blk.value->size(), 0.0);
            }
        }
        ++t_;
        const double bc1 = 1.0 - std::pow(beta1_, t_);
        const double bc2 = 1.0 - std::pow(kBeta2, t_);
        for (std::size_t k = 0; k < blocks.size(); ++k) {
            Vec& w = *blocks[k].value;
            Vec& g = *blocks[k].grad;
            Vec& m = m_[k];
            Vec& v = v_[k];
            for (std::size_t i = 0; i < w.size(); ++i) {
                m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
                v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * g[i] * g[i];
                const double mhat = m[i] / bc1;
                const double vhat = v[i] / bc2;
                w[i] -= lr_ * mhat / (std::sqrt(vhat) + kEps);
            }
        }
    }

private:
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEps = 1e-8;
    double lr_;
    double beta1_;
    long t_ = 0;
    std::vector<Vec> m_, v_;
};

} // namespace nn

// ---------------------------------------------------------------------------
// training
// ---------------------------------------------------------------------------

struct GeneratorState {
    GeneratorNet net;
    double image_scale = 1.0; // fingerprint units at model output +1
};

struct DiscriminatorState {
    DiscriminatorNet net;
    double image_scale = 1.0;

    double score(const Mat& image) const {
        nn::Vec x(image.v.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            x[i] = 2.0 * image.v[i] / image_scale - 1.0;
        DiscriminatorNet::Cache cache;
        return net.forward(x, cache);
    }
};

struct TrainResult {
    GeneratorState generator;
    DiscriminatorState discriminator;
    TrainTrace trace;
    std::vector<int> snapshot_epochs;
    std::vector<Mat> snapshot_images; // fingerprint units
    TrainConfig config;
};

// epochs e with e >= epochs - window and (epochs-1-e) % stride == 0,
// ascending; the final epoch is always included.
inline std::vector<int> snapshot_epochs(int epochs, int window, int stride) {
    std::vector<int> out;
    for (int e = epochs - 1; e >= 0 && e >= epochs - window; e -= stride) out.push_back(e);
    std::reverse(out.begin(), out.end());
    return out;
}

namespace detail {

constexpr int kGanBaseHw = 12;
inline const std::vector<int> kGeneratorChannels{32, 16, 8, 1};
inline const std::vector<int> kDiscriminatorChannels{1, 8, 16, 32};

inline Mat to_fingerprint_units(const nn::Vec& model_out, int hw, double scale) {
    Mat img(hw, hw);
    for (std::size_t i = 0; i < img.v.size(); ++i)
        img.v[i] = (model_out[i] + 1.0) * 0.5 * scale;
    return img;
}

} // namespace detail

inline TrainResult train(const std::vector<Mat>& pool_images, TrainConfig cfg) {
    cfg.validate();
    if (pool_images.empty()) throw std::invalid_argument("train: empty pool");
    for (const auto& img : pool_images)
        if (img.rows != kFingerprintSize || img.cols != kFingerprintSize)
            throw std::invalid_argument("train: pool images must be 96x96");

    const int pool_n = static_cast<int>(pool_images.size());
    const int batch = cfg.batch_size > 0 ? std::min(cfg.batch_size, pool_n) : pool_n;

    // affine map [0, pool max] -> [-1, 1]
    double scale = 0.0;
    for (const auto& img : pool_images)
        for (double v : img.v) scale = std::max(scale, v);
    if (scale <= 0.0) scale = 1.0;

    std::vector<nn::Vec> reals(pool_images.size());
    for (std::size_t k = 0; k < pool_images.size(); ++k) {
        reals[k].resize(pool_images[k].v.size());
        for (std::size_t i = 0; i < reals[k].size(); ++i)
            reals[k][i] = 2.0 * pool_images[k].v[i] / scale - 1.0;
    }

    SplitMix64 rng(derive_seed(cfg.seed, 0x67616eULL)); // "gan"

    GeneratorNet gen(cfg.noise_dim, detail::kGanBaseHw, detail::kGeneratorChannels);
    DiscriminatorNet dis(detail::kDiscriminatorChannels, kFingerprintSize);
    gen.init_weights(rng);
    dis.init_weights(rng);

    nn::Vec eval_noise(static_cast<std::size_t>(cfg.noise_dim));
    for (double& z : eval_noise) z = rng.next_gaussian();

    nn::Adam opt_g(cfg.learning_rate, cfg.momentum_decay_1);
    nn::Adam opt_d(cfg.learning_rate, cfg.momentum_decay_1);

    const std::vector<int> snaps = snapshot_epochs(cfg.epochs, cfg.snapshot_window,
                                                   cfg.snapshot_stride);
    std::size_t next_snap = 0;

    TrainResult result{{std::move(gen), scale}, {std::move(dis), scale}, {}, snaps, {}, cfg};
    GeneratorNet& g = result.generator.net;
    DiscriminatorNet& d = result.discriminator.net;
    result.trace.generator_loss.reserve(static_cast<std::size_t>(cfg.epochs));
    result.trace.discriminator_loss.reserve(static_cast<std::size_t>(cfg.epochs));

    GeneratorNet::Cache gcache;
    DiscriminatorNet::Cache dcache;
    nn::Vec z(static_cast<std::size_t>(cfg.noise_dim));
    std::vector<std::size_t> order(reals.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        // batch selection: seeded partial shuffle when batch < pool
        if (batch < pool_n)
            for (int i = 0; i < batch; ++i)
                std::swap(order[static_cast<std::size_t>(i)],
                          order[static_cast<std::size_t>(i) +
                                static_cast<std::size_t>(rng.next_below(
                                    static_cast<std::uint64_t>(pool_n - i)))]);

        // --- discriminator step ---
        d.zero_grads();
        double d_loss = 0.0;
        for (int k = 0; k < batch; ++k) {
            const double logit = d.forward(reals[order[static_cast<std::size_t>(k)]], dcache);
            d_loss += nn::softplus(-logit) / batch;
            d.backward(dcache, (nn::sigmoid(logit) - 1.0) / batch);
        }
        for (int k = 0; k < batch; ++k) {
            for (double& zi : z) zi = rng.next_gaussian();
            const nn::Vec& fake = g.forward(z, gcache);
            const double logit = d.forward(fake, dcache);
            d_loss += nn::softplus(logit) / batch;
            d.backward(dcache, nn::sigmoid(logit) / batch);
        }
        opt_d.step(d.params());

        // --- generator step (non-saturating) ---
        g.zero_grads();
        double g_loss = 0.0;
        for (int k = 0; k < batch; ++k) {
            for (double& zi : z) zi = rng.next_gaussian();
            const nn::Vec& fake = g.forward(z, gcache);
            const double logit = d.forward(fake, dcache);
            g_loss += nn::softplus(-logit) / batch;
            nn::Vec d_img = d.backward(dcache, (nn::sigmoid(logit) - 1.0) / batch);
            g.backward(gcache, std::move(d_img));
        }
        opt_g.step(g.params());

        if (!std::isfinite(d_loss) || !std::isfinite(g_loss))
            throw TrainingDivergence("non-finite loss at epoch " + std::to_string(epoch));
        result.trace.discriminator_loss.push_back(d_loss);
        result.trace.generator_loss.push_back(g_loss);

        if (next_snap < snaps.size() && epoch == snaps[next_snap]) {
            const nn::Vec& img = g.forward(eval_noise, gcache);
            result.snapshot_images.push_back(
                detail::to_fingerprint_units(img, kFingerprintSize, scale));
            ++next_snap;
        }
    }
    return result;
}

inline TrainResult train(const SamplePool& pool, const TrainConfig& cfg) {
    std::vector<Mat> images;
    images.reserve(pool.members.size());
    for (const auto& m : pool.members) images.push_back(m.fingerprint.cells);
    return train(images, cfg);
}

inline Mat generate(const GeneratorState& state, std::uint64_t noise_seed) {
    SplitMix64 rng(derive_seed(noise_seed, 0x6e6f697365ULL)); // "noise"
    nn::Vec z(static_cast<std::size_t>(state.net.noise_dim()));
    for (double& zi : z) zi = rng.next_gaussian();
    GeneratorNet::Cache cache;
    const nn::Vec& out = state.net.forward(z, cache);
    return detail::to_fingerprint_units(out, state.net.output_hw(), state.image_scale);
}

inline FakeImageSet collect_fakes(const TrainResult& run, const TrainConfig& cfg) {
    if (cfg.epochs < cfg.snapshot_window)
        throw std::invalid_argument("collect_fakes: epochs (" + std::to_string(cfg.epochs) +
                                    ") < snapshot_window (" +
                                    std::to_string(cfg.snapshot_window) + ")");
    FakeImageSet set;
    set.seed = cfg.seed;
    set.source_epochs = run.snapshot_epochs;
    set.images = run.snapshot_images;
    const std::size_t expected =
        static_cast<std::size_t>(cfg.snapshot_window / cfg.snapshot_stride);
    if (set.images.size() != expected)
        throw std::logic_error("collect_fakes: expected " + std::to_string(expected) +
                               " snapshots, run holds " + std::to_string(set.images.size()));
    return set;
}

} // namespace finprint
