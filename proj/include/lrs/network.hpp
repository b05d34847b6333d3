#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "lrs/activation.hpp"
#include "lrs/errors.hpp"
#include "lrs/matrix.hpp"
#include "lrs/rng.hpp"

namespace lrs {

/// Fully connected net mapping the n(n+1)/2 entries of h(Sigma) to the
/// n*k entries of the factor M. `hidden` holds the m hidden widths;
/// m = 0 means a single affine map.
struct Architecture {
  int n = 0;
  int k = 0;
  std::vector<int> hidden;
  Activation activation = Activation::Tanh;

  int depth() const { return static_cast<int>(hidden.size()); }
  int input_dim() const { return n * (n + 1) / 2; }
  int output_dim() const { return n * k; }

  /// l_0, l_1, ..., l_{m+1}.
  std::vector<int> layer_dims() const {
    std::vector<int> d;
    d.push_back(input_dim());
    for (int h : hidden) d.push_back(h);
    d.push_back(output_dim());
    return d;
  }

  long param_count() const {
    const auto d = layer_dims();
    long total = 0;
    for (std::size_t u = 0; u + 1 < d.size(); ++u)
      total += static_cast<long>(d[u]) * d[u + 1] + d[u + 1];
    return total;
  }

  void validate() const {
    if (n < 1 || k < 1 || k > n)
      throw ConfigError("Architecture: need 1 <= k <= n, got n=" + std::to_string(n) +
                        " k=" + std::to_string(k));
    for (int h : hidden)
      if (h < 1) throw ConfigError("Architecture: hidden widths must be positive");
  }
};

struct Layer {
  DenseMatrix weights;       // l_{u+1} x l_u
  std::vector<double> bias;  // l_{u+1}
};

/// Theta = (A^(0), b^(0), ..., A^(m), b^(m)).
struct NetParams {
  std::vector<Layer> layers;
};

// ---- parameter-space arithmetic (the block norm of the paper is the
// Euclidean norm of the flattened coefficient list) ------------------------

inline NetParams zeros_like(const NetParams& p) {
  NetParams z;
  z.layers.reserve(p.layers.size());
  for (const auto& l : p.layers) {
    Layer zl;
    zl.weights = DenseMatrix(l.weights.rows(), l.weights.cols());
    zl.bias.assign(l.bias.size(), 0.0);
    z.layers.push_back(std::move(zl));
  }
  return z;
}

/// dst += c * src
inline void add_scaled(NetParams& dst, const NetParams& src, double c) {
  for (std::size_t u = 0; u < dst.layers.size(); ++u) {
    auto& dw = dst.layers[u].weights.data();
    const auto& sw = src.layers[u].weights.data();
    for (std::size_t t = 0; t < dw.size(); ++t) dw[t] += c * sw[t];
    for (std::size_t t = 0; t < dst.layers[u].bias.size(); ++t)
      dst.layers[u].bias[t] += c * src.layers[u].bias[t];
  }
}

inline void scale_params(NetParams& p, double c) {
  for (auto& l : p.layers) {
    for (auto& w : l.weights.data()) w *= c;
    for (auto& b : l.bias) b *= c;
  }
}

inline double param_dot(const NetParams& a, const NetParams& b) {
  double acc = 0.0;
  for (std::size_t u = 0; u < a.layers.size(); ++u) {
    const auto& aw = a.layers[u].weights.data();
    const auto& bw = b.layers[u].weights.data();
    for (std::size_t t = 0; t < aw.size(); ++t) acc += aw[t] * bw[t];
    for (std::size_t t = 0; t < a.layers[u].bias.size(); ++t)
      acc += a.layers[u].bias[t] * b.layers[u].bias[t];
  }
  return acc;
}

inline double param_norm(const NetParams& p) { return std::sqrt(param_dot(p, p)); }

inline std::vector<double> flatten_params(const NetParams& p) {
  std::vector<double> flat;
  for (const auto& l : p.layers) {
    flat.insert(flat.end(), l.weights.data().begin(), l.weights.data().end());
    flat.insert(flat.end(), l.bias.begin(), l.bias.end());
  }
  return flat;
}

inline NetParams unflatten_params(const Architecture& arch, const std::vector<double>& flat) {
  const auto dims = arch.layer_dims();
  NetParams p;
  std::size_t pos = 0;
  for (std::size_t u = 0; u + 1 < dims.size(); ++u) {
    Layer l;
    l.weights = DenseMatrix(dims[u + 1], dims[u]);
    const std::size_t wcount = l.weights.data().size();
    if (pos + wcount + dims[u + 1] > flat.size())
      throw DimensionError("unflatten_params: flat vector too short");
    std::copy(flat.begin() + pos, flat.begin() + pos + wcount, l.weights.data().begin());
    pos += wcount;
    l.bias.assign(flat.begin() + pos, flat.begin() + pos + dims[u + 1]);
    pos += dims[u + 1];
    p.layers.push_back(std::move(l));
  }
  if (pos != flat.size()) throw DimensionError("unflatten_params: flat vector too long");
  return p;
}

inline void check_shapes(const Architecture& arch, const NetParams& p) {
  const auto dims = arch.layer_dims();
  if (p.layers.size() != dims.size() - 1)
    throw DimensionError("NetParams: expected " + std::to_string(dims.size() - 1) +
                         " layers, got " + std::to_string(p.layers.size()));
  for (std::size_t u = 0; u + 1 < dims.size(); ++u) {
    const auto& l = p.layers[u];
    if (l.weights.rows() != dims[u + 1] || l.weights.cols() != dims[u] ||
        l.bias.size() != static_cast<std::size_t>(dims[u + 1]))
      throw DimensionError("NetParams: layer " + std::to_string(u) + " has shape " +
                           std::to_string(l.weights.rows()) + "x" +
                           std::to_string(l.weights.cols()) + ", expected " +
                           std::to_string(dims[u + 1]) + "x" + std::to_string(dims[u]));
  }
}

// ---- forward pass ---------------------------------------------------------

/// Pre-activations Z^(u) and post-activations Y^(u) for each hidden layer,
/// plus the affine output X.
struct ForwardCache {
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> post;
  std::vector<double> output;
};

inline ForwardCache forward(const Architecture& arch, const NetParams& p,
                            const std::vector<double>& x) {
  check_shapes(arch, p);
  if (x.size() != static_cast<std::size_t>(arch.input_dim()))
    throw DimensionError("forward: input length " + std::to_string(x.size()) +
                         " does not match l_0=" + std::to_string(arch.input_dim()));
  ForwardCache fc;
  const int m = arch.depth();
  fc.pre.resize(m);
  fc.post.resize(m);
  const std::vector<double>* cur = &x;
  for (int u = 0; u < m; ++u) {
    fc.pre[u] = matvec(p.layers[u].weights, *cur);
    for (std::size_t t = 0; t < fc.pre[u].size(); ++t) fc.pre[u][t] += p.layers[u].bias[t];
    fc.post[u].resize(fc.pre[u].size());
    for (std::size_t t = 0; t < fc.pre[u].size(); ++t)
      fc.post[u][t] = activation_eval(arch.activation, fc.pre[u][t]).value;
    cur = &fc.post[u];
  }
  fc.output = matvec(p.layers[m].weights, *cur);
  for (std::size_t t = 0; t < fc.output.size(); ++t) fc.output[t] += p.layers[m].bias[t];
  return fc;
}

// ---- initialization --------------------------------------------------------

enum class InitScheme { Zeros, UniformFanIn };

inline std::string to_string(InitScheme s) {
  return s == InitScheme::Zeros ? "zeros" : "uniform-fanin";
}

inline InitScheme parse_init_scheme(const std::string& name) {
  if (name == "zeros") return InitScheme::Zeros;
  if (name == "uniform-fanin") return InitScheme::UniformFanIn;
  throw ConfigError("unknown init scheme '" + name + "' (valid: zeros, uniform-fanin)");
}

/// Deterministic per seed. uniform-fanin draws each weight of layer u
/// uniformly from [-sqrt(6/(l_u + l_{u+1})), +sqrt(6/(l_u + l_{u+1}))],
/// row-major, biases zero.
inline NetParams init_params(const Architecture& arch, std::uint64_t seed, InitScheme scheme) {
  arch.validate();
  const auto dims = arch.layer_dims();
  Rng rng(seed);
  NetParams p;
  for (std::size_t u = 0; u + 1 < dims.size(); ++u) {
    Layer l;
    l.weights = DenseMatrix(dims[u + 1], dims[u]);
    l.bias.assign(dims[u + 1], 0.0);
    if (scheme == InitScheme::UniformFanIn) {
      const double bound = std::sqrt(6.0 / (static_cast<double>(dims[u]) + dims[u + 1]));
      for (auto& w : l.weights.data()) w = rng.next_uniform(-bound, bound);
    }
    p.layers.push_back(std::move(l));
  }
  return p;
}

}  // namespace lrs
