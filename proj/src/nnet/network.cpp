#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

#include "c2lab/error.hpp"
#include "c2lab/nnet.hpp"

namespace c2lab {

void HyperParams::validate() const {
  if (embedding == 0) throw Error(ErrorKind::InvalidInput, "embedding size must be positive");
  if (hidden_width() == 0) throw Error(ErrorKind::InvalidInput, "hidden width must be positive");
}

namespace {

AffineBlock affine(std::size_t& cursor, std::size_t rows, std::size_t cols) {
  AffineBlock b{cursor, cursor + rows * cols, rows, cols};
  cursor += rows * cols + rows;
  return b;
}

MlpBlock mlp(std::size_t& cursor, std::size_t in, std::size_t hidden, std::size_t out) {
  MlpBlock m;
  m.first = affine(cursor, hidden, in);
  m.second = affine(cursor, out, hidden);
  return m;
}

std::size_t message_width(std::size_t arity, std::size_t embedding) { return std::max<std::size_t>(arity, 1) * embedding; }

// y = W x + b
void apply(const double* p, const AffineBlock& b, const double* x, double* y) {
  const double* w = p + b.weight;
  const double* bias = p + b.bias;
  for (std::size_t r = 0; r < b.rows; ++r) {
    const double* row = w + r * b.cols;
    // four partial sums keep the loop free of a serial dependency
    double acc[4] = {0, 0, 0, 0};
    std::size_t c = 0;
    for (; c + 4 <= b.cols; c += 4) {
      acc[0] += row[c] * x[c];
      acc[1] += row[c + 1] * x[c + 1];
      acc[2] += row[c + 2] * x[c + 2];
      acc[3] += row[c + 3] * x[c + 3];
    }
    for (; c < b.cols; ++c) acc[0] += row[c] * x[c];
    y[r] = bias[r] + ((acc[0] + acc[1]) + (acc[2] + acc[3]));
  }
}

// Accumulates dW += dy xᵀ, db += dy and writes dx = Wᵀ dy (when dx is given).
void apply_backward(const double* p, double* g, const AffineBlock& b, const double* x, const double* dy, double* dx) {
  double* gw = g + b.weight;
  double* gb = g + b.bias;
  const double* w = p + b.weight;
  if (dx) std::fill(dx, dx + b.cols, 0.0);
  for (std::size_t r = 0; r < b.rows; ++r) {
    const double d = dy[r];
    gb[r] += d;
    if (d == 0.0) continue;
    double* grow = gw + r * b.cols;
    const double* row = w + r * b.cols;
    for (std::size_t c = 0; c < b.cols; ++c) grow[c] += d * x[c];
    if (dx) {
      for (std::size_t c = 0; c < b.cols; ++c) dx[c] += d * row[c];
    }
  }
}

struct IndexedAtom {
  std::size_t predicate;
  std::vector<std::size_t> args;
};

struct NetInput {
  std::size_t objects = 0;
  std::vector<IndexedAtom> atoms;
};

NetInput index_input(const NetParams& params, const RelationalStructure& structure) {
  if (!(structure.language() == params.language)) {
    throw Error(ErrorKind::ShapeMismatch, "structure language does not match the network's predicate set");
  }
  std::unordered_map<std::string, std::size_t> pred;
  for (std::size_t i = 0; i < params.language.predicates.size(); ++i) pred[params.language.predicates[i].name] = i;
  std::unordered_map<std::string, std::size_t> object;
  for (std::size_t i = 0; i < structure.constants().size(); ++i) object[structure.constants()[i]] = i;

  NetInput in;
  in.objects = structure.constants().size();
  for (const auto& atom : structure.atoms()) {
    IndexedAtom a{pred.at(atom.predicate), {}};
    for (const auto& arg : atom.args) a.args.push_back(object.at(arg));
    in.atoms.push_back(std::move(a));
  }
  return in;
}

// Activations kept for the backward pass.
struct Trace {
  std::vector<std::vector<double>> embeddings;   // per layer boundary: objects × E
  std::vector<std::vector<double>> message_pre;  // per layer: concatenated hidden pre-activations of atoms
  std::vector<std::vector<double>> update_pre;   // per layer: objects × hidden
  std::vector<std::vector<double>> aggregate;    // per layer: objects × E
  double output = 0;
};

class Network {
 public:
  Network(const NetParams& params, const NetInput& input)
      : p_(params.values.data()),
        layout_(params.layout),
        embedding_(params.hyper.embedding),
        hidden_(params.hyper.hidden_width()),
        layers_(params.hyper.layers),
        residual_(params.hyper.residual),
        input_(input) {}

  Trace run() const {
    const std::size_t n = input_.objects, E = embedding_, Hd = hidden_;
    Trace trace;
    trace.embeddings.emplace_back(n * E, 0.0);
    std::vector<double> x, hid(Hd), act(Hd), msg, u_in(2 * E), delta(E);

    for (std::size_t l = 0; l < layers_; ++l) {
      const std::vector<double>& h = trace.embeddings.back();
      std::vector<double> agg(n * E, 0.0);
      std::vector<double> pre;
      pre.reserve(input_.atoms.size() * Hd);
      for (const auto& atom : input_.atoms) {
        const MlpBlock& m = layout_.message[atom.predicate];
        gather(h, atom, x);
        apply(p_, m.first, x.data(), hid.data());
        pre.insert(pre.end(), hid.begin(), hid.end());
        for (std::size_t i = 0; i < Hd; ++i) act[i] = hid[i] > 0 ? hid[i] : 0.0;
        msg.assign(m.second.rows, 0.0);
        apply(p_, m.second, act.data(), msg.data());
        scatter(msg, atom, agg);
      }

      std::vector<double> next(n * E), upre(n * Hd);
      for (std::size_t o = 0; o < n; ++o) {
        std::copy_n(h.begin() + o * E, E, u_in.begin());
        std::copy_n(agg.begin() + o * E, E, u_in.begin() + E);
        apply(p_, layout_.update.first, u_in.data(), upre.data() + o * Hd);
        for (std::size_t i = 0; i < Hd; ++i) act[i] = std::max(upre[o * Hd + i], 0.0);
        apply(p_, layout_.update.second, act.data(), delta.data());
        for (std::size_t e = 0; e < E; ++e) next[o * E + e] = (residual_ ? h[o * E + e] : 0.0) + delta[e];
      }
      trace.message_pre.push_back(std::move(pre));
      trace.update_pre.push_back(std::move(upre));
      trace.aggregate.push_back(std::move(agg));
      trace.embeddings.push_back(std::move(next));
    }

    std::vector<double> pooled(E, 0.0);
    const auto& last = trace.embeddings.back();
    for (std::size_t o = 0; o < n; ++o) {
      for (std::size_t e = 0; e < E; ++e) pooled[e] += last[o * E + e];
    }
    double y = 0;
    apply(p_, layout_.readout, pooled.data(), &y);
    trace.output = y;
    return trace;
  }

  // Adds d(output)/dθ · dy into g.
  void backward(const Trace& trace, double dy, double* g) const {
    const std::size_t n = input_.objects, E = embedding_, Hd = hidden_;
    std::vector<double> pooled(E, 0.0);
    const auto& last = trace.embeddings.back();
    for (std::size_t o = 0; o < n; ++o) {
      for (std::size_t e = 0; e < E; ++e) pooled[e] += last[o * E + e];
    }
    std::vector<double> dpooled(E);
    apply_backward(p_, g, layout_.readout, pooled.data(), &dy, dpooled.data());

    std::vector<double> dh(n * E);
    for (std::size_t o = 0; o < n; ++o) std::copy(dpooled.begin(), dpooled.end(), dh.begin() + o * E);

    std::vector<double> act(Hd), dact(Hd), u_in(2 * E), du_in(2 * E), x, dx, dmsg;
    for (std::size_t l = layers_; l-- > 0;) {
      const std::vector<double>& h = trace.embeddings[l];
      const std::vector<double>& agg = trace.aggregate[l];
      const std::vector<double>& upre = trace.update_pre[l];
      std::vector<double> dprev(n * E, 0.0), dagg(n * E, 0.0);

      for (std::size_t o = 0; o < n; ++o) {
        const double* dnext = dh.data() + o * E;
        if (residual_) {
          for (std::size_t e = 0; e < E; ++e) dprev[o * E + e] += dnext[e];
        }
        for (std::size_t i = 0; i < Hd; ++i) act[i] = std::max(upre[o * Hd + i], 0.0);
        apply_backward(p_, g, layout_.update.second, act.data(), dnext, dact.data());
        for (std::size_t i = 0; i < Hd; ++i) dact[i] = upre[o * Hd + i] > 0 ? dact[i] : 0.0;
        std::copy_n(h.begin() + o * E, E, u_in.begin());
        std::copy_n(agg.begin() + o * E, E, u_in.begin() + E);
        apply_backward(p_, g, layout_.update.first, u_in.data(), dact.data(), du_in.data());
        for (std::size_t e = 0; e < E; ++e) {
          dprev[o * E + e] += du_in[e];
          dagg[o * E + e] = du_in[E + e];
        }
      }

      const std::vector<double>& pre = trace.message_pre[l];
      for (std::size_t a = 0; a < input_.atoms.size(); ++a) {
        const auto& atom = input_.atoms[a];
        const MlpBlock& m = layout_.message[atom.predicate];
        gather_grad(dagg, atom, dmsg);
        const double* z = pre.data() + a * Hd;
        for (std::size_t i = 0; i < Hd; ++i) act[i] = z[i] > 0 ? z[i] : 0.0;
        apply_backward(p_, g, m.second, act.data(), dmsg.data(), dact.data());
        for (std::size_t i = 0; i < Hd; ++i) dact[i] = z[i] > 0 ? dact[i] : 0.0;
        gather(h, atom, x);
        dx.assign(x.size(), 0.0);
        apply_backward(p_, g, m.first, x.data(), dact.data(), x.empty() ? nullptr : dx.data());
        for (std::size_t j = 0; j < atom.args.size(); ++j) {
          for (std::size_t e = 0; e < E; ++e) dprev[atom.args[j] * E + e] += dx[j * E + e];
        }
      }
      dh = std::move(dprev);
    }
  }

 private:
  void gather(const std::vector<double>& h, const IndexedAtom& atom, std::vector<double>& x) const {
    x.resize(atom.args.size() * embedding_);
    for (std::size_t j = 0; j < atom.args.size(); ++j) {
      std::copy_n(h.begin() + atom.args[j] * embedding_, embedding_, x.begin() + j * embedding_);
    }
  }

  void scatter(const std::vector<double>& msg, const IndexedAtom& atom, std::vector<double>& agg) const {
    const std::size_t E = embedding_;
    if (atom.args.empty()) {
      for (std::size_t o = 0; o < input_.objects; ++o) {
        for (std::size_t e = 0; e < E; ++e) agg[o * E + e] += msg[e];
      }
      return;
    }
    for (std::size_t j = 0; j < atom.args.size(); ++j) {
      for (std::size_t e = 0; e < E; ++e) agg[atom.args[j] * E + e] += msg[j * E + e];
    }
  }

  void gather_grad(const std::vector<double>& dagg, const IndexedAtom& atom, std::vector<double>& dmsg) const {
    const std::size_t E = embedding_;
    if (atom.args.empty()) {
      dmsg.assign(E, 0.0);
      for (std::size_t o = 0; o < input_.objects; ++o) {
        for (std::size_t e = 0; e < E; ++e) dmsg[e] += dagg[o * E + e];
      }
      return;
    }
    dmsg.resize(atom.args.size() * E);
    for (std::size_t j = 0; j < atom.args.size(); ++j) {
      std::copy_n(dagg.begin() + atom.args[j] * E, E, dmsg.begin() + j * E);
    }
  }

  const double* p_;
  const NetLayout& layout_;
  std::size_t embedding_, hidden_, layers_;
  bool residual_;
  const NetInput& input_;
};

}  // namespace

NetLayout NetLayout::build(const HyperParams& hyper, const RelationalLanguage& language) {
  hyper.validate();
  NetLayout layout;
  std::size_t cursor = 0;
  const std::size_t E = hyper.embedding, Hd = hyper.hidden_width();
  for (const auto& p : language.predicates) {
    layout.message.push_back(mlp(cursor, p.arity * E, Hd, message_width(p.arity, E)));
  }
  layout.update = mlp(cursor, 2 * E, Hd, E);
  layout.readout = affine(cursor, 1, E);
  layout.size = cursor;
  return layout;
}

NetParams init_params(const HyperParams& hyper, const RelationalLanguage& language, std::uint64_t seed) {
  NetParams params{hyper, language, seed, NetLayout::build(hyper, language), {}};
  params.values.resize(params.layout.size);
  std::mt19937_64 rng(seed);
  // 53 random bits -> [0, 1); spelled out so draws do not depend on the
  // standard library's distribution implementation
  auto uniform = [&](double bound) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return (2.0 * u - 1.0) * bound;
  };
  auto fill = [&](const AffineBlock& b) {
    const double bound = std::sqrt(1.0 / static_cast<double>(std::max<std::size_t>(b.cols, 1)));
    for (std::size_t i = 0; i < b.rows * b.cols; ++i) params.values[b.weight + i] = uniform(bound);
    for (std::size_t i = 0; i < b.rows; ++i) params.values[b.bias + i] = uniform(bound);
  };
  for (const auto& m : params.layout.message) {
    fill(m.first);
    fill(m.second);
  }
  fill(params.layout.update.first);
  fill(params.layout.update.second);
  fill(params.layout.readout);
  return params;
}

double forward(const NetParams& params, const RelationalStructure& structure) {
  const NetInput input = index_input(params, structure);
  return Network(params, input).run().output;
}

std::vector<double> object_embeddings(const NetParams& params, const RelationalStructure& structure) {
  const NetInput input = index_input(params, structure);
  return Network(params, input).run().embeddings.back();
}

double squared_error_gradient(const NetParams& params, const RelationalStructure& structure, double target,
                              std::span<double> gradient, double scale) {
  if (gradient.size() != params.values.size()) {
    throw Error(ErrorKind::ShapeMismatch, "gradient buffer does not match the parameter count");
  }
  const NetInput input = index_input(params, structure);
  Network net(params, input);
  const Trace trace = net.run();
  const double residual = trace.output - target;
  net.backward(trace, 2.0 * residual * scale, gradient.data());
  return residual * residual;
}

double relative_difference(double out1, double out2) {
  const double denom = std::max(std::abs(out1), std::abs(out2));
  if (denom == 0.0) return 0.0;
  return std::abs(out1 - out2) / denom;
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_id) {
  // splitmix64 finaliser over a Weyl sequence step
  std::uint64_t z = master_seed + 0x9E3779B97F4A7C15ULL * (trial_id + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace c2lab
