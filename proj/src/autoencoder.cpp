#include "lccgan/autoencoder.hpp"

#include "lccgan/error.hpp"

namespace lccgan {

void AutoEncoder::validate() const {
  encoder.validate();
  decoder.validate();
  if (encoder.out_dim() != decoder.in_dim())
    throw DimensionError("autoencoder latent extents disagree");
  if (decoder.out_dim() != encoder.in_dim())
    throw DimensionError("decoder output does not match encoder input");
}

AutoEncoder init_autoencoder(Index data_dim, const AeOptions& opt) {
  Rng rng(opt.seed);
  std::vector<Index> rev(opt.hidden.rbegin(), opt.hidden.rend());
  AutoEncoder ae;
  ae.encoder = he_init(mlp_dims(data_dim, opt.hidden, opt.latent_dim), Activation::tanh,
                       Activation::tanh, rng);
  ae.decoder = he_init(mlp_dims(opt.latent_dim, rev, data_dim), Activation::tanh,
                       Activation::identity, rng);
  return ae;
}

AeTrainResult train_ae(const Dataset& ds, const AeOptions& opt) {
  ds.validate();
  if (opt.latent_dim < 1) throw ConfigError("latent_dim must be >= 1");
  if (opt.epochs < 1) throw ConfigError("epochs must be >= 1");
  if (opt.batch_size < 1) throw ConfigError("batch_size must be >= 1");

  AeTrainResult result;
  if (opt.latent_dim > ds.dim())
    result.warnings.push_back("latent_dim " + std::to_string(opt.latent_dim) +
                              " exceeds data dimension " + std::to_string(ds.dim()) +
                              ": the autoencoder expands rather than compresses");

  result.ae = init_autoencoder(ds.dim(), opt);
  auto& ae = result.ae;
  AdamState enc_state = AdamState::for_params(ae.encoder, opt.adam);
  AdamState dec_state = AdamState::for_params(ae.decoder, opt.adam);
  Rng rng = Rng(opt.seed).derive(1);

  const Index n = ds.size();
  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    const auto order = rng.permutation(n);
    for (Index start = 0; start < n; start += opt.batch_size) {
      const Index len = std::min(opt.batch_size, n - start);
      Matrix batch(len, ds.dim());
      for (Index i = 0; i < len; ++i)
        batch.row(i) = ds.samples.row(order[static_cast<std::size_t>(start + i)]);

      Tape tape;
      const BoundNetwork enc = bind(tape, ae.encoder);
      const BoundNetwork dec = bind(tape, ae.decoder);
      const Tensor x = tape.constant(batch);
      const Tensor recon = forward(ae.decoder, dec, forward(ae.encoder, enc, x));
      const Tensor loss = mean(square(sub(recon, x)));
      const Gradients g = tape.backward(loss);
      adam_step(ae.encoder, gradients_of(g, enc, ae.encoder), enc_state);
      adam_step(ae.decoder, gradients_of(g, dec, ae.decoder), dec_state);
    }
    result.epoch_losses.push_back(reconstruction_mse(ae, ds.samples));
  }
  return result;
}

Matrix embed(const AutoEncoder& ae, const Matrix& x) {
  if (x.cols() != ae.encoder.in_dim())
    throw DimensionError("embed: data has " + std::to_string(x.cols()) +
                         " features, encoder expects " + std::to_string(ae.encoder.in_dim()));
  return forward(ae.encoder, x);
}

Matrix embed(const AutoEncoder& ae, const Dataset& ds) { return embed(ae, ds.samples); }

Matrix decode(const AutoEncoder& ae, const Matrix& h) { return forward(ae.decoder, h); }

double reconstruction_mse(const AutoEncoder& ae, const Matrix& x) {
  const Matrix r = decode(ae, embed(ae, x));
  return (r - x).squaredNorm() / static_cast<double>(x.size());
}

Json autoencoder_to_json(const AutoEncoder& ae) {
  return {{"kind", "autoencoder"},
          {"latent_dim", ae.latent_dim()},
          {"encoder", network_to_json(ae.encoder)},
          {"decoder", network_to_json(ae.decoder)}};
}

AutoEncoder autoencoder_from_json(const Json& j) {
  AutoEncoder ae;
  try {
    ae.encoder = network_from_json(j.at("encoder"));
    ae.decoder = network_from_json(j.at("decoder"));
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed autoencoder checkpoint: ") + e.what());
  }
  try {
    ae.validate();
  } catch (const DimensionError& e) {
    throw FormatError(e.what());
  }
  return ae;
}

}  // namespace lccgan
