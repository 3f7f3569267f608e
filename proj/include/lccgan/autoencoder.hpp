#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lccgan/adam.hpp"
#include "lccgan/checkpoint.hpp"
#include "lccgan/dataset.hpp"
#include "lccgan/network.hpp"

namespace lccgan {

// encoder: d -> d_B, decoder: d_B -> d.
struct AutoEncoder {
  NetworkParams encoder;
  NetworkParams decoder;

  Index latent_dim() const { return encoder.out_dim(); }
  Index data_dim() const { return encoder.in_dim(); }
  void validate() const;
};

struct AeOptions {
  Index latent_dim = 8;
  int epochs = 50;
  Index batch_size = 64;
  std::vector<Index> hidden{64, 64};
  AdamOptions adam{1e-3, 0.9, 0.999, 1e-8};
  std::uint64_t seed = 0;
};

struct AeTrainResult {
  AutoEncoder ae;
  std::vector<double> epoch_losses;  // full-data MSE after each epoch
  std::vector<std::string> warnings;
};

/// Architecture used by train_ae: tanh hidden layers, tanh latent, identity output.
AutoEncoder init_autoencoder(Index data_dim, const AeOptions& opt);

AeTrainResult train_ae(const Dataset& ds, const AeOptions& opt);

/// Row i is Encoder(x_i).
Matrix embed(const AutoEncoder& ae, const Matrix& x);
Matrix embed(const AutoEncoder& ae, const Dataset& ds);
Matrix decode(const AutoEncoder& ae, const Matrix& h);
double reconstruction_mse(const AutoEncoder& ae, const Matrix& x);

Json autoencoder_to_json(const AutoEncoder& ae);
AutoEncoder autoencoder_from_json(const Json& j);

}  // namespace lccgan
