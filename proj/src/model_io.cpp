// Copyright 2026 The fnsup Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fnsup/model_io.hpp"

#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace fnsup {

namespace {

template <typename T>
void put(std::string& out, T v) {
  unsigned char buf[sizeof(T)];
  std::uint64_t bits = 0;
  if constexpr (std::is_same_v<T, double>) {
    std::memcpy(&bits, &v, sizeof v);
  } else {
    bits = static_cast<std::uint64_t>(v);
  }
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.append(reinterpret_cast<const char*>(buf), sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::string& b) : b_(b) {}

  template <typename T>
  T get(const char* what) {
    if (b_.size() - pos_ < sizeof(T)) {
      throw CorruptHeader(pos_, std::string("model file truncated while reading ") + what);
    }
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(b_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    if constexpr (std::is_same_v<T, double>) {
      double d;
      std::memcpy(&d, &bits, sizeof d);
      return d;
    } else {
      return static_cast<T>(bits);
    }
  }

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return b_.size() - pos_; }

 private:
  const std::string& b_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string model_serialize(const Model& model) {
  std::string out = "FNSM";
  put<std::uint32_t>(out, kModelFormatVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(model.kind()));
  if (const auto* sd = dynamic_cast<const SpectralDiagonalModel*>(&model)) {
    put<std::uint64_t>(out, static_cast<std::uint64_t>(sd->rows()));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(sd->cols()));
    put<std::uint32_t>(out, 0);
  } else if (const auto* cn = dynamic_cast<const ConvNetModel*>(&model)) {
    put<std::uint64_t>(out, 0);
    put<std::uint64_t>(out, 0);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(cn->layers().size()));
    for (const auto& L : cn->layers()) {
      put<std::uint32_t>(out, static_cast<std::uint32_t>(L.size));
      put<std::uint32_t>(out, static_cast<std::uint32_t>(L.in_channels));
      put<std::uint32_t>(out, static_cast<std::uint32_t>(L.out_channels));
    }
  } else {
    throw UnsupportedFormat("model_serialize: unknown model type");
  }
  const Eigen::VectorXd& p = model.params();
  put<std::uint64_t>(out, static_cast<std::uint64_t>(p.size()));
  for (Eigen::Index i = 0; i < p.size(); ++i) put<double>(out, p(i));
  return out;
}

std::unique_ptr<Model> model_deserialize(const std::string& bytes) {
  if (bytes.size() < 4 || bytes.compare(0, 4, "FNSM") != 0) {
    throw CorruptHeader(0, "not a model file (bad magic)");
  }
  Reader r(bytes);
  r.get<std::uint32_t>("magic");
  const std::size_t version_at = r.pos();
  const auto version = r.get<std::uint32_t>("version");
  if (version != kModelFormatVersion) {
    throw UnsupportedFormat("model file version " + std::to_string(version) +
                            " (byte offset " + std::to_string(version_at) + "), expected " +
                            std::to_string(kModelFormatVersion));
  }
  const std::size_t kind_at = r.pos();
  const auto kind = r.get<std::uint32_t>("kind");
  const auto U = r.get<std::uint64_t>("height");
  const auto V = r.get<std::uint64_t>("width");
  const auto nlayers = r.get<std::uint32_t>("layer count");
  std::unique_ptr<Model> model;
  if (kind == static_cast<std::uint32_t>(ModelKind::SpectralDiagonal)) {
    if (U == 0 || V == 0 || U > (1u << 20) || V > (1u << 20) || nlayers != 0) {
      throw CorruptHeader(kind_at, "invalid spectral model header");
    }
    model = std::make_unique<SpectralDiagonalModel>(static_cast<Eigen::Index>(U),
                                                    static_cast<Eigen::Index>(V));
  } else if (kind == static_cast<std::uint32_t>(ModelKind::ConvNet)) {
    if (nlayers == 0 || nlayers > 1024) throw CorruptHeader(kind_at, "invalid layer count");
    std::vector<ConvLayer> layers;
    for (std::uint32_t i = 0; i < nlayers; ++i) {
      const std::size_t at = r.pos();
      ConvLayer L;
      L.size = static_cast<int>(r.get<std::uint32_t>("layer size"));
      L.in_channels = static_cast<int>(r.get<std::uint32_t>("layer inputs"));
      L.out_channels = static_cast<int>(r.get<std::uint32_t>("layer outputs"));
      if (L.size < 1 || L.size % 2 == 0 || L.size > 255 || L.in_channels < 1 ||
          L.out_channels < 1 || L.in_channels > 4096 || L.out_channels > 4096) {
        throw CorruptHeader(at, "invalid layer descriptor " + std::to_string(i));
      }
      layers.push_back(L);
    }
    try {
      model = std::make_unique<ConvNetModel>(layers);
    } catch (const Error& e) {
      throw CorruptHeader(kind_at, std::string("inconsistent layer descriptors: ") + e.what());
    }
  } else {
    throw UnsupportedFormat("unknown model kind " + std::to_string(kind) + " (byte offset " +
                            std::to_string(kind_at) + ")");
  }
  const std::size_t count_at = r.pos();
  const auto count = r.get<std::uint64_t>("parameter count");
  if (count != static_cast<std::uint64_t>(model->params().size())) {
    throw CorruptHeader(count_at, "parameter count " + std::to_string(count) +
                                      " does not match the declared architecture");
  }
  if (r.remaining() != count * 8) {
    throw CorruptHeader(r.pos(), "expected " + std::to_string(count * 8) +
                                     " parameter bytes, found " + std::to_string(r.remaining()));
  }
  for (Eigen::Index i = 0; i < model->params().size(); ++i) {
    model->params()(i) = r.get<double>("parameter");
  }
  return model;
}

void model_save(const std::string& path, const Model& model) {
  const std::string bytes = model_serialize(model);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("failed writing '" + path + "'");
}

std::unique_ptr<Model> model_load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for reading");
  const std::string bytes((std::istreambuf_iterator<char>(f)), {});
  return model_deserialize(bytes);
}

}  // namespace fnsup
