/*
 * Copyright 2026 The FaceForge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "faceforge/error.hpp"
#include "faceforge/model.hpp"

namespace faceforge {

namespace {

constexpr char kMagic[8] = {'F', 'F', 'C', 'K', 'P', 'T', '\0', '\1'};

template <typename V>
void put(std::ostream& out, V v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(V));
}

template <typename V>
V get(std::istream& in, const std::string& what) {
  V v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(V));
  FACEFORGE_CHECK(in.good(), ErrorKind::Format, "truncated checkpoint while reading " + what);
  return v;
}

std::string read_bytes(std::istream& in, std::uint32_t n, const std::string& what) {
  FACEFORGE_CHECK(n < (1u << 28), ErrorKind::Format, "implausible length for " + what);
  std::string s(n, '\0');
  in.read(s.data(), n);
  FACEFORGE_CHECK(in.good(), ErrorKind::Format, "truncated checkpoint while reading " + what);
  return s;
}

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ModelVariant& mv) {
  FACEFORGE_CHECK(has_attention(mv.name) == mv.model.has_attention(), ErrorKind::State,
                  "variant " + std::string(to_string(mv.name)) + " does not match the model's attention setting");
  std::ofstream out(path, std::ios::binary);
  FACEFORGE_CHECK(out.good(), ErrorKind::Io, "cannot write checkpoint '" + path.string() + "'");
  const auto& config = mv.model.config();
  nlohmann::json header{{"variant", std::string(to_string(mv.name))},
                        {"training_mode", std::string(to_string(mv.training_mode))},
                        {"backbone", nlohmann::json::parse(config.to_json())},
                        {"config_hash", hex(config.hash())}};
  const std::string text = header.dump();
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  const auto& params = mv.model.parameters();
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p.name.size()));
    out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p.shape.size()));
    for (int d : p.shape) put<std::int32_t>(out, d);
    for (float v : p.value) put<double>(out, static_cast<double>(v));
  }
  FACEFORGE_CHECK(out.good(), ErrorKind::Io, "error writing checkpoint '" + path.string() + "'");
}

ModelVariant load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  FACEFORGE_CHECK(in.good(), ErrorKind::Io, "cannot open checkpoint '" + path.string() + "'");
  char magic[8];
  in.read(magic, sizeof magic);
  FACEFORGE_CHECK(in.good() && std::memcmp(magic, kMagic, sizeof magic) == 0, ErrorKind::Format,
                  "'" + path.string() + "' is not a faceforge checkpoint");
  const auto version = get<std::uint32_t>(in, "version");
  FACEFORGE_CHECK(version == kCheckpointVersion, ErrorKind::Format,
                  "unsupported checkpoint version " + std::to_string(version));
  const std::string text = read_bytes(in, get<std::uint32_t>(in, "header length"), "header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, std::string("corrupt checkpoint header: ") + e.what());
  }
  const BackboneConfig config = BackboneConfig::from_json(header.at("backbone").dump());
  FACEFORGE_CHECK(header.at("config_hash").get<std::string>() == hex(config.hash()), ErrorKind::Format,
                  "checkpoint config hash mismatch in '" + path.string() + "'");
  ModelVariant mv{parse_variant(header.at("variant").get<std::string>()),
                  parse_training_mode(header.at("training_mode").get<std::string>()), Model<float>(config, 0)};
  FACEFORGE_CHECK(has_attention(mv.name) == mv.model.has_attention(), ErrorKind::Format,
                  "checkpoint variant disagrees with its backbone's attention setting");

  auto& params = mv.model.parameters();
  const auto count = get<std::uint32_t>(in, "tensor count");
  FACEFORGE_CHECK(count == params.size(), ErrorKind::Format, "checkpoint tensor count does not match its config");
  for (auto& p : params) {
    const std::string name = read_bytes(in, get<std::uint32_t>(in, "name length"), "tensor name");
    FACEFORGE_CHECK(name == p.name, ErrorKind::Format, "expected tensor '" + p.name + "', found '" + name + "'");
    const auto ndim = get<std::uint32_t>(in, "rank");
    FACEFORGE_CHECK(ndim == p.shape.size(), ErrorKind::Format, "rank mismatch for '" + name + "'");
    for (int d : p.shape) {
      FACEFORGE_CHECK(get<std::int32_t>(in, "dims") == d, ErrorKind::Format, "shape mismatch for '" + name + "'");
    }
    for (auto& v : p.value) v = static_cast<float>(get<double>(in, name));
  }
  return mv;
}

}  // namespace faceforge
