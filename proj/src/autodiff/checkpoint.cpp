// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "autodiff/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "common/error.hpp"

namespace sacti::ad {

namespace {

constexpr char kMagic[8] = {'S', 'A', 'C', 'T', 'I', 'C', 'K', 'P'};

template <class T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

template <class T>
T get_le(const std::vector<std::uint8_t>& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) fail(ErrorKind::kSchema, "checkpoint truncated");
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(in[pos + i]) << (8 * i);
  pos += sizeof(T);
  return value;
}

struct Entry {
  std::string name;
  std::string role;
  const Tensor* tensor;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const nlohmann::json& meta, const ParameterStore& store) {
  std::vector<Entry> entries;
  for (const auto& [name, p] : store) entries.push_back({name, "param", &p.value});
  for (const auto& [name, s] : store.slots()) {
    if (s.first_moment.empty()) continue;
    entries.push_back({name, "adam_m", &s.first_moment});
    entries.push_back({name, "adam_v", &s.second_moment});
  }
  nlohmann::json header;
  header["format_version"] = kCheckpointVersion;
  header["meta"] = meta;
  header["store"] = {{"seed", store.seed()}, {"step", store.step()}};
  header["tensors"] = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const auto& e : entries) {
    header["tensors"].push_back({{"name", e.name},
                                 {"role", e.role},
                                 {"shape", e.tensor->shape()},
                                 {"dtype", "f64le"},
                                 {"offset", offset},
                                 {"count", e.tensor->size()}});
    offset += e.tensor->size() * sizeof(double);
  }
  const std::string text = header.dump();
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint64_t>(out, text.size());
  out.insert(out.end(), text.begin(), text.end());
  out.reserve(out.size() + offset);
  for (const auto& e : entries) {
    for (double v : e.tensor->values()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  }
  return out;
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    fail(ErrorKind::kSchema, "not a checkpoint file (bad magic)");
  }
  std::size_t pos = sizeof(kMagic);
  const auto version = get_le<std::uint32_t>(bytes, pos);
  if (version != kCheckpointVersion) {
    fail(ErrorKind::kSchema, "unsupported checkpoint version " + std::to_string(version));
  }
  const auto header_len = get_le<std::uint64_t>(bytes, pos);
  if (pos + header_len > bytes.size()) fail(ErrorKind::kSchema, "checkpoint header truncated");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                                   bytes.begin() + static_cast<std::ptrdiff_t>(pos + header_len));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kSchema, std::string("checkpoint header is not JSON: ") + e.what());
  }
  const std::size_t data_begin = pos + header_len;
  Checkpoint ck;
  ck.meta = header.value("meta", nlohmann::json::object());
  ck.store = ParameterStore(header.at("store").at("seed").get<std::uint64_t>());
  ck.store.set_step(header.at("store").at("step").get<std::uint64_t>());
  for (const auto& t : header.at("tensors")) {
    const auto shape = t.at("shape").get<Shape>();
    const auto count = t.at("count").get<std::uint64_t>();
    std::size_t p = data_begin + t.at("offset").get<std::uint64_t>();
    if (t.at("dtype").get<std::string>() != "f64le") fail(ErrorKind::kSchema, "unsupported dtype");
    if (numel(shape) != count || p + count * sizeof(double) > bytes.size()) {
      fail(ErrorKind::kSchema, "tensor payload out of bounds for " + t.at("name").get<std::string>());
    }
    std::vector<double> values(count);
    for (auto& v : values) v = std::bit_cast<double>(get_le<std::uint64_t>(bytes, p));
    const auto name = t.at("name").get<std::string>();
    const auto role = t.at("role").get<std::string>();
    Tensor tensor(shape, std::move(values));
    if (role == "param") {
      ck.store.add(name, std::move(tensor));
    } else if (role == "adam_m") {
      ck.store.slots()[name].first_moment = std::move(tensor);
    } else if (role == "adam_v") {
      ck.store.slots()[name].second_moment = std::move(tensor);
    } else {
      fail(ErrorKind::kSchema, "unknown tensor role " + role);
    }
  }
  return ck;
}

void write_checkpoint(const std::filesystem::path& path, const nlohmann::json& meta, const ParameterStore& store) {
  const auto bytes = encode_checkpoint(meta, store);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot open " + path.string() + " for writing", "out");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::kIo, "failed writing " + path.string(), "out");
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open checkpoint " + path.string(), "checkpoint");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace sacti::ad
