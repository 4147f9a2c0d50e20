// Copyright 2026 The tdmpo Authors
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

#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "tdmpo/mpo.hpp"

namespace tdmpo {

namespace {

constexpr char kMagic[8] = {'T', 'D', 'M', 'P', 'O', 'S', 'N', '1'};

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw PreconditionError("load_snapshot: truncated stream");
  return value;
}

}  // namespace

void save_snapshot(const Mpo& mpo, std::ostream& out) {
  out.write(kMagic, sizeof(kMagic));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(mpo.size()));
  put<std::int64_t>(out, mpo.center() ? static_cast<std::int64_t>(*mpo.center()) : -1);
  put<double>(out, mpo.log_norm());
  for (Index d : mpo.bond_dims()) put<std::uint64_t>(out, static_cast<std::uint64_t>(d));
  for (const auto& t : mpo.sites()) {
    out.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(t.size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error("save_snapshot: write failed");
}

Mpo load_snapshot(std::istream& in) {
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw PreconditionError("load_snapshot: not an MPO snapshot");
  }
  const auto n = static_cast<Index>(get<std::uint64_t>(in));
  if (n < 2 || n > 1'000'000) throw PreconditionError("load_snapshot: implausible site count");
  const auto center = get<std::int64_t>(in);
  const double log_norm = get<double>(in);
  std::vector<Index> dims(static_cast<std::size_t>(n + 1));
  for (auto& d : dims) d = static_cast<Index>(get<std::uint64_t>(in));
  std::vector<SiteTensor> sites;
  sites.reserve(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    SiteTensor t(dims[static_cast<std::size_t>(j)], dims[static_cast<std::size_t>(j + 1)]);
    in.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(t.size() * sizeof(double)));
    if (!in) throw PreconditionError("load_snapshot: truncated tensor data");
    sites.push_back(std::move(t));
  }
  std::optional<Index> c;
  if (center >= 0) c = static_cast<Index>(center);
  return Mpo(std::move(sites), log_norm, c);
}

void save_snapshot(const Mpo& mpo, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_snapshot: cannot open " + path);
  save_snapshot(mpo, out);
}

Mpo load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("load_snapshot: cannot open " + path);
  return load_snapshot(in);
}

}  // namespace tdmpo
