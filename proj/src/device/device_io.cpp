/**
 * Copyright (c) 2026 The negfmini developers.
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

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "negfmini/device.hpp"

namespace negfmini {

static_assert(std::endian::native == std::endian::little, "device files are little-endian");

namespace fs = std::filesystem;

namespace {

constexpr const char* kMagic = "NEGFMINI1";
enum : std::uint32_t { kF64 = 1, kI32 = 2, kC128 = 3 };

struct Record {
  std::uint32_t tag;
  std::uint32_t dtype;
  std::uint64_t count;
};
static_assert(sizeof(Record) == 16);

const char* tag_name(std::uint32_t tag) {
  static const char* names[] = {"?",         "positions", "neighbors", "H0.diag",   "H0.upper",   "H0.lower",
                                "H1",        "S0.diag",   "S0.upper",  "S0.lower",  "Phi0.diag",  "Phi0.upper",
                                "Phi0.lower", "Phi1",     "dH",        "H.cell01",  "S.cell01",   "Phi.cell01"};
  return tag < sizeof(names) / sizeof(names[0]) ? names[tag] : "?";
}

class Writer {
 public:
  explicit Writer(std::ofstream& out) : out_(out) {}
  void raw(std::uint32_t tag, std::uint32_t dtype, std::uint64_t count, const void* data, std::size_t bytes) {
    Record r{tag, dtype, count};
    out_.write(reinterpret_cast<const char*>(&r), sizeof r);
    if (bytes) out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
  }
  void blocks(std::uint32_t tag, const std::vector<CMatrix>& v) {
    std::vector<cplx> flat;
    for (const auto& m : v) flat.insert(flat.end(), m.data(), m.data() + m.size());
    raw(tag, kC128, flat.size(), flat.data(), flat.size() * sizeof(cplx));
  }
  void block(std::uint32_t tag, const CMatrix& m) { blocks(tag, std::vector<CMatrix>{m}); }

 private:
  std::ofstream& out_;
};

class Reader {
 public:
  explicit Reader(std::ifstream& in) : in_(in) {}
  template <class T>
  std::vector<T> read(std::uint32_t tag, std::uint32_t dtype, std::uint64_t expected) {
    Record r{};
    if (!in_.read(reinterpret_cast<char*>(&r), sizeof r))
      throw Error(ErrorKind::Format, std::string("truncated data file before array '") + tag_name(tag) + "'");
    if (r.tag != tag || r.dtype != dtype) {
      std::ostringstream os;
      os << "malformed data file: expected array '" << tag_name(tag) << "', found tag " << r.tag << " type " << r.dtype;
      throw Error(ErrorKind::Format, os.str());
    }
    if (r.count != expected) {
      std::ostringstream os;
      os << "inconsistent dimensions: array '" << tag_name(tag) << "' has " << r.count << " elements, expected "
         << expected;
      throw Error(ErrorKind::Dimension, os.str());
    }
    std::vector<T> v(r.count);
    if (r.count && !in_.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(r.count * sizeof(T))))
      throw Error(ErrorKind::Format, std::string("truncated array '") + tag_name(tag) + "'");
    return v;
  }
  std::vector<CMatrix> blocks(std::uint32_t tag, int count, int dim) {
    auto flat = read<cplx>(tag, kC128, static_cast<std::uint64_t>(count) * dim * dim);
    std::vector<CMatrix> out(count, CMatrix(dim, dim));
    for (int k = 0; k < count; ++k)
      std::memcpy(out[k].data(), flat.data() + static_cast<std::size_t>(k) * dim * dim, sizeof(cplx) * dim * dim);
    return out;
  }
  CMatrix block(std::uint32_t tag, int dim) { return blocks(tag, 1, dim)[0]; }

 private:
  std::ifstream& in_;
};

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void save_device(const Device& d, const std::string& path) {
  validate_device(d);
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create device directory '" + path + "': " + ec.message());
  const DeviceStructure& s = d.structure;
  {
    std::ofstream h(fs::path(path) / "header.txt");
    if (!h) throw Error(ErrorKind::Io, "cannot write header in '" + path + "'");
    h << kMagic << "\n";
    h << "lattice " << to_string(s.lattice) << "\n";
    h << "Na " << s.na << "\n"
      << "Nb " << s.nb << "\n"
      << "Norb " << s.norb << "\n"
      << "N3D " << s.n3d << "\n"
      << "bnum " << s.bnum << "\n";
    h << "Nkz " << d.grid.nkz << "\n"
      << "Nqz " << d.grid.nqz << "\n"
      << "NE " << d.grid.ne << "\n"
      << "Nomega " << d.grid.nomega << "\n"
      << "omega_step " << d.grid.omega_step << "\n";
    h << "Emin " << fmt_double(d.grid.emin) << "\n"
      << "Emax " << fmt_double(d.grid.emax) << "\n"
      << "temperature " << fmt_double(d.grid.temperature) << "\n";
    h << "Vds " << fmt_double(s.vds) << "\n"
      << "Vgs " << fmt_double(s.vgs) << "\n"
      << "seed " << s.seed << "\n";
  }
  std::ofstream bin(fs::path(path) / "data.bin", std::ios::binary);
  if (!bin) throw Error(ErrorKind::Io, "cannot write data file in '" + path + "'");
  Writer w(bin);
  w.raw(1, kF64, s.positions.size() * 2, s.positions.data(), s.positions.size() * sizeof(s.positions[0]));
  std::vector<std::int32_t> nbr(s.neighbors.begin(), s.neighbors.end());
  w.raw(2, kI32, nbr.size(), nbr.data(), nbr.size() * sizeof(std::int32_t));
  const MaterialOperators& o = d.ops;
  w.blocks(3, o.H0.diag);
  w.blocks(4, o.H0.upper);
  w.blocks(5, o.H0.lower);
  w.blocks(6, o.H1);
  w.blocks(7, o.S0.diag);
  w.blocks(8, o.S0.upper);
  w.blocks(9, o.S0.lower);
  w.blocks(10, o.Phi0.diag);
  w.blocks(11, o.Phi0.upper);
  w.blocks(12, o.Phi0.lower);
  w.blocks(13, o.Phi1);
  w.raw(14, kC128, o.dH.size(), o.dH.data(), o.dH.size() * sizeof(cplx));
  w.block(15, o.H_cell01);
  w.block(16, o.S_cell01);
  w.block(17, o.Phi_cell01);
  if (!bin) throw Error(ErrorKind::Io, "write failed for '" + path + "'");
}

Device load_device(const std::string& path) {
  std::ifstream h(fs::path(path) / "header.txt");
  if (!h) throw Error(ErrorKind::Io, "cannot open device header in '" + path + "'");
  std::string line;
  if (!std::getline(h, line) || line != kMagic)
    throw Error(ErrorKind::Format, "malformed header: missing magic string " + std::string(kMagic));
  std::map<std::string, std::string> kv;
  while (std::getline(h, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key, value, extra;
    if (!(ls >> key >> value) || (ls >> extra)) throw Error(ErrorKind::Format, "malformed header line: '" + line + "'");
    kv[key] = value;
  }
  auto get = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw Error(ErrorKind::Format, std::string("malformed header: missing field ") + key);
    return it->second;
  };
  auto geti = [&](const char* key) {
    const std::string& v = get(key);
    std::size_t pos = 0;
    long long x = 0;
    try {
      x = std::stoll(v, &pos);
    } catch (...) {
      pos = 0;
    }
    if (pos != v.size()) throw Error(ErrorKind::Format, std::string("malformed header: field ") + key + " is not an integer");
    return x;
  };
  auto getd = [&](const char* key) {
    const std::string& v = get(key);
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size()) throw Error(ErrorKind::Format, std::string("malformed header: field ") + key + " is not a number");
    return x;
  };

  Device d;
  DeviceStructure& s = d.structure;
  try {
    s.lattice = parse_lattice(get("lattice"));
  } catch (const Error&) {
    throw Error(ErrorKind::Format, "malformed header: unknown lattice '" + get("lattice") + "'");
  }
  s.na = static_cast<int>(geti("Na"));
  s.nb = static_cast<int>(geti("Nb"));
  s.norb = static_cast<int>(geti("Norb"));
  s.n3d = static_cast<int>(geti("N3D"));
  s.bnum = static_cast<int>(geti("bnum"));
  d.grid.nkz = static_cast<int>(geti("Nkz"));
  d.grid.nqz = static_cast<int>(geti("Nqz"));
  d.grid.ne = static_cast<int>(geti("NE"));
  d.grid.nomega = static_cast<int>(geti("Nomega"));
  d.grid.omega_step = kv.count("omega_step") ? static_cast<int>(geti("omega_step")) : 1;
  d.grid.emin = getd("Emin");
  d.grid.emax = getd("Emax");
  d.grid.temperature = kv.count("temperature") ? getd("temperature") : 300.0;
  s.vds = getd("Vds");
  s.vgs = getd("Vgs");
  s.seed = static_cast<std::uint64_t>(geti("seed"));
  if (s.na <= 0 || s.nb <= 0 || s.norb <= 0 || s.bnum <= 0)
    throw Error(ErrorKind::Dimension, "inconsistent dimensions: Na, Nb, Norb, bnum must be positive");
  if (s.n3d != kN3D) throw Error(ErrorKind::Dimension, "inconsistent dimensions: N3D must be 3");
  if (s.na % s.bnum != 0) {
    std::ostringstream os;
    os << "invalid partition: Na=" << s.na << " is not divisible by bnum=" << s.bnum;
    throw Error(ErrorKind::Partition, os.str());
  }

  std::ifstream bin(fs::path(path) / "data.bin", std::ios::binary);
  if (!bin) throw Error(ErrorKind::Io, "cannot open data file in '" + path + "'");
  Reader r(bin);
  auto pos = r.read<double>(1, kF64, static_cast<std::uint64_t>(s.na) * 2);
  s.positions.resize(s.na);
  std::memcpy(s.positions.data(), pos.data(), pos.size() * sizeof(double));
  auto nbr = r.read<std::int32_t>(2, kI32, static_cast<std::uint64_t>(s.na) * s.nb);
  s.neighbors.assign(nbr.begin(), nbr.end());

  const int apb = s.na / s.bnum;
  const int bde = apb * s.norb, bdp = apb * kN3D;
  MaterialOperators& o = d.ops;
  o.na = s.na;
  o.nb = s.nb;
  o.norb = s.norb;
  auto bt = [&](std::uint32_t tag, int bd) {
    BlockTriMatrix m;
    m.bnum = s.bnum;
    m.blockdim = bd;
    m.diag = r.blocks(tag, s.bnum, bd);
    m.upper = r.blocks(tag + 1, s.bnum - 1, bd);
    m.lower = r.blocks(tag + 2, s.bnum - 1, bd);
    return m;
  };
  o.H0 = bt(3, bde);
  o.H1 = r.blocks(6, s.bnum, bde);
  o.S0 = bt(7, bde);
  o.Phi0 = bt(10, bdp);
  o.Phi1 = r.blocks(13, s.bnum, bdp);
  o.dH = r.read<cplx>(14, kC128, static_cast<std::uint64_t>(s.na) * s.nb * kN3D * s.norb * s.norb);
  o.H_cell01 = r.block(15, bde);
  o.S_cell01 = r.block(16, bde);
  o.Phi_cell01 = r.block(17, bdp);
  char probe;
  if (bin.read(&probe, 1)) throw Error(ErrorKind::Format, "malformed data file: trailing bytes");
  validate_device(d);
  o.H0.build_sparse();
  o.S0.build_sparse();
  return d;
}

}  // namespace negfmini
