// Copyright 2026 The fermix Authors
// SPDX-License-Identifier: Apache-2.0

#include "fermix/state_io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "fermix/errors.hpp"

namespace fermix {
namespace {

static_assert(std::endian::native == std::endian::little, "little-endian host required");

class Writer {
 public:
  explicit Writer(const std::filesystem::path& p) : path_(p), out_(p, std::ios::binary) {
    if (!out_) throw ConfigError("cannot open " + p.string() + " for writing");
  }
  template <class T>
  void put(T v) { out_.write(reinterpret_cast<const char*>(&v), sizeof(T)); }
  void bytes(const void* data, std::size_t n) { out_.write(static_cast<const char*>(data), n); }
  void finish() {
    out_.close();
    if (!out_) throw ConfigError("write failed: " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& p) : path_(p), in_(p, std::ios::binary) {
    if (!in_) throw ConfigError("cannot open " + p.string());
  }
  template <class T>
  T get() {
    T v;
    bytes(&v, sizeof(T));
    return v;
  }
  void bytes(void* data, std::size_t n) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n)
      throw ConfigError("truncated file: " + path_.string());
  }
  void expect_end() {
    if (in_.peek() != std::char_traits<char>::eof())
      throw ConfigError("trailing data in " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
};

void check_header(Reader& r, const char* magic, const std::filesystem::path& p) {
  char m[4];
  r.bytes(m, 4);
  if (std::memcmp(m, magic, 4) != 0) throw ConfigError("bad magic in " + p.string());
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion)
    throw ConfigError("unsupported checkpoint version " + std::to_string(version));
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

void save_ci_state(const std::filesystem::path& path, const CIState& state, double g) {
  Writer w(path);
  w.bytes("FXCI", 4);
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put<std::uint32_t>(state.M());
  w.put<std::uint32_t>(state.n_a());
  w.put<std::uint32_t>(state.n_b());
  w.put<double>(state.time);
  w.put<double>(g);
  w.bytes(state.coeff.data(), sizeof(cplx) * state.coeff.size());
  w.finish();
}

CICheckpoint load_ci_state(const std::filesystem::path& path) {
  Reader r(path);
  check_header(r, "FXCI", path);
  const int M = static_cast<int>(r.get<std::uint32_t>());
  const int na = static_cast<int>(r.get<std::uint32_t>());
  const int nb = static_cast<int>(r.get<std::uint32_t>());
  CICheckpoint c;
  c.state.time = r.get<double>();
  c.g = r.get<double>();
  c.state.basis_a = make_determinant_basis(M, na);
  c.state.basis_b = make_determinant_basis(M, nb);
  c.state.coeff.resize(c.state.basis_a->size(), c.state.basis_b->size());
  r.bytes(c.state.coeff.data(), sizeof(cplx) * c.state.coeff.size());
  r.expect_end();
  return c;
}

void save_hf_state(const std::filesystem::path& path, const HFState& state, double g) {
  Writer w(path);
  w.bytes("FXHF", 4);
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(state.orbitals_a.rows()));
  w.put<std::uint32_t>(state.n_a());
  w.put<std::uint32_t>(state.n_b());
  w.put<double>(state.time);
  w.put<double>(g);
  w.bytes(state.orbitals_a.data(), sizeof(cplx) * state.orbitals_a.size());
  w.bytes(state.orbitals_b.data(), sizeof(cplx) * state.orbitals_b.size());
  w.finish();
}

HFCheckpoint load_hf_state(const std::filesystem::path& path) {
  Reader r(path);
  check_header(r, "FXHF", path);
  const int n = static_cast<int>(r.get<std::uint32_t>());
  const int na = static_cast<int>(r.get<std::uint32_t>());
  const int nb = static_cast<int>(r.get<std::uint32_t>());
  HFCheckpoint c;
  c.state.time = r.get<double>();
  c.g = r.get<double>();
  c.state.orbitals_a.resize(n, na);
  c.state.orbitals_b.resize(n, nb);
  r.bytes(c.state.orbitals_a.data(), sizeof(cplx) * c.state.orbitals_a.size());
  r.bytes(c.state.orbitals_b.data(), sizeof(cplx) * c.state.orbitals_b.size());
  r.expect_end();
  return c;
}

void write_raw(const std::filesystem::path& path, const Eigen::MatrixXd& data,
               const std::vector<Axis>& axes) {
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  for (std::size_t k = 0; k < axes.size() && k < 2; ++k) {
    const Eigen::Index len = k == 0 ? data.rows() : data.cols();
    if (!axes[k].values.empty() && static_cast<Eigen::Index>(axes[k].values.size()) != len)
      throw ConfigError("write_raw: axis '" + axes[k].name + "' length does not match the array");
  }
  const RowMajor rm = data;
  Writer w(path);
  w.bytes(rm.data(), sizeof(double) * rm.size());
  w.finish();

  std::ofstream meta(path.string() + ".meta");
  if (!meta) throw ConfigError("cannot write " + path.string() + ".meta");
  meta << "dtype = float64\nendian = little\norder = row-major\n";
  meta << "shape = " << data.rows() << ' ' << data.cols() << '\n';
  for (std::size_t k = 0; k < axes.size(); ++k) {
    meta << "axis" << k << ".name = " << axes[k].name << '\n';
    meta << "axis" << k << ".values =";
    for (double v : axes[k].values) meta << ' ' << format_double(v);
    meta << '\n';
  }
  if (!meta) throw ConfigError("write failed: " + path.string() + ".meta");
}

Eigen::MatrixXd read_raw(const std::filesystem::path& path) {
  std::ifstream meta(path.string() + ".meta");
  if (!meta) throw ConfigError("missing sidecar " + path.string() + ".meta");
  long rows = -1, cols = -1;
  std::string line;
  while (std::getline(meta, line)) {
    if (line.rfind("shape = ", 0) == 0) {
      std::istringstream is(line.substr(8));
      is >> rows >> cols;
    }
  }
  if (rows < 0 || cols < 0) throw ConfigError("sidecar lacks a shape: " + path.string());
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(rows, cols);
  Reader r(path);
  r.bytes(rm.data(), sizeof(double) * rm.size());
  r.expect_end();
  return rm;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw ConfigError("csv row width differs from header");
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_double(row[k]);
    out << '\n';
  }
  if (!out) throw ConfigError("write failed: " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty csv: " + path.string());
  std::stringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) {
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc()) throw ConfigError("bad csv number '" + cell + "'");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace fermix
