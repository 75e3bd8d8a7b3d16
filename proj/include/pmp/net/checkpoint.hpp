#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <string>

#include "pmp/net/mlp.hpp"

namespace pmp::net {

/// Named-tensor container with a versioned little-endian binary format.
/// Layout: magic "PMPT" | u32 version | u64 count | per tensor
/// (u64 name_len | name bytes | u64 rows | u64 cols | doubles col-major).
struct TensorFile {
  static constexpr std::uint32_t kVersion = 1;
  std::map<std::string, MatrixXd> tensors;

  bool has(const std::string& name) const { return tensors.count(name) > 0; }

  const MatrixXd& get(const std::string& name) const {
    auto it = tensors.find(name);
    if (it == tensors.end()) throw IoError("tensor file: missing entry " + name);
    return it->second;
  }

  void put(const std::string& name, const MatrixXd& m) { tensors[name] = m; }
  void put(const std::string& name, const VectorXd& v) { tensors[name] = m_from(v); }
  void put_scalar(const std::string& name, double x) {
    tensors[name] = MatrixXd::Constant(1, 1, x);
  }
  double get_scalar(const std::string& name) const { return get(name)(0, 0); }
  VectorXd get_vector(const std::string& name) const {
    const MatrixXd& m = get(name);
    if (m.cols() != 1) throw IoError("tensor file: " + name + " is not a vector");
    return m.col(0);
  }

  void save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for write: " + path);
    f.write("PMPT", 4);
    write_u32(f, kVersion);
    write_u64(f, tensors.size());
    for (const auto& [name, m] : tensors) {
      write_u64(f, name.size());
      f.write(name.data(), static_cast<std::streamsize>(name.size()));
      write_u64(f, static_cast<std::uint64_t>(m.rows()));
      write_u64(f, static_cast<std::uint64_t>(m.cols()));
      f.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(sizeof(double) * m.size()));
    }
    if (!f) throw IoError("write failed: " + path);
  }

  [[nodiscard]] static TensorFile load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::string(magic, 4) != "PMPT") throw IoError("bad magic: " + path);
    const std::uint32_t version = read_u32(f);
    if (version != kVersion) throw IoError("unsupported tensor file version in " + path);
    const std::uint64_t count = read_u64(f);
    TensorFile out;
    for (std::uint64_t i = 0; i < count; ++i) {
      const std::uint64_t name_len = read_u64(f);
      if (name_len > 4096) throw IoError("corrupt tensor file: " + path);
      std::string name(name_len, '\0');
      f.read(name.data(), static_cast<std::streamsize>(name_len));
      const auto rows = static_cast<Eigen::Index>(read_u64(f));
      const auto cols = static_cast<Eigen::Index>(read_u64(f));
      if (rows < 0 || cols < 0 || rows * cols > (1LL << 28))
        throw IoError("corrupt tensor file: " + path);
      MatrixXd m(rows, cols);
      f.read(reinterpret_cast<char*>(m.data()),
             static_cast<std::streamsize>(sizeof(double) * m.size()));
      if (!f) throw IoError("truncated tensor file: " + path);
      out.tensors.emplace(std::move(name), std::move(m));
    }
    return out;
  }

 private:
  static MatrixXd m_from(const VectorXd& v) {
    MatrixXd m(v.size(), 1);
    m.col(0) = v;
    return m;
  }
  static void write_u32(std::ofstream& f, std::uint32_t x) {
    f.write(reinterpret_cast<const char*>(&x), sizeof(x));
  }
  static void write_u64(std::ofstream& f, std::uint64_t x) {
    f.write(reinterpret_cast<const char*>(&x), sizeof(x));
  }
  static std::uint32_t read_u32(std::ifstream& f) {
    std::uint32_t x = 0;
    f.read(reinterpret_cast<char*>(&x), sizeof(x));
    return x;
  }
  static std::uint64_t read_u64(std::ifstream& f) {
    std::uint64_t x = 0;
    f.read(reinterpret_cast<char*>(&x), sizeof(x));
    return x;
  }
};

/// Serialize one network under a key prefix inside a TensorFile.
inline void put_mlp(TensorFile& tf, const std::string& prefix, const Mlp& net) {
  VectorXd widths(net.widths.size());
  for (std::size_t i = 0; i < net.widths.size(); ++i) widths[i] = net.widths[i];
  tf.put(prefix + ".widths", widths);
  tf.put_scalar(prefix + ".hidden", static_cast<double>(net.hidden));
  tf.put_scalar(prefix + ".output", static_cast<double>(net.output));
  for (std::size_t l = 0; l < net.w.size(); ++l) {
    tf.put(prefix + ".w" + std::to_string(l), net.w[l]);
    tf.put(prefix + ".b" + std::to_string(l), net.b[l]);
  }
}

inline Mlp get_mlp(const TensorFile& tf, const std::string& prefix) {
  Mlp net;
  const VectorXd widths = tf.get_vector(prefix + ".widths");
  for (Eigen::Index i = 0; i < widths.size(); ++i)
    net.widths.push_back(static_cast<int>(widths[i]));
  net.hidden = static_cast<Activation>(static_cast<int>(tf.get_scalar(prefix + ".hidden")));
  net.output = static_cast<Activation>(static_cast<int>(tf.get_scalar(prefix + ".output")));
  for (std::size_t l = 0; l + 1 < net.widths.size(); ++l) {
    net.w.push_back(tf.get(prefix + ".w" + std::to_string(l)));
    net.b.push_back(tf.get_vector(prefix + ".b" + std::to_string(l)));
    if (net.w[l].rows() != net.widths[l + 1] || net.w[l].cols() != net.widths[l])
      throw IoError("checkpoint: shape mismatch in " + prefix);
  }
  return net;
}

}  // namespace pmp::net
