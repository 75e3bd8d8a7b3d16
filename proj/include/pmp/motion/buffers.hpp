#pragma once

#include "pmp/motion/parts.hpp"

namespace pmp::motion {

/// Fixed-capacity ring buffer of observation pairs with FIFO eviction and
/// uniform sampling.
class PairBuffer {
 public:
  explicit PairBuffer(std::size_t capacity = 0) : capacity_(capacity) {
    if (capacity_ == 0) throw ConfigError("pair buffer: capacity must be positive");
    data_.reserve(std::min<std::size_t>(capacity_, 4096));
  }

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  void push(ObservationPair pair) {
    if (data_.size() < capacity_) {
      data_.push_back(std::move(pair));
    } else {
      data_[head_] = std::move(pair);  // overwrite the oldest entry
      head_ = (head_ + 1) % capacity_;
    }
  }

  const ObservationPair& sample(Rng& rng) const {
    if (data_.empty()) throw ConfigError("pair buffer: sampling from empty buffer");
    return data_[rng.index(data_.size())];
  }

  const ObservationPair& at(std::size_t i) const { return data_.at(i); }

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // next eviction slot once full
  std::vector<ObservationPair> data_;
};

/// Per-part demo (reference) and replay (agent) pair storage.
struct PartBuffers {
  std::vector<PairBuffer> demo;
  std::vector<PairBuffer> replay;

  PartBuffers(int parts, std::size_t demo_capacity, std::size_t replay_capacity) {
    for (int k = 0; k < parts; ++k) {
      demo.emplace_back(demo_capacity);
      replay.emplace_back(replay_capacity);
    }
  }
};

/// With probability lambda_d, independently per pair, substitute an agent
/// pair with a uniformly drawn demo pair of the same part. Only discriminator
/// "agent" batches pass through here; reward-path observations never do. The
/// demo buffer itself is read-only.
inline std::vector<ObservationPair> demo_blend(const std::vector<ObservationPair>& agent_pairs,
                                               const std::vector<PairBuffer>& demo,
                                               double lambda_d, Rng& rng) {
  if (lambda_d < 0.0 || lambda_d > 1.0) throw ConfigError("demo blend: lambda_d must be in [0,1]");
  std::vector<ObservationPair> out;
  out.reserve(agent_pairs.size());
  for (const ObservationPair& p : agent_pairs) {
    if (lambda_d > 0.0 && rng.uniform() < lambda_d) {
      const PairBuffer& buf = demo.at(p.part);
      out.push_back(buf.sample(rng));
    } else {
      out.push_back(p);
    }
  }
  return out;
}

}  // namespace pmp::motion
