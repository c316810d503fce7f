#pragma once

#include <cstddef>
#include <deque>
#include <map>
#include <utility>

#include <Eigen/Dense>

namespace mot {

// L2-normalized appearance embedding.
class Embedding {
 public:
  Embedding() = default;

  // Divides by the norm; throws NumericalError for a zero vector.
  static Embedding normalized(Eigen::VectorXd values);
  // Keeps values as given when the norm is within `tolerance` of 1 and
  // normalizes otherwise.
  static Embedding from_values(Eigen::VectorXd values, double tolerance = 1e-9);

  const Eigen::VectorXd& values() const { return values_; }
  Eigen::Index dim() const { return values_.size(); }
  bool empty() const { return values_.size() == 0; }

  bool operator==(const Embedding& other) const { return values_ == other.values_; }

 private:
  explicit Embedding(Eigen::VectorXd values) : values_(std::move(values)) {}
  Eigen::VectorXd values_;
};

// 1 - a.b, in [0, 2]. Throws InputError on dimension mismatch.
double cosine_distance(const Embedding& a, const Embedding& b);

// alpha * prev + (1 - alpha) * f, re-normalized. alpha = 1 returns prev and
// alpha = 0 returns f unchanged.
Embedding ema_update(const Embedding& prev, const Embedding& f, double alpha);

// Bounded history of exponentially averaged features of one track. Capacity 1
// gives a single running average; momentum 0 gives a raw feature history.
class EmaBank {
 public:
  EmaBank(std::size_t capacity, double momentum);

  // Appends ema_update(last entry, f, momentum), seeding with f when empty,
  // and evicts the oldest entry past capacity.
  void push(const Embedding& f);

  // Minimum cosine distance between f and any entry. Throws
  // PreconditionError on an empty bank.
  double min_cosine_distance(const Embedding& f) const;

  const std::deque<Embedding>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  double momentum() const { return momentum_; }
  Eigen::Index dim() const { return entries_.empty() ? 0 : entries_.back().dim(); }

 private:
  std::size_t capacity_;
  double momentum_;
  std::deque<Embedding> entries_;
};

// Source of per-observation embeddings keyed by (frame, key). The key is the
// detection ordinal for detection sidecars and the track id for tracklet
// sidecars.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual const Embedding* find(int frame, int key) const = 0;
  virtual Eigen::Index dim() const = 0;
};

class EmbeddingStore final : public EmbeddingProvider {
 public:
  EmbeddingStore() = default;
  explicit EmbeddingStore(Eigen::Index dim) : dim_(dim) {}

  // Throws InputError on dimension mismatch or duplicate key.
  void insert(int frame, int key, Embedding embedding);

  const Embedding* find(int frame, int key) const override;
  Eigen::Index dim() const override { return dim_; }
  std::size_t size() const { return table_.size(); }
  bool empty() const { return table_.empty(); }

  // Entries ordered by (frame, key).
  const std::map<std::pair<int, int>, Embedding>& table() const { return table_; }

 private:
  Eigen::Index dim_ = 0;
  std::map<std::pair<int, int>, Embedding> table_;
};

}  // namespace mot
