#pragma once

// State indexing and the solved-database container and file format.
//
// File layout, all integers little-endian:
//   "ABDB"                      4 bytes
//   version, a, b, c, K,
//   marbles, cells, flags       8 x u32   (flags bit 0: distance array present)
//   state count                 u64
//   stalemate count             u64
//   values                      ceil(states / 4) bytes, 2 bits per state, LSB first
//   distances                   states x u16 (only if flags bit 0)
//   CRC-32 of everything above  u32

#include <zlib.h>

#include <array>
#include <atomic>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "abalone/geometry.hpp"
#include "abalone/rules.hpp"

namespace abalone {

static_assert(std::endian::native == std::endian::little, "database I/O assumes a little-endian host");

// Ranks constellations whose per-colour marble counts lie in
// [marbles - K + 1, marbles] in lexicographic scan-order ('.' < 'B' < 'G').
// A state index is 2 * rank + side to move.
class StateSpace {
 public:
  StateSpace() = default;

  StateSpace(int cells, int marbles, int k) : cells_(cells), marbles_(marbles), min_(std::max(0, marbles - k + 1)) {
    if (cells < 0 || cells > kMaxCells || marbles < 0 || k < 1) throw std::invalid_argument("bad state space");
    const auto dim = static_cast<std::size_t>(marbles + 2);
    table_.assign(static_cast<std::size_t>(cells + 1) * dim * dim, 0);
    for (int b = 0; b <= marbles + 1; ++b) {
      for (int g = 0; g <= marbles + 1; ++g) at(0, b, g) = in_range(b) && in_range(g) ? 1 : 0;
    }
    for (int r = 1; r <= cells; ++r) {
      for (int b = 0; b <= marbles; ++b) {
        for (int g = 0; g <= marbles; ++g) {
          const std::uint64_t sum = at(r - 1, b, g) + at(r - 1, b + 1, g) + at(r - 1, b, g + 1);
          if (sum < at(r - 1, b, g)) throw std::overflow_error("state space exceeds 64 bits");
          at(r, b, g) = sum;
        }
      }
    }
    constellations_ = at(cells, 0, 0);
    if (constellations_ > (UINT64_MAX >> 1)) throw std::overflow_error("state space exceeds 63 bits");
  }

  [[nodiscard]] int cells() const { return cells_; }
  [[nodiscard]] int marbles() const { return marbles_; }
  [[nodiscard]] int min_on_board() const { return min_; }
  [[nodiscard]] std::uint64_t constellation_count() const { return constellations_; }
  [[nodiscard]] std::uint64_t size() const { return 2 * constellations_; }

  [[nodiscard]] bool contains(const Constellation& c) const {
    if ((c.black & c.gray) != 0) return false;
    if (cells_ < 64 && (c.occupied() >> cells_) != 0) return false;
    return in_range(c.count(Color::Black)) && in_range(c.count(Color::Gray)) &&
           c.lost_by(Color::Black) == marbles_ - c.count(Color::Black) &&
           c.lost_by(Color::Gray) == marbles_ - c.count(Color::Gray);
  }

  [[nodiscard]] std::uint64_t rank(const Constellation& c) const {
    std::uint64_t r = 0;
    int b = 0;
    int g = 0;
    for (int i = 0; i < cells_; ++i) {
      const CellMask bit = CellMask{1} << i;
      const int rest = cells_ - 1 - i;
      if ((c.black & bit) != 0) {
        r += at(rest, b, g);
        ++b;
      } else if ((c.gray & bit) != 0) {
        r += at(rest, b, g) + at(rest, b + 1, g);
        ++g;
      }
    }
    return r;
  }

  [[nodiscard]] Constellation unrank(std::uint64_t r) const {
    if (r >= constellations_) throw std::out_of_range("rank outside the state space");
    Constellation c;
    int b = 0;
    int g = 0;
    for (int i = 0; i < cells_; ++i) {
      const CellMask bit = CellMask{1} << i;
      const int rest = cells_ - 1 - i;
      const std::uint64_t empty_here = at(rest, b, g);
      if (r < empty_here) continue;
      r -= empty_here;
      const std::uint64_t black_here = at(rest, b + 1, g);
      if (r < black_here) {
        c.black |= bit;
        ++b;
      } else {
        r -= black_here;
        c.gray |= bit;
        ++g;
      }
    }
    c.lost = {static_cast<std::uint8_t>(marbles_ - b), static_cast<std::uint8_t>(marbles_ - g)};
    return c;
  }

  [[nodiscard]] std::uint64_t index(const Constellation& c, Color to_move) const {
    return 2 * rank(c) + static_cast<std::uint64_t>(index_of(to_move));
  }

  [[nodiscard]] std::pair<Constellation, Color> state(std::uint64_t index) const {
    return {unrank(index / 2), static_cast<Color>(index % 2)};
  }

 private:
  [[nodiscard]] bool in_range(int n) const { return n >= min_ && n <= marbles_; }

  [[nodiscard]] std::uint64_t at(int r, int b, int g) const {
    if (b > marbles_ + 1 || g > marbles_ + 1) return 0;
    const auto dim = static_cast<std::size_t>(marbles_ + 2);
    return table_[(static_cast<std::size_t>(r) * dim + static_cast<std::size_t>(b)) * dim + static_cast<std::size_t>(g)];
  }
  std::uint64_t& at(int r, int b, int g) {
    const auto dim = static_cast<std::size_t>(marbles_ + 2);
    return table_[(static_cast<std::size_t>(r) * dim + static_cast<std::size_t>(b)) * dim + static_cast<std::size_t>(g)];
  }

  int cells_ = 0;
  int marbles_ = 0;
  int min_ = 0;
  std::uint64_t constellations_ = 0;
  std::vector<std::uint64_t> table_;
};

// Value of a state relative to the side to move.
enum class ValueCode : std::uint8_t { Draw = 0, Win = 1, Loss = 2 };

// Two bits per state.  While solving, 0 also means "not yet labelled".
class PackedValues {
 public:
  PackedValues() = default;
  explicit PackedValues(std::uint64_t n) : size_(n), words_(static_cast<std::size_t>((n + 31) / 32), 0) {}

  [[nodiscard]] std::uint64_t size() const { return size_; }

  [[nodiscard]] ValueCode get(std::uint64_t i) const {
    return static_cast<ValueCode>((words_[static_cast<std::size_t>(i / 32)] >> shift(i)) & 3U);
  }

  void set(std::uint64_t i, ValueCode v) {
    auto& w = words_[static_cast<std::size_t>(i / 32)];
    w = (w & ~(std::uint64_t{3} << shift(i))) | (static_cast<std::uint64_t>(v) << shift(i));
  }

  // Thread-safe read used while other workers may be labelling.
  [[nodiscard]] ValueCode load(std::uint64_t i) const {
    std::atomic_ref<const std::uint64_t> w(words_[static_cast<std::size_t>(i / 32)]);
    return static_cast<ValueCode>((w.load(std::memory_order_relaxed) >> shift(i)) & 3U);
  }

  // Labels an unlabelled state; returns false if another worker got there first.
  bool claim(std::uint64_t i, ValueCode v) {
    std::atomic_ref<std::uint64_t> w(words_[static_cast<std::size_t>(i / 32)]);
    std::uint64_t cur = w.load(std::memory_order_relaxed);
    const std::uint64_t mask = std::uint64_t{3} << shift(i);
    while ((cur & mask) == 0) {
      if (w.compare_exchange_weak(cur, cur | (static_cast<std::uint64_t>(v) << shift(i)), std::memory_order_relaxed)) {
        return true;
      }
    }
    return false;
  }

  [[nodiscard]] std::size_t byte_size() const { return static_cast<std::size_t>((size_ + 3) / 4); }
  [[nodiscard]] const char* bytes() const { return reinterpret_cast<const char*>(words_.data()); }
  char* bytes() { return reinterpret_cast<char*>(words_.data()); }

  friend bool operator==(const PackedValues& x, const PackedValues& y) {
    return x.size_ == y.size_ && x.words_ == y.words_;
  }

 private:
  static unsigned shift(std::uint64_t i) { return static_cast<unsigned>(2 * (i % 32)); }

  std::uint64_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

constexpr std::uint16_t kNoDistance = 0xFFFF;

// Perfect-play values for every non-terminal state of one game variant.
struct SolvedDatabase {
  BoardShape shape;
  int k = 1;
  int marbles = 0;
  std::shared_ptr<const Board> board;
  StateSpace space;
  PackedValues values;
  std::vector<std::uint16_t> distances;  // plies to the end for wins and losses; empty if not kept
  std::uint64_t stalemates = 0;

  [[nodiscard]] bool has_distances() const { return !distances.empty(); }

  static SolvedDatabase empty_for(BoardShape shape, int k, int marbles) {
    SolvedDatabase db;
    db.shape = shape;
    db.k = k;
    db.marbles = marbles;
    db.board = std::make_shared<const Board>(shape);
    db.space = StateSpace(db.board->cell_count(), marbles, k);
    db.values = PackedValues(db.space.size());
    return db;
  }
};

class DatabaseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr std::uint32_t kDatabaseVersion = 1;
constexpr std::array<char, 4> kDatabaseMagic{'A', 'B', 'D', 'B'};

namespace detail {

class CrcWriter {
 public:
  explicit CrcWriter(std::ofstream& out) : out_(out) {}
  void write(const char* data, std::size_t n) {
    out_.write(data, static_cast<std::streamsize>(n));
    update(data, n);
  }
  template <class T>
  void put(T v) {
    std::array<char, sizeof(T)> buf{};
    std::memcpy(buf.data(), &v, sizeof(T));
    write(buf.data(), buf.size());
  }
  void update(const char* data, std::size_t n) {
    while (n > 0) {
      const auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1U << 30));
      crc_ = crc32(crc_, reinterpret_cast<const Bytef*>(data), chunk);
      data += chunk;
      n -= chunk;
    }
  }
  [[nodiscard]] std::uint32_t crc() const { return static_cast<std::uint32_t>(crc_); }

 private:
  std::ofstream& out_;
  uLong crc_ = crc32(0L, Z_NULL, 0);
};

class CrcReader {
 public:
  explicit CrcReader(std::ifstream& in) : in_(in) {}
  void read(char* data, std::size_t n) {
    in_.read(data, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw DatabaseError("database file is truncated");
    while (n > 0) {
      const auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1U << 30));
      crc_ = crc32(crc_, reinterpret_cast<const Bytef*>(data), chunk);
      data += chunk;
      n -= chunk;
    }
  }
  template <class T>
  T get() {
    std::array<char, sizeof(T)> buf{};
    read(buf.data(), buf.size());
    T v;
    std::memcpy(&v, buf.data(), sizeof(T));
    return v;
  }
  [[nodiscard]] std::uint32_t crc() const { return static_cast<std::uint32_t>(crc_); }

 private:
  std::ifstream& in_;
  uLong crc_ = crc32(0L, Z_NULL, 0);
};

}  // namespace detail

inline void save(const SolvedDatabase& db, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DatabaseError("cannot open " + path + " for writing");
  detail::CrcWriter w(out);
  w.write(kDatabaseMagic.data(), kDatabaseMagic.size());
  for (int v : {static_cast<int>(kDatabaseVersion), db.shape.a, db.shape.b, db.shape.c, db.k, db.marbles,
                db.board->cell_count(), db.has_distances() ? 1 : 0}) {
    w.put(static_cast<std::uint32_t>(v));
  }
  w.put(static_cast<std::uint64_t>(db.space.size()));
  w.put(static_cast<std::uint64_t>(db.stalemates));
  w.write(db.values.bytes(), db.values.byte_size());
  if (db.has_distances()) {
    w.write(reinterpret_cast<const char*>(db.distances.data()), db.distances.size() * sizeof(std::uint16_t));
  }
  const std::uint32_t crc = w.crc();
  out.write(reinterpret_cast<const char*>(&crc), sizeof crc);
  if (!out) throw DatabaseError("write to " + path + " failed");
}

struct ExpectedGame {
  BoardShape shape;
  int k = 1;
};

// Loads and integrity-checks a database.  Nothing is returned unless the
// whole file is valid.
inline SolvedDatabase load(const std::string& path, std::optional<ExpectedGame> expected = std::nullopt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatabaseError("cannot open " + path);
  detail::CrcReader r(in);
  std::array<char, 4> magic{};
  r.read(magic.data(), magic.size());
  if (magic != kDatabaseMagic) throw DatabaseError(path + " is not an ABDB database (bad magic)");
  const auto version = r.get<std::uint32_t>();
  if (version != kDatabaseVersion) {
    throw DatabaseError("unsupported database version " + std::to_string(version));
  }
  BoardShape shape;
  shape.a = static_cast<int>(r.get<std::uint32_t>());
  shape.b = static_cast<int>(r.get<std::uint32_t>());
  shape.c = static_cast<int>(r.get<std::uint32_t>());
  const auto k = static_cast<int>(r.get<std::uint32_t>());
  const auto marbles = static_cast<int>(r.get<std::uint32_t>());
  const auto cells = static_cast<int>(r.get<std::uint32_t>());
  const auto flags = r.get<std::uint32_t>();
  const auto states = r.get<std::uint64_t>();
  const auto stalemates = r.get<std::uint64_t>();

  if (shape.a < 1 || shape.b < 1 || shape.c < 1 || shape.a > 16 || shape.b > 16 || shape.c > 16 || k < 1 ||
      k > 64 || marbles > kMaxCells) {
    throw DatabaseError("corrupt database header");
  }
  if (shape.expected_cell_count() != cells) throw DatabaseError("cell count does not match board shape");
  if (expected && (!(expected->shape == shape) || expected->k != k)) {
    throw DatabaseError("database is for " + shape.to_string() + " K=" + std::to_string(k) + ", expected " +
                        expected->shape.to_string() + " K=" + std::to_string(expected->k));
  }
  SolvedDatabase db = SolvedDatabase::empty_for(shape, k, marbles);
  if (db.space.size() != states) throw DatabaseError("state count does not match the game");
  db.stalemates = stalemates;
  r.read(db.values.bytes(), db.values.byte_size());
  if ((flags & 1U) != 0) {
    db.distances.resize(static_cast<std::size_t>(states));
    r.read(reinterpret_cast<char*>(db.distances.data()), db.distances.size() * sizeof(std::uint16_t));
  }
  const std::uint32_t computed = r.crc();
  std::uint32_t stored = 0;
  in.read(reinterpret_cast<char*>(&stored), sizeof stored);
  if (in.gcount() != sizeof stored) throw DatabaseError("database file is truncated");
  if (stored != computed) throw DatabaseError("database checksum mismatch");
  if (in.peek() != std::char_traits<char>::eof()) throw DatabaseError("trailing bytes after database checksum");
  return db;
}

}  // namespace abalone
