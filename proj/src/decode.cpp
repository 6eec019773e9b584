#include <algorithm>
#include <unordered_map>
#include <vector>

#include "bpec/delivery.hpp"

namespace bpec {

namespace {

// Sparse row over a block's unknown columns.
struct Row {
  std::vector<std::pair<int, std::uint8_t>> cols;
  Payload rhs;
};

std::uint8_t take_col(Row& row, int col) {
  for (auto it = row.cols.begin(); it != row.cols.end(); ++it)
    if (it->first == col) {
      const std::uint8_t c = it->second;
      row.cols.erase(it);
      return c;
    }
  return 0;
}

// Peel singleton rows, then solve whatever small dense residual is left.
// Returns the solved (column, payload) pairs; leaves genuinely rank-deficient
// columns unsolved.
std::vector<std::pair<int, Payload>> solve_sparse(std::vector<Row> rows, int num_cols) {
  std::vector<std::vector<int>> col_rows(num_cols);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (const auto& [col, c] : rows[r].cols) col_rows[col].push_back(static_cast<int>(r));

  std::vector<char> solved(num_cols, 0);
  std::vector<Payload> value(num_cols);
  std::vector<int> stack;
  for (std::size_t r = 0; r < rows.size(); ++r)
    if (rows[r].cols.size() == 1) stack.push_back(static_cast<int>(r));

  while (!stack.empty()) {
    const int r = stack.back();
    stack.pop_back();
    if (rows[r].cols.size() != 1) continue;
    const auto [col, coeff] = rows[r].cols.front();
    if (solved[col]) continue;
    solved[col] = 1;
    value[col] = rows[r].rhs;
    const std::uint8_t ci = gf::inv(coeff);
    for (auto& b : value[col]) b = gf::mul(b, ci);
    for (int other : col_rows[col]) {
      if (other == r) continue;
      const std::uint8_t c = take_col(rows[other], col);
      if (c == 0) continue;
      gf::axpy(rows[other].rhs, c, value[col]);
      if (rows[other].cols.size() == 1) stack.push_back(other);
    }
    rows[r].cols.clear();
  }

  // Dense cleanup over whatever the peel could not reach.
  std::vector<int> residual_cols;
  std::vector<int> col_map(num_cols, -1);
  for (int c = 0; c < num_cols; ++c)
    if (!solved[c] && !col_rows[c].empty()) {
      col_map[c] = static_cast<int>(residual_cols.size());
      residual_cols.push_back(c);
    }
  if (!residual_cols.empty() && residual_cols.size() <= 1024) {
    std::vector<gf::LinearRow> dense;
    for (auto& row : rows) {
      if (row.cols.empty()) continue;
      gf::LinearRow lr;
      lr.coeffs.assign(residual_cols.size(), 0);
      for (const auto& [col, c] : row.cols) lr.coeffs[col_map[col]] ^= c;
      lr.rhs = row.rhs;
      dense.push_back(std::move(lr));
    }
    if (dense.size() >= residual_cols.size()) {
      auto solution = gf::solve_linear_system(std::move(dense), residual_cols.size());
      if (solution)
        for (std::size_t i = 0; i < residual_cols.size(); ++i) {
          solved[residual_cols[i]] = 1;
          value[residual_cols[i]] = std::move((*solution)[i]);
        }
    }
  }

  std::vector<std::pair<int, Payload>> out;
  for (int c = 0; c < num_cols; ++c)
    if (solved[c]) out.emplace_back(c, std::move(value[c]));
  return out;
}

class Decoder {
 public:
  Decoder(int user, const DeliveryResult& run, const Library& library, const SubfileMap& subfiles,
          const std::vector<int>& demands)
      : user_(user),
        run_(run),
        library_(library),
        subfiles_(subfiles),
        demands_(demands),
        base_count_(run.transcript.base_symbols),
        total_symbols_(run.transcript.base_symbols +
                       static_cast<SymbolId>(run.transcript.slots.size())) {
    // Token symbols can point past the transcript when it is incomplete;
    // size the tables so those stay addressable (and simply unresolved).
    SymbolId top = total_symbols_;
    for (const auto& token : run.tokens) top = std::max(top, token.symbol + 1);
    known_.assign(top, 0);
    value_.resize(top);
  }

  DecodeResult operator()() {
    init_knowledge();
    collect_pools();

    // Staged elimination: later subphases first, so an upgraded token's
    // payload is already recovered when its origin block is processed.
    bool progress = true;
    while (progress) {
      progress = false;
      for (UserSet pool : pool_order_)
        if (solve_block(pool)) progress = true;
    }
    if (!wanted_complete()) joint_cleanup();
    return assemble();
  }

 private:
  void set_known(SymbolId sym, const Payload& p) {
    if (!known_[sym]) {
      known_[sym] = 1;
      value_[sym] = p;
    }
  }

  void init_knowledge() {
    const int F = library_.packets_per_file;
    for (int file = 0; file < library_.file_count; ++file)
      for (int idx = 0; idx < F; ++idx)
        if (subfiles_.cached_by(user_, file, idx))
          set_known(static_cast<SymbolId>(file) * F + idx, library_.at(file, idx));

    const auto& slots = run_.transcript.slots;
    for (std::size_t t = 0; t < slots.size(); ++t)
      if (contains(slots[t].state, user_)) set_known(slots[t].symbol, slots[t].payload);
  }

  void collect_pools() {
    for (const auto& token : run_.tokens)
      if (token.wanted_by == user_) queues_[token.pool].push_back(token.symbol);

    const auto& slots = run_.transcript.slots;
    for (std::size_t t = 0; t < slots.size(); ++t)
      if (popcount(slots[t].subphase) >= 2 && contains(slots[t].subphase, user_))
        pool_slots_[slots[t].subphase].push_back(static_cast<std::uint32_t>(t));

    const auto& lengths = run_.transcript.subphase_lengths;
    for (auto it = lengths.rbegin(); it != lengths.rend(); ++it)
      if (popcount(it->subphase) >= 2 && contains(it->subphase, user_) &&
          queues_.count(it->subphase))
        pool_order_.push_back(it->subphase);
  }

  // Rewrites coefficient * symbol over the current unknown columns, folding
  // known payloads into rhs and expanding unresolved coded symbols through
  // their defining combinations. Fails on an unresolved symbol outside the
  // block (retried after other blocks make progress).
  bool expand(SymbolId sym, std::uint8_t coeff, Payload& rhs,
              std::unordered_map<SymbolId, std::uint8_t>& row,
              const std::unordered_map<SymbolId, int>* block_cols, bool joint) {
    if (coeff == 0) return true;
    if (known_[sym]) {
      gf::axpy(rhs, coeff, value_[sym]);
      return true;
    }
    if (block_cols && block_cols->count(sym)) {
      row[sym] ^= coeff;
      return true;
    }
    if (sym >= base_count_) {
      if (sym >= total_symbols_) return false;  // slot missing from the transcript
      const auto& combo = run_.transcript.slots[sym - base_count_].combo;
      for (const auto& [s, c] : combo)
        if (!expand(s, gf::mul(coeff, c), rhs, row, block_cols, joint)) return false;
      return true;
    }
    if (joint) {
      row[sym] ^= coeff;
      return true;
    }
    return false;
  }

  bool solve_block(UserSet pool) {
    auto& queue = queues_[pool];
    std::unordered_map<SymbolId, int> cols;
    for (SymbolId sym : queue)
      if (!known_[sym] && !cols.count(sym)) cols.emplace(sym, static_cast<int>(cols.size()));
    if (cols.empty()) return false;

    std::vector<Row> rows;
    std::vector<SymbolId> col_syms(cols.size());
    for (const auto& [sym, col] : cols) col_syms[col] = sym;

    for (std::uint32_t t : pool_slots_[pool]) {
      const SlotRecord& slot = run_.transcript.slots[t];
      if (!known_[slot.symbol]) continue;  // payload not available (yet)
      Payload rhs = value_[slot.symbol];
      std::unordered_map<SymbolId, std::uint8_t> sparse;
      bool ok = true;
      for (const auto& [s, c] : slot.combo)
        if (!expand(s, c, rhs, sparse, &cols, false)) {
          ok = false;
          break;
        }
      if (!ok) continue;
      Row row;
      for (const auto& [sym, c] : sparse)
        if (c != 0) row.cols.emplace_back(cols.at(sym), c);
      if (row.cols.empty()) continue;
      row.rhs = std::move(rhs);
      rows.push_back(std::move(row));
    }

    bool progress = false;
    for (auto& [col, payload] : solve_sparse(std::move(rows), static_cast<int>(cols.size()))) {
      known_[col_syms[col]] = 1;
      value_[col_syms[col]] = std::move(payload);
      progress = true;
    }
    return progress;
  }

  bool wanted_complete() const {
    const int F = library_.packets_per_file;
    const SymbolId start = static_cast<SymbolId>(demands_[user_]) * F;
    for (int idx = 0; idx < F; ++idx)
      if (!known_[start + idx]) return false;
    return true;
  }

  // Cross-block residue: rare boundary events (a rider whose clone chain ran
  // dry) can couple a handful of unknowns across blocks. Solve them jointly
  // over base symbols.
  void joint_cleanup() {
    std::vector<Row> rows;
    std::unordered_map<SymbolId, int> cols;
    for (const auto& [pool, slot_list] : pool_slots_) {
      for (std::uint32_t t : slot_list) {
        const SlotRecord& slot = run_.transcript.slots[t];
        if (!known_[slot.symbol]) continue;
        Payload rhs = value_[slot.symbol];
        std::unordered_map<SymbolId, std::uint8_t> sparse;
        bool ok = true;
        for (const auto& [s, c] : slot.combo)
          if (!expand(s, c, rhs, sparse, nullptr, true)) {
            ok = false;
            break;
          }
        if (!ok) continue;
        std::vector<std::pair<SymbolId, std::uint8_t>> live;
        for (const auto& [sym, c] : sparse)
          if (c != 0) live.emplace_back(sym, c);
        if (live.empty() || live.size() > 64) continue;
        Row row;
        for (const auto& [sym, c] : live) {
          auto [it, inserted] = cols.emplace(sym, static_cast<int>(cols.size()));
          row.cols.emplace_back(it->second, c);
        }
        row.rhs = std::move(rhs);
        rows.push_back(std::move(row));
        if (cols.size() > 20000) return;  // give up, report failure honestly
      }
    }
    std::vector<SymbolId> col_syms(cols.size());
    for (const auto& [sym, col] : cols) col_syms[col] = sym;
    for (auto& [col, payload] : solve_sparse(std::move(rows), static_cast<int>(cols.size()))) {
      known_[col_syms[col]] = 1;
      value_[col_syms[col]] = std::move(payload);
    }
  }

  DecodeResult assemble() {
    DecodeResult out;
    const int F = library_.packets_per_file;
    const SymbolId start = static_cast<SymbolId>(demands_[user_]) * F;
    for (int idx = 0; idx < F; ++idx)
      if (!known_[start + idx]) ++out.unresolved;
    if (out.unresolved > 0) return out;
    out.success = true;
    out.file.reserve(F);
    for (int idx = 0; idx < F; ++idx) out.file.push_back(value_[start + idx]);
    return out;
  }

  int user_;
  const DeliveryResult& run_;
  const Library& library_;
  const SubfileMap& subfiles_;
  const std::vector<int>& demands_;
  SymbolId base_count_;
  SymbolId total_symbols_;
  std::vector<char> known_;
  std::vector<Payload> value_;
  std::unordered_map<UserSet, std::vector<SymbolId>> queues_;
  std::unordered_map<UserSet, std::vector<std::uint32_t>> pool_slots_;
  std::vector<UserSet> pool_order_;
};

}  // namespace

DecodeResult decode_user(int user, const DeliveryResult& run, const Library& library,
                         const SubfileMap& subfiles, const std::vector<int>& demands) {
  if (user < 0 || user >= run.transcript.user_count)
    throw std::invalid_argument("decode: user out of range");
  return Decoder(user, run, library, subfiles, demands)();
}

}  // namespace bpec
