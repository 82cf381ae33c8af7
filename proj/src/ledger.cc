// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pseudosync/ledger.h"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <set>

#include "absl/strings/str_format.h"
#include "pseudosync/errors.h"

namespace pseudosync {
namespace {

constexpr char kMagic[] = "PSCHAIN1";
constexpr size_t kMagicSize = 8;
constexpr size_t kFixedTxnBytes = 8 + 4 + 1 + 4 + 32;

void PutU32(std::vector<uint8_t>& out, uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out.push_back(static_cast<uint8_t>(v >> shift));
  }
}

void PutU64(std::vector<uint8_t>& out, uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out.push_back(static_cast<uint8_t>(v >> shift));
  }
}

class Reader {
 public:
  explicit Reader(std::span<const uint8_t> bytes) : bytes_(bytes) {}

  size_t remaining() const { return bytes_.size() - pos_; }
  size_t position() const { return pos_; }

  bool U8(uint8_t& v) {
    if (remaining() < 1) return false;
    v = bytes_[pos_++];
    return true;
  }
  bool U32(uint32_t& v) {
    if (remaining() < 4) return false;
    v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | bytes_[pos_++];
    return true;
  }
  bool U64(uint64_t& v) {
    if (remaining() < 8) return false;
    v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | bytes_[pos_++];
    return true;
  }
  bool Raw(Digest& d) {
    if (remaining() < d.size()) return false;
    std::memcpy(d.data(), bytes_.data() + pos_, d.size());
    pos_ += d.size();
    return true;
  }
  bool Slice(size_t n, std::span<const uint8_t>& out) {
    if (remaining() < n) return false;
    out = bytes_.subspan(pos_, n);
    pos_ += n;
    return true;
  }

 private:
  std::span<const uint8_t> bytes_;
  size_t pos_ = 0;
};

// Decodes one exported block. Returns false on any framing or field error.
bool DecodeBlock(Reader& reader, Block& block) {
  uint32_t length;
  std::span<const uint8_t> body;
  if (!reader.U32(length) || !reader.Slice(length, body)) return false;
  absl::StatusOr<ShuffleTransaction> txn = ShuffleTransaction::Deserialize(body);
  if (!txn.ok()) return false;
  block.transaction = *std::move(txn);
  return reader.Raw(block.prev_hash) && reader.Raw(block.block_hash);
}

bool BlockIsValid(const Block& block, const Block* previous) {
  const Digest expected_prev = previous ? previous->block_hash : Digest{};
  if (block.prev_hash != expected_prev) return false;
  if (!block.transaction.Validate().ok()) return false;
  if (previous && block.transaction.epoch < previous->transaction.epoch) {
    return false;
  }
  return ComputeBlockHash(block.transaction, block.prev_hash) ==
         block.block_hash;
}

}  // namespace

Digest Sha256(std::span<const uint8_t> data) {
  Digest out{};
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(),
             nullptr);
  return out;
}

std::string DigestHex(const Digest& digest) {
  std::string out;
  out.reserve(64);
  for (uint8_t b : digest) out += absl::StrFormat("%02x", b);
  return out;
}

absl::Status ShuffleTransaction::Validate() const {
  if (!std::isfinite(epoch)) {
    return absl::InvalidArgumentError("epoch must be finite");
  }
  std::set<Digest> seen(commitments.begin(), commitments.end());
  if (seen.size() != commitments.size()) {
    return absl::InvalidArgumentError("commitments must be pairwise distinct");
  }
  return absl::OkStatus();
}

std::vector<uint8_t> ShuffleTransaction::Serialize() const {
  std::vector<uint8_t> out;
  out.reserve(kFixedTxnBytes + 32 * commitments.size());
  PutU64(out, std::bit_cast<uint64_t>(epoch));
  PutU32(out, rsu_id);
  out.push_back(static_cast<uint8_t>(pool_kind));
  PutU32(out, static_cast<uint32_t>(commitments.size()));
  for (const Digest& c : commitments) out.insert(out.end(), c.begin(), c.end());
  out.insert(out.end(), permutation_seed_commitment.begin(),
             permutation_seed_commitment.end());
  return out;
}

absl::StatusOr<ShuffleTransaction> ShuffleTransaction::Deserialize(
    std::span<const uint8_t> bytes) {
  Reader reader(bytes);
  ShuffleTransaction txn;
  uint64_t epoch_bits;
  uint8_t kind;
  uint32_t count;
  if (!reader.U64(epoch_bits) || !reader.U32(txn.rsu_id) || !reader.U8(kind) ||
      !reader.U32(count)) {
    return absl::DataLossError("truncated transaction header");
  }
  if (kind > 1) return absl::DataLossError("unknown pool kind");
  if (bytes.size() != kFixedTxnBytes + 32 * static_cast<size_t>(count)) {
    return absl::DataLossError(absl::StrFormat(
        "transaction length %d does not match %d commitments", bytes.size(),
        count));
  }
  txn.epoch = std::bit_cast<double>(epoch_bits);
  txn.pool_kind = static_cast<EntityKind>(kind);
  txn.commitments.resize(count);
  for (Digest& c : txn.commitments) reader.Raw(c);
  reader.Raw(txn.permutation_seed_commitment);
  return txn;
}

Digest ComputeBlockHash(const ShuffleTransaction& txn, const Digest& prev) {
  std::vector<uint8_t> buffer = txn.Serialize();
  buffer.insert(buffer.end(), prev.begin(), prev.end());
  return Sha256(buffer);
}

Chain Chain::FromBlocks(std::vector<Block> blocks) {
  Chain chain;
  chain.blocks_ = std::move(blocks);
  return chain;
}

absl::Status Chain::Append(ShuffleTransaction txn) {
  if (absl::Status s = txn.Validate(); !s.ok()) return s;
  if (!blocks_.empty() && txn.epoch < blocks_.back().transaction.epoch) {
    return MakeError(ErrorKind::kEpochRegression,
                     absl::StrFormat("epoch %g precedes head epoch %g",
                                     txn.epoch,
                                     blocks_.back().transaction.epoch));
  }
  Block block;
  block.prev_hash = head_hash();
  block.block_hash = ComputeBlockHash(txn, block.prev_hash);
  block.transaction = std::move(txn);
  blocks_.push_back(std::move(block));
  return absl::OkStatus();
}

Digest Chain::head_hash() const {
  return blocks_.empty() ? Digest{} : blocks_.back().block_hash;
}

std::optional<size_t> VerifyChain(const Chain& chain) {
  const std::vector<Block>& blocks = chain.blocks();
  for (size_t i = 0; i < blocks.size(); ++i) {
    if (!BlockIsValid(blocks[i], i > 0 ? &blocks[i - 1] : nullptr)) return i;
  }
  return std::nullopt;
}

std::vector<uint8_t> ExportChain(const Chain& chain) {
  std::vector<uint8_t> out(kMagic, kMagic + kMagicSize);
  for (const Block& block : chain.blocks()) {
    const std::vector<uint8_t> body = block.transaction.Serialize();
    PutU32(out, static_cast<uint32_t>(body.size()));
    out.insert(out.end(), body.begin(), body.end());
    out.insert(out.end(), block.prev_hash.begin(), block.prev_hash.end());
    out.insert(out.end(), block.block_hash.begin(), block.block_hash.end());
  }
  return out;
}

absl::StatusOr<Chain> ImportChain(std::span<const uint8_t> bytes) {
  if (bytes.size() < kMagicSize ||
      std::memcmp(bytes.data(), kMagic, kMagicSize) != 0) {
    return absl::DataLossError("missing chain magic");
  }
  Reader reader(bytes.subspan(kMagicSize));
  std::vector<Block> blocks;
  while (reader.remaining() > 0) {
    Block block;
    if (!DecodeBlock(reader, block)) {
      return absl::DataLossError(
          absl::StrFormat("malformed block %d", blocks.size()));
    }
    blocks.push_back(std::move(block));
  }
  return Chain::FromBlocks(std::move(blocks));
}

std::optional<size_t> VerifyChainBytes(std::span<const uint8_t> bytes) {
  if (bytes.size() < kMagicSize ||
      std::memcmp(bytes.data(), kMagic, kMagicSize) != 0) {
    return 0;
  }
  Reader reader(bytes.subspan(kMagicSize));
  std::optional<Block> previous;
  size_t index = 0;
  while (reader.remaining() > 0) {
    Block block;
    if (!DecodeBlock(reader, block)) return index;
    if (!BlockIsValid(block, previous ? &*previous : nullptr)) return index;
    previous = std::move(block);
    ++index;
  }
  return std::nullopt;
}

}  // namespace pseudosync
