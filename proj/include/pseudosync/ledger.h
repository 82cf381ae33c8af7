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

// Append-only hash chain of pseudonym shuffle transactions.
//
// Each block stores a transaction, the previous block hash and its own hash
// H(serialize(transaction) || prev_hash). The genesis block links to an
// all-zero digest. Pseudonym ids never appear raw; transactions carry only
// salted commitments.
//
// Canonical transaction encoding (all integers big-endian):
//
//   u64  epoch as IEEE-754 bits
//   u32  rsu id
//   u8   pool kind (0 = VMU, 1 = VT)
//   u32  commitment count n
//   n x 32 bytes   commitments
//   32 bytes       permutation seed commitment
//
// Exported chain file: the 8-byte magic "PSCHAIN1", then per block a u32
// length, the encoded transaction, the 32-byte prev hash and the 32-byte
// block hash.

#ifndef PSEUDOSYNC_LEDGER_H_
#define PSEUDOSYNC_LEDGER_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "pseudosync/types.h"

namespace pseudosync {

using Digest = std::array<uint8_t, 32>;

inline constexpr char kHashFunctionName[] = "SHA-256";

Digest Sha256(std::span<const uint8_t> data);
std::string DigestHex(const Digest& digest);

struct ShuffleTransaction {
  double epoch = 0.0;
  RsuId rsu_id = 0;
  EntityKind pool_kind = EntityKind::kVmu;
  std::vector<Digest> commitments;
  Digest permutation_seed_commitment{};

  // Commitments pairwise distinct and epoch finite.
  absl::Status Validate() const;
  std::vector<uint8_t> Serialize() const;
  static absl::StatusOr<ShuffleTransaction> Deserialize(
      std::span<const uint8_t> bytes);

  bool operator==(const ShuffleTransaction&) const = default;
};

struct Block {
  ShuffleTransaction transaction;
  Digest prev_hash{};
  Digest block_hash{};

  bool operator==(const Block&) const = default;
};

Digest ComputeBlockHash(const ShuffleTransaction& txn, const Digest& prev);

class Chain {
 public:
  Chain() = default;
  // Wraps blocks as given, without checking them; see VerifyChain.
  static Chain FromBlocks(std::vector<Block> blocks);

  // Single-writer append. Fails with EpochRegression when the transaction is
  // older than the head.
  absl::Status Append(ShuffleTransaction txn);

  const std::vector<Block>& blocks() const { return blocks_; }
  size_t size() const { return blocks_.size(); }
  bool empty() const { return blocks_.empty(); }
  Digest head_hash() const;

 private:
  std::vector<Block> blocks_;
};

// nullopt when every block links and hashes correctly with non-decreasing
// epochs; otherwise the index of the first bad block.
std::optional<size_t> VerifyChain(const Chain& chain);

std::vector<uint8_t> ExportChain(const Chain& chain);
absl::StatusOr<Chain> ImportChain(std::span<const uint8_t> bytes);

// Decodes and verifies an exported chain in one pass. A block that fails to
// decode counts as invalid at its own index.
std::optional<size_t> VerifyChainBytes(std::span<const uint8_t> bytes);

}  // namespace pseudosync

#endif  // PSEUDOSYNC_LEDGER_H_
